#include "mfit/calibration.hpp"
#include "mfit/errors.hpp"

#include <cmath>

namespace mfit {

double equivalent_conductivity(double q_dot_w, double length_m, double area_m2,
                               double delta_t_k) {
    if (q_dot_w <= 0 || length_m <= 0 || area_m2 <= 0 || delta_t_k <= 0)
        throw DomainError("equivalent_conductivity: all inputs must be positive");
    return q_dot_w * length_m / (area_m2 * delta_t_k);
}

EquivalentCapacitance weighted_average_capacitance(const CompositeLayerSpec& spec) {
    double fsum = 0.0;
    for (const auto& c : spec.constituents) fsum += c.volume_fraction;
    if (std::abs(fsum - 1.0) > 1e-9)
        throw DomainError("weighted_average_capacitance: volume fractions sum to " +
                          std::to_string(fsum) + ", expected 1");

    double rho_eq = 0.0;
    double heat_capacity = 0.0; // per unit volume, J/(m^3 K)
    for (const auto& c : spec.constituents) {
        rho_eq += c.volume_fraction * c.material.rho;
        heat_capacity += c.volume_fraction * c.material.rho * c.material.c_v;
    }
    return {rho_eq, heat_capacity / rho_eq};
}

double heatsink_htc(const HeatsinkSpec& spec) {
    if (spec.h_avg <= 0 || spec.area_total <= 0 || spec.base_length <= 0 ||
        spec.base_width <= 0 || spec.fin_count < 0 || spec.fin_efficiency < 0 ||
        spec.fin_efficiency > 1 || (spec.fin_count > 0 && spec.area_fin <= 0))
        throw DomainError("heatsink_htc: invalid heatsink specification");

    const double dead_area = spec.fin_count * spec.area_fin * (1.0 - spec.fin_efficiency);
    if (dead_area > spec.area_total)
        throw DomainError("heatsink_htc: fin dead area exceeds total area");

    return spec.h_avg * spec.area_total * (1.0 - dead_area / spec.area_total) /
           (spec.base_length * spec.base_width);
}

} // namespace mfit
