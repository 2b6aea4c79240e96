#ifndef MFIT_CALIBRATION_HPP
#define MFIT_CALIBRATION_HPP

#include <vector>

#include "mfit/package.hpp"

namespace mfit {

/// Detailed sub-structure (e.g. solder bumps plus underfill) to be replaced
/// by one homogeneous block. Volume fractions must sum to 1.
struct CompositeLayerSpec {
    struct Constituent {
        double volume_fraction = 0.0;
        Material material;
    };
    std::vector<Constituent> constituents;
    double thickness = 0.0; // m
    double area = 0.0;      // m^2
};

/// Air-cooled heatsink geometry for the equivalent-HTC reduction.
struct HeatsinkSpec {
    double h_avg = 0.0;  // W/(m^2 K)
    double area_total = 0.0; // m^2
    double area_fin = 0.0;   // m^2, per fin
    int fin_count = 0;
    double fin_efficiency = 0.0; // in [0,1]
    double base_length = 0.0;   // m
    double base_width = 0.0;    // m
};

struct EquivalentCapacitance {
    double rho_eq = 0.0; // kg/m^3
    double c_v_eq = 0.0; // J/(kg K)
};

/// k = q * l / (A * dT), the conductivity a homogeneous slab needs to show
/// the same temperature drop as the detailed structure.
double equivalent_conductivity(double q_dot_w, double length_m, double area_m2, double delta_t_k);

/// Volume-weighted density with mass-weighted specific heat, so the
/// homogeneous block keeps the composite's total heat capacity.
EquivalentCapacitance weighted_average_capacitance(const CompositeLayerSpec& spec);

/// Equivalent HTC of a finned heatsink referred to its base plate area.
double heatsink_htc(const HeatsinkSpec& spec);

} // namespace mfit

#endif
