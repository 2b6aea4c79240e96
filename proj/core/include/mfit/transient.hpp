#ifndef MFIT_TRANSIENT_HPP
#define MFIT_TRANSIENT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfit/rc_model.hpp"
#include "mfit/trace.hpp"
#include "mfit/workload.hpp"

namespace mfit {

struct SolverConfig {
    double rtol = 1e-6;
    double atol = 1e-8;    // K
    double max_step = 0.0; // s; 0 => limited by segment length only
    double output_dt = 0.01; // s
};

/// Solve G * T_rise = -q and return ambient + rise, deg C per node.
/// Throws NumericalError when G is singular (no convection anywhere).
Eigen::VectorXd steady_state(const RCModel& model,
                             const std::map<std::string, double>& powers);
Eigen::VectorXd steady_state(const RCModel& model, const Eigen::VectorXd& q);

/// Integrate C dT/dt = G T_rise + q(t) over the power trace with an
/// adaptive TR-BDF2 scheme (L-stable, embedded error estimate). Integration
/// restarts at every power-change instant, so a sample falling on a change
/// time is the left-limit value. First output row is the initial condition.
TemperatureTrace simulate(const RCModel& model, const PowerTrace& trace,
                          const SolverConfig& config,
                          const std::optional<Eigen::VectorXd>& t_init_c = std::nullopt);

/// One layer of a trace sample arranged on the layer's (union) grid.
/// Cells with no node carry NaN (written as NA in CSV output).
struct Heatmap {
    std::vector<double> x_edges; // m, size nx+1
    std::vector<double> y_edges; // m, size ny+1
    Eigen::MatrixXd values;      // ny x nx, deg C, NaN = absent
};

/// Sample nearest to t; the layer grid is the rectilinear refinement of all
/// node footprints in that layer.
Heatmap layer_heatmap(const TemperatureTrace& trace, const RCModel& model,
                      const std::string& layer, double t);

void save_heatmap_csv(const Heatmap& map, const std::string& path);

} // namespace mfit

#endif
