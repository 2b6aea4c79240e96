#ifndef MFIT_DSS_HPP
#define MFIT_DSS_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfit/rc_model.hpp"
#include "mfit/trace.hpp"
#include "mfit/workload.hpp"

namespace mfit {

/// Discrete state-space pair: T[k+1] = A T[k] + B q[k], state in K-rise,
/// q in watts per power block. Valid only for the model it was built from.
struct DSSModel {
    Eigen::MatrixXd A; // N x N
    Eigen::MatrixXd B; // N x P
    double ts = 0.0;   // s
    std::vector<std::string> node_ids;
    std::vector<std::string> power_block_ids;
    std::string model_fingerprint; // hash of the source model file, may be empty
    double ambient_c = 0.0;

    int size() const { return static_cast<int>(A.rows()); }
};

/// Zero-order-hold discretization: A = exp(C^-1 G Ts), B the exact integral
/// of the input response over one period, computed via the symmetrized
/// eigendecomposition of C^-1/2 G C^-1/2.
DSSModel discretize(const RCModel& model, double ts);

/// Power-iteration estimate of the spectral radius of A.
double spectral_radius_estimate(const Eigen::MatrixXd& a, int iters = 200);

/// One multiply-accumulate step; state and result are K-rise.
Eigen::VectorXd step(const DSSModel& dss, const Eigen::VectorXd& state,
                     const Eigen::VectorXd& powers);

/// Iterate step over a trace whose change times are multiples of Ts
/// (within 1e-9 s); emits one row per Ts, first row = initial condition.
TemperatureTrace run_dss(const DSSModel& dss, const PowerTrace& trace,
                         const Eigen::VectorXd* t_init_c = nullptr);

/// Text persistence with dense A, B at >= 15 significant digits.
void save_dss(const DSSModel& dss, const std::string& path);
DSSModel load_dss(const std::string& path);

} // namespace mfit

#endif
