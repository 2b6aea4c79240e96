#ifndef MFIT_TRACE_HPP
#define MFIT_TRACE_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mfit {

/// Rectangular time/node temperature table in deg C. Node ids follow the
/// `layer/block/i_j` convention of RCModel.
struct TemperatureTrace {
    std::vector<double> times;          // strictly increasing, s
    std::vector<std::string> node_ids;
    Eigen::MatrixXd values;             // times.size() x node_ids.size(), deg C

    int rows() const { return static_cast<int>(times.size()); }
    int cols() const { return static_cast<int>(node_ids.size()); }
};

/// CSV with header `time_s,<node_id>,...`, one row per sample.
void save_trace_csv(const TemperatureTrace& trace, const std::string& path);
TemperatureTrace load_trace_csv(const std::string& path);

} // namespace mfit

#endif
