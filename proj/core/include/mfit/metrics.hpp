#ifndef MFIT_METRICS_HPP
#define MFIT_METRICS_HPP

#include <optional>
#include <string>
#include <vector>

#include "mfit/trace.hpp"

namespace mfit {

struct ComparisonReport {
    double mae = 0.0; // K, mean over (time, node) of |ref - cand|
    std::optional<double> violation_accuracy; // empty when no reference violations
    long reference_violations = 0;
    long flagged_and_matched = 0;
    long false_positives = 0; // candidate flags with no reference violation
    double threshold_c = 85.0;
    double guard_k = 1.0;
    std::vector<std::pair<std::string, double>> per_node_mae;
};

/// Score candidate against reference on the reference time grid (candidate
/// resampled by previous-sample hold) over the intersection of node ids,
/// optionally restricted to a node subset (e.g. chiplet nodes).
/// A reference violation is ref >= threshold; the candidate flags when
/// cand >= threshold - guard. Throws DomainError on disjoint node sets or
/// time windows.
ComparisonReport compare(const TemperatureTrace& reference, const TemperatureTrace& candidate,
                         double threshold_c = 85.0, double guard_k = 1.0,
                         const std::vector<std::string>* node_subset = nullptr);

} // namespace mfit

#endif
