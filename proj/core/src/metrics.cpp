#include "mfit/metrics.hpp"
#include "mfit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mfit {

ComparisonReport compare(const TemperatureTrace& reference, const TemperatureTrace& candidate,
                         double threshold_c, double guard_k,
                         const std::vector<std::string>* node_subset) {
    if (reference.rows() == 0 || candidate.rows() == 0)
        throw DomainError("compare: empty trace");

    // intersect node sets (optionally restricted)
    std::set<std::string> cand_ids(candidate.node_ids.begin(), candidate.node_ids.end());
    std::set<std::string> allowed;
    if (node_subset) allowed.insert(node_subset->begin(), node_subset->end());

    std::vector<std::pair<int, int>> columns; // (ref col, cand col)
    std::vector<std::string> ids;
    for (int rc = 0; rc < reference.cols(); ++rc) {
        const std::string& id = reference.node_ids[rc];
        if (!cand_ids.count(id)) continue;
        if (node_subset && !allowed.count(id)) continue;
        const auto it =
            std::find(candidate.node_ids.begin(), candidate.node_ids.end(), id);
        columns.emplace_back(rc, static_cast<int>(it - candidate.node_ids.begin()));
        ids.push_back(id);
    }
    if (columns.empty()) throw DomainError("compare: traces share no node ids");

    // common time window on the reference grid
    const double t0 = std::max(reference.times.front(), candidate.times.front());
    const double t1 = std::min(reference.times.back(), candidate.times.back());
    if (t0 > t1) throw DomainError("compare: traces have disjoint time windows");

    ComparisonReport report;
    report.threshold_c = threshold_c;
    report.guard_k = guard_k;
    const double flag_level = threshold_c - guard_k;

    std::vector<double> node_abs_sum(columns.size(), 0.0);
    long samples = 0;
    int cand_row = 0;
    for (int r = 0; r < reference.rows(); ++r) {
        const double t = reference.times[r];
        if (t < t0 || t > t1) continue;
        // previous-sample hold: last candidate row with time <= t
        while (cand_row + 1 < candidate.rows() && candidate.times[cand_row + 1] <= t)
            ++cand_row;

        for (size_t c = 0; c < columns.size(); ++c) {
            const double ref = reference.values(r, columns[c].first);
            const double cand = candidate.values(cand_row, columns[c].second);
            node_abs_sum[c] += std::abs(ref - cand);
            const bool violation = ref >= threshold_c;
            const bool flagged = cand >= flag_level;
            if (violation) {
                ++report.reference_violations;
                if (flagged) ++report.flagged_and_matched;
            } else if (flagged) {
                ++report.false_positives;
            }
        }
        ++samples;
    }
    if (samples == 0) throw DomainError("compare: no reference samples in the common window");

    double total = 0.0;
    for (size_t c = 0; c < columns.size(); ++c) {
        total += node_abs_sum[c];
        report.per_node_mae.emplace_back(ids[c], node_abs_sum[c] / samples);
    }
    report.mae = total / (samples * static_cast<long>(columns.size()));
    if (report.reference_violations > 0)
        report.violation_accuracy = static_cast<double>(report.flagged_and_matched) /
                                    static_cast<double>(report.reference_violations);
    return report;
}

} // namespace mfit
