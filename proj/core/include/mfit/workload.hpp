#ifndef MFIT_WORKLOAD_HPP
#define MFIT_WORKLOAD_HPP

#include <string>
#include <vector>

namespace mfit {

/// Piecewise-constant per-power-block heat generation. values[k][p] holds
/// from change_times[k] until the next change time (or end_time).
struct PowerTrace {
    std::vector<std::string> power_block_ids;
    std::vector<double> change_times; // strictly increasing, starts at 0
    std::vector<std::vector<double>> values; // W, one row per change time
    double end_time = 0.0;

    int segments() const { return static_cast<int>(change_times.size()); }
    double segment_end(int k) const {
        return k + 1 < segments() ? change_times[k + 1] : end_time;
    }
};

/// Stress / PRBS / cooldown synthetic workload parameters.
struct SynthSpec {
    double stress_s = 10.0;
    double prbs_s = 30.0;
    double cooldown_s = 15.0;
    double dwell_s = 0.1;   // PRBS bit period
    double max_power_w = 3.0;
    uint64_t seed = 1;
};

/// CSV: header `time_s,<id>,...`, one row per change instant, footer comment
/// `# end_time_s=<t>`. Parse errors carry the offending line number.
PowerTrace load_power_csv(const std::string& path);
void save_power_csv(const PowerTrace& trace, const std::string& path);

/// Max power on all blocks, then an independent PRBS per block (SplitMix64
/// bit stream seeded from (seed, block id)), then everything off.
/// All change times are exact integer multiples of dwell_s.
PowerTrace synth_wl1(const SynthSpec& spec, const std::vector<std::string>& power_block_ids);

/// The PRBS bit generator, exposed for reproducibility tests: bit k of the
/// stream for (seed, block id).
class PrbsStream {
public:
    PrbsStream(uint64_t seed, const std::string& block_id);
    bool next();

private:
    uint64_t state_;
};

} // namespace mfit

#endif
