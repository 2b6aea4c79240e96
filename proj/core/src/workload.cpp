#include "mfit/workload.hpp"
#include "mfit/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mfit {

namespace {

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace

PrbsStream::PrbsStream(uint64_t seed, const std::string& block_id)
    : state_(seed ^ fnv1a(block_id)) {}

bool PrbsStream::next() { return (splitmix64(state_) >> 63) != 0; }

PowerTrace load_power_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open power file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DomainError(path + ": empty power file");
    auto header = split_csv(line);
    if (header.empty() || header[0] != "time_s")
        throw DomainError(path + ":1: expected header starting with time_s");

    PowerTrace trace;
    trace.power_block_ids.assign(header.begin() + 1, header.end());

    bool have_end = false;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string key = "# end_time_s=";
            if (line.rfind(key, 0) == 0) {
                trace.end_time = std::stod(line.substr(key.size()));
                have_end = true;
            }
            continue;
        }
        auto fields = split_csv(line);
        if (fields.size() != header.size())
            throw DomainError(path + ":" + std::to_string(lineno) + ": ragged row");
        std::vector<double> vals;
        double t;
        try {
            t = std::stod(fields[0]);
            for (size_t i = 1; i < fields.size(); ++i) vals.push_back(std::stod(fields[i]));
        } catch (const std::exception&) {
            throw DomainError(path + ":" + std::to_string(lineno) + ": bad number");
        }
        if (trace.change_times.empty() && t != 0.0)
            throw DomainError(path + ":" + std::to_string(lineno) + ": first change time must be 0");
        if (!trace.change_times.empty() && t <= trace.change_times.back())
            throw DomainError(path + ":" + std::to_string(lineno) + ": times not strictly increasing");
        for (double v : vals)
            if (v < 0)
                throw DomainError(path + ":" + std::to_string(lineno) + ": negative power");
        trace.change_times.push_back(t);
        trace.values.push_back(std::move(vals));
    }
    if (trace.change_times.empty()) throw DomainError(path + ": no power rows");
    if (!have_end) throw DomainError(path + ": missing '# end_time_s=<t>' footer");
    if (trace.end_time <= trace.change_times.back())
        throw DomainError(path + ": end time must exceed the last change time");
    return trace;
}

void save_power_csv(const PowerTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open '" + path + "' for writing");
    out << "time_s";
    for (const std::string& id : trace.power_block_ids) out << ',' << id;
    out << '\n';
    for (int k = 0; k < trace.segments(); ++k) {
        out << fmt(trace.change_times[k]);
        for (double v : trace.values[k]) out << ',' << fmt(v);
        out << '\n';
    }
    out << "# end_time_s=" << fmt(trace.end_time) << '\n';
}

PowerTrace synth_wl1(const SynthSpec& spec, const std::vector<std::string>& ids) {
    if (spec.dwell_s <= 0) throw DomainError("synth_wl1: dwell must be positive");
    if (spec.max_power_w <= 0) throw DomainError("synth_wl1: max power must be positive");
    if (spec.stress_s < 0 || spec.prbs_s < 0 || spec.cooldown_s < 0)
        throw DomainError("synth_wl1: durations must be non-negative");

    const size_t P = ids.size();
    // phase boundaries as dwell counts so every change time is k * dwell
    const long stress_bits = std::lround(spec.stress_s / spec.dwell_s);
    const long prbs_bits = std::lround(spec.prbs_s / spec.dwell_s);
    const long cool_bits = std::lround(spec.cooldown_s / spec.dwell_s);

    std::vector<PrbsStream> streams;
    streams.reserve(P);
    for (const std::string& id : ids) streams.emplace_back(spec.seed, id);

    PowerTrace trace;
    trace.power_block_ids = ids;
    auto push_row = [&](long bit, const std::vector<double>& row) {
        if (!trace.values.empty() && trace.values.back() == row) return;
        trace.change_times.push_back(bit * spec.dwell_s);
        trace.values.push_back(row);
    };

    if (stress_bits > 0) push_row(0, std::vector<double>(P, spec.max_power_w));
    for (long b = 0; b < prbs_bits; ++b) {
        std::vector<double> row(P);
        for (size_t p = 0; p < P; ++p) row[p] = streams[p].next() ? spec.max_power_w : 0.0;
        push_row(stress_bits + b, row);
    }
    if (cool_bits > 0) push_row(stress_bits + prbs_bits, std::vector<double>(P, 0.0));
    if (trace.values.empty()) push_row(0, std::vector<double>(P, 0.0));

    const long total_bits = stress_bits + prbs_bits + cool_bits;
    trace.end_time = std::max<long>(total_bits, 1) * spec.dwell_s;
    return trace;
}

} // namespace mfit
