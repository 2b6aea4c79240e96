#include "mfit/trace.hpp"
#include "mfit/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mfit {

namespace {

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

void save_trace_csv(const TemperatureTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open '" + path + "' for writing");
    out << "time_s";
    for (const std::string& id : trace.node_ids) out << ',' << id;
    out << '\n';
    for (int r = 0; r < trace.rows(); ++r) {
        out << fmt(trace.times[r]);
        for (int c = 0; c < trace.cols(); ++c) out << ',' << fmt(trace.values(r, c));
        out << '\n';
    }
}

TemperatureTrace load_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open trace file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DomainError(path + ": empty trace file");
    auto header = split_csv(line);
    if (header.empty() || header[0] != "time_s")
        throw DomainError(path + ": expected header starting with time_s");

    TemperatureTrace trace;
    trace.node_ids.assign(header.begin() + 1, header.end());

    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv(line);
        if (fields.size() != header.size())
            throw DomainError(path + ":" + std::to_string(lineno) + ": ragged row");
        std::vector<double> row;
        for (const std::string& f : fields) {
            try {
                row.push_back(std::stod(f));
            } catch (const std::exception&) {
                throw DomainError(path + ":" + std::to_string(lineno) + ": bad number '" + f + "'");
            }
        }
        if (!rows.empty() && row[0] <= rows.back()[0])
            throw DomainError(path + ":" + std::to_string(lineno) + ": times not increasing");
        rows.push_back(std::move(row));
    }
    trace.values.resize(static_cast<int>(rows.size()), static_cast<int>(trace.node_ids.size()));
    for (size_t r = 0; r < rows.size(); ++r) {
        trace.times.push_back(rows[r][0]);
        for (size_t c = 1; c < rows[r].size(); ++c)
            trace.values(static_cast<int>(r), static_cast<int>(c - 1)) = rows[r][c];
    }
    return trace;
}

} // namespace mfit
