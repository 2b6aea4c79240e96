// mfit: thermal model toolchain for multi-chiplet packages.
// Subcommands: build, calibrate, synth-wl1, simulate, steady, discretize,
// run-dss, compare, heatmap. Exit codes: 0 ok, 1 input/validation error,
// 2 numerical failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfit/calibration.hpp"
#include "mfit/dss.hpp"
#include "mfit/errors.hpp"
#include "mfit/metrics.hpp"
#include "mfit/package.hpp"
#include "mfit/rc_model.hpp"
#include "mfit/transient.hpp"
#include "mfit/workload.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr int kModelFormatVersion = 1;
constexpr int kDssFormatVersion = 1;

using Clock = std::chrono::steady_clock;

// Collects per-phase wall-clock timings and writes the run manifest next to
// the primary output.
class Manifest {
public:
    Manifest(std::string subcommand) : start_(Clock::now()) {
        j_["subcommand"] = std::move(subcommand);
        j_["tool_version"] = kToolVersion;
        j_["inputs"] = nlohmann::json::object();
        j_["config"] = nlohmann::json::object();
        j_["timings_s"] = nlohmann::json::object();
    }

    void input(const std::string& key, const std::string& path) {
        j_["inputs"][key] = std::filesystem::absolute(path).string();
    }
    template <typename T>
    void config(const std::string& key, const T& value) {
        j_["config"][key] = value;
    }
    template <typename T>
    void note(const std::string& key, const T& value) {
        j_[key] = value;
    }

    void phase(const std::string& name) {
        const auto now = Clock::now();
        if (!phase_name_.empty())
            j_["timings_s"][phase_name_] =
                std::chrono::duration<double>(now - phase_start_).count();
        phase_name_ = name;
        phase_start_ = now;
    }

    void write(const std::string& primary_output) {
        phase(""); // close the last phase
        j_["timings_s"]["total"] =
            std::chrono::duration<double>(Clock::now() - start_).count();
        std::ofstream out(primary_output + ".manifest.json");
        out << j_.dump(2) << '\n';
    }

private:
    nlohmann::json j_;
    Clock::time_point start_;
    Clock::time_point phase_start_;
    std::string phase_name_;
};

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

int cmd_build(const std::string& package_path, const std::string& out_path) {
    Manifest mf("build");
    mf.input("package", package_path);
    mf.phase("parse");
    const mfit::PackageSpec spec = mfit::parse_package_file(package_path);
    mf.phase("build");
    const mfit::RCModel model = mfit::build_rc(spec);
    mf.phase("write");
    mfit::save_model(model, out_path);

    std::map<std::string, int> per_layer;
    for (const mfit::NodeRecord& n : model.nodes) ++per_layer[n.layer];
    mf.note("node_count", model.size());
    mf.note("power_block_count", model.power_block_ids.size());
    mf.note("layer_node_counts", per_layer);
    mf.write(out_path);
    std::cerr << "built model with " << model.size() << " nodes, "
              << model.power_block_ids.size() << " power blocks -> " << out_path << '\n';
    return 0;
}

int cmd_calibrate(const std::string& input_path) {
    std::ifstream in(input_path);
    if (!in) throw mfit::DomainError("cannot open '" + input_path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw mfit::SchemaError(std::string("calibrate input is not valid JSON: ") + e.what());
    }

    if (j.contains("equivalent_conductivity")) {
        const auto& e = j["equivalent_conductivity"];
        const double k = mfit::equivalent_conductivity(
            e.at("q_dot_w").get<double>(), e.at("length_m").get<double>(),
            e.at("area_m2").get<double>(), e.at("delta_t_k").get<double>());
        std::printf("k_w_mk=%.17g\n", k);
    }
    if (j.contains("composite")) {
        const auto& cj = j["composite"];
        mfit::CompositeLayerSpec spec;
        spec.thickness = cj.value("thickness_m", 0.0);
        spec.area = cj.value("area_m2", 0.0);
        for (const auto& c : cj.at("constituents")) {
            mfit::Material m;
            const auto& mj = c.at("material");
            m.name = mj.value("name", "");
            m.rho = mj.at("rho").get<double>();
            m.c_v = mj.at("c_v").get<double>();
            m.k_x = mj.value("k_x", 1.0);
            m.k_y = mj.value("k_y", 1.0);
            m.k_z = mj.value("k_z", 1.0);
            spec.constituents.push_back({c.at("volume_fraction").get<double>(), m});
        }
        const auto eq = mfit::weighted_average_capacitance(spec);
        std::printf("rho_eq_kg_m3=%.17g\n", eq.rho_eq);
        std::printf("c_v_eq_j_kgk=%.17g\n", eq.c_v_eq);
    }
    if (j.contains("heatsink")) {
        const auto& h = j["heatsink"];
        mfit::HeatsinkSpec spec;
        spec.h_avg = h.at("h_avg").get<double>();
        spec.area_total = h.at("area_total_m2").get<double>();
        spec.area_fin = h.value("area_fin_m2", 0.0);
        spec.fin_count = h.value("fin_count", 0);
        spec.fin_efficiency = h.value("fin_efficiency", 1.0);
        spec.base_length = h.at("base_length_m").get<double>();
        spec.base_width = h.at("base_width_m").get<double>();
        std::printf("h_eq_w_m2k=%.17g\n", mfit::heatsink_htc(spec));
    }
    return 0;
}

int cmd_synth_wl1(const std::string& package_path, const mfit::SynthSpec& spec,
                  const std::string& out_path) {
    Manifest mf("synth-wl1");
    mf.input("package", package_path);
    mf.config("stress_s", spec.stress_s);
    mf.config("prbs_s", spec.prbs_s);
    mf.config("cooldown_s", spec.cooldown_s);
    mf.config("dwell_s", spec.dwell_s);
    mf.config("max_power_w", spec.max_power_w);
    mf.config("seed", spec.seed);

    mf.phase("parse");
    const mfit::PackageSpec pkg = mfit::parse_package_file(package_path);
    std::vector<std::string> ids;
    for (const mfit::Layer& l : pkg.layers)
        for (const mfit::Block& b : l.blocks)
            for (const mfit::PowerBlock& pb : b.power_blocks) ids.push_back(pb.id);
    if (ids.empty()) throw mfit::DomainError("package has no power blocks");

    mf.phase("generate");
    const mfit::PowerTrace trace = mfit::synth_wl1(spec, ids);
    mf.phase("write");
    mfit::save_power_csv(trace, out_path);
    mf.note("change_rows", trace.segments());
    mf.write(out_path);
    return 0;
}

int cmd_simulate(const std::string& model_path, const std::string& power_path,
                 const mfit::SolverConfig& cfg, const std::string& out_trace,
                 const std::string& heatmap_layer, const std::vector<double>& heatmap_times) {
    Manifest mf("simulate");
    mf.input("model", model_path);
    mf.input("power", power_path);
    mf.config("rtol", cfg.rtol);
    mf.config("atol", cfg.atol);
    mf.config("output_dt", cfg.output_dt);

    mf.phase("load");
    const mfit::RCModel model = mfit::load_model(model_path);
    const mfit::PowerTrace trace = mfit::load_power_csv(power_path);
    mf.phase("solve");
    const mfit::TemperatureTrace result = mfit::simulate(model, trace, cfg);
    mf.phase("write");
    mfit::save_trace_csv(result, out_trace);

    if (!heatmap_layer.empty()) {
        const auto dir = std::filesystem::path(out_trace).parent_path();
        for (double t : heatmap_times) {
            const mfit::Heatmap map = mfit::layer_heatmap(result, model, heatmap_layer, t);
            const auto file = dir / (heatmap_layer + "_" + fmt_g(t) + ".csv");
            mfit::save_heatmap_csv(map, file.string());
        }
    }
    mf.note("samples", result.rows());
    mf.write(out_trace);
    return 0;
}

int cmd_steady(const std::string& model_path, double power_const, const std::string& out_path) {
    Manifest mf("steady");
    mf.input("model", model_path);
    mf.config("power_const_w", power_const);

    mf.phase("load");
    const mfit::RCModel model = mfit::load_model(model_path);
    mf.phase("solve");
    const Eigen::VectorXd temps = mfit::steady_state(model, model.inject_uniform(power_const));

    const double total_power = power_const * static_cast<double>(model.power_block_ids.size());
    mf.phase("write");
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        os = &file;
    }
    for (int i = 0; i < model.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", temps[i]);
        *os << model.nodes[i].id() << ' ' << buf << '\n';
    }
    *os << "total_power_w " << fmt_g(total_power) << '\n';
    mf.note("total_power_w", total_power);
    mf.note("max_temp_c", temps.maxCoeff());
    if (!out_path.empty()) mf.write(out_path);
    return 0;
}

int cmd_discretize(const std::string& model_path, double ts, const std::string& out_path) {
    Manifest mf("discretize");
    mf.input("model", model_path);
    mf.config("ts", ts);

    mf.phase("load");
    const mfit::RCModel model = mfit::load_model(model_path);
    mf.phase("discretize");
    mfit::DSSModel dss = mfit::discretize(model, ts);
    dss.model_fingerprint = mfit::file_fingerprint(model_path);
    mf.phase("write");
    mfit::save_dss(dss, out_path);
    mf.note("spectral_radius_estimate", mfit::spectral_radius_estimate(dss.A));
    mf.write(out_path);
    return 0;
}

int cmd_run_dss(const std::string& dss_path, const std::string& power_path,
                const std::string& out_trace, const std::string& model_path) {
    Manifest mf("run-dss");
    mf.input("dss", dss_path);
    mf.input("power", power_path);

    mf.phase("load");
    const mfit::DSSModel dss = mfit::load_dss(dss_path);
    if (!model_path.empty() && !dss.model_fingerprint.empty()) {
        const std::string fp = mfit::file_fingerprint(model_path);
        if (fp != dss.model_fingerprint)
            throw mfit::DomainError("DSS file was built from a different model (fingerprint " +
                                    dss.model_fingerprint + ", model file has " + fp + ")");
    }
    const mfit::PowerTrace trace = mfit::load_power_csv(power_path);
    mf.phase("step");
    const mfit::TemperatureTrace result = mfit::run_dss(dss, trace);
    mf.phase("write");
    mfit::save_trace_csv(result, out_trace);
    mf.note("samples", result.rows());
    mf.write(out_trace);
    return 0;
}

int cmd_compare(const std::string& ref_path, const std::string& cand_path, double threshold,
                double guard, const std::string& out_path, const std::string& model_path,
                bool all_nodes) {
    Manifest mf("compare");
    mf.input("ref", ref_path);
    mf.input("cand", cand_path);
    mf.config("threshold_c", threshold);
    mf.config("guard_k", guard);

    mf.phase("load");
    const mfit::TemperatureTrace ref = mfit::load_trace_csv(ref_path);
    const mfit::TemperatureTrace cand = mfit::load_trace_csv(cand_path);

    std::vector<std::string> chiplet_ids;
    const std::vector<std::string>* subset = nullptr;
    if (!model_path.empty() && !all_nodes) {
        const mfit::RCModel model = mfit::load_model(model_path);
        for (const mfit::NodeRecord& n : model.nodes)
            if (n.is_chiplet) chiplet_ids.push_back(n.id());
        subset = &chiplet_ids;
    }

    mf.phase("compare");
    const mfit::ComparisonReport rep = mfit::compare(ref, cand, threshold, guard, subset);

    mf.phase("write");
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        os = &file;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", rep.mae);
    *os << "mae_k " << buf << '\n';
    if (rep.violation_accuracy)
        *os << "violation_accuracy " << *rep.violation_accuracy << '\n';
    else
        *os << "violation_accuracy undefined\n";
    *os << "reference_violations " << rep.reference_violations << '\n';
    *os << "flagged_and_matched " << rep.flagged_and_matched << '\n';
    *os << "false_positives " << rep.false_positives << '\n';
    *os << "threshold_c " << rep.threshold_c << '\n';
    *os << "guard_k " << rep.guard_k << '\n';
    for (const auto& [id, mae] : rep.per_node_mae) *os << "node_mae " << id << ' ' << mae << '\n';
    if (!out_path.empty()) mf.write(out_path);
    return 0;
}

int cmd_heatmap(const std::string& model_path, const std::string& trace_path,
                const std::string& layer, const std::vector<double>& times,
                const std::string& out_dir) {
    Manifest mf("heatmap");
    mf.input("model", model_path);
    mf.input("trace", trace_path);
    mf.config("layer", layer);

    mf.phase("load");
    const mfit::RCModel model = mfit::load_model(model_path);
    const mfit::TemperatureTrace trace = mfit::load_trace_csv(trace_path);
    mf.phase("write");
    std::filesystem::create_directories(out_dir);
    std::string last;
    for (double t : times) {
        const mfit::Heatmap map = mfit::layer_heatmap(trace, model, layer, t);
        last = (std::filesystem::path(out_dir) / (layer + "_" + fmt_g(t) + ".csv")).string();
        mfit::save_heatmap_csv(map, last);
    }
    if (!last.empty()) mf.write(last);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-fidelity thermal models for 2.5D/3D chiplet packages"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("mfit ") + kToolVersion + " (model format " +
                                          std::to_string(kModelFormatVersion) + ", dss format " +
                                          std::to_string(kDssFormatVersion) + ")");

    // build
    auto* build = app.add_subcommand("build", "assemble a thermal RC model from a package file");
    std::string package_path, out_path;
    build->add_option("--package", package_path, "package document (JSON)")->required();
    build->add_option("--out", out_path, "output model file")->required();

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "abstraction arithmetic for composite layers and heatsinks");
    std::string calib_input;
    calibrate->add_option("--input", calib_input, "calibration request (JSON)")->required();

    // synth-wl1
    auto* synth = app.add_subcommand("synth-wl1", "generate the stress/PRBS/cooldown synthetic workload");
    std::string synth_package, synth_out;
    mfit::SynthSpec synth_spec;
    synth->add_option("--package", synth_package)->required();
    synth->add_option("--stress", synth_spec.stress_s, "stress phase duration, s");
    synth->add_option("--prbs", synth_spec.prbs_s, "PRBS phase duration, s");
    synth->add_option("--cooldown", synth_spec.cooldown_s, "cooldown duration, s");
    synth->add_option("--dwell", synth_spec.dwell_s, "PRBS bit period, s");
    synth->add_option("--max-power", synth_spec.max_power_w, "per-chiplet max power, W");
    synth->add_option("--seed", synth_spec.seed);
    synth->add_option("--out", synth_out)->required();

    // simulate
    auto* simulate = app.add_subcommand("simulate", "transient RC solve over a power trace");
    std::string sim_model, sim_power, sim_out, sim_hm_layer;
    std::vector<double> sim_hm_times;
    mfit::SolverConfig sim_cfg;
    simulate->add_option("--model", sim_model)->required();
    simulate->add_option("--power", sim_power)->required();
    simulate->add_option("--rtol", sim_cfg.rtol);
    simulate->add_option("--atol", sim_cfg.atol);
    simulate->add_option("--output-dt", sim_cfg.output_dt);
    simulate->add_option("--out-trace", sim_out)->required();
    simulate->add_option("--heatmap-layer", sim_hm_layer);
    simulate->add_option("--heatmap-times", sim_hm_times)->delimiter(',');

    // steady
    auto* steady = app.add_subcommand("steady", "steady-state solve at constant power");
    std::string steady_model, steady_out;
    double steady_power = 0.0;
    steady->add_option("--model", steady_model)->required();
    steady->add_option("--power-const", steady_power, "watts applied to every power block")->required();
    steady->add_option("--out", steady_out, "write temperatures here instead of stdout");

    // discretize
    auto* discretize = app.add_subcommand("discretize", "zero-order-hold discretization of an RC model");
    std::string disc_model, disc_out;
    double disc_ts = 0.01;
    discretize->add_option("--model", disc_model)->required();
    discretize->add_option("--ts", disc_ts, "sampling period, s");
    discretize->add_option("--out", disc_out)->required();

    // run-dss
    auto* rundss = app.add_subcommand("run-dss", "step a discrete state-space model over a power trace");
    std::string rd_dss, rd_power, rd_out, rd_model;
    rundss->add_option("--dss", rd_dss)->required();
    rundss->add_option("--power", rd_power)->required();
    rundss->add_option("--out-trace", rd_out)->required();
    rundss->add_option("--model", rd_model, "verify the DSS fingerprint against this model file");

    // compare
    auto* compare = app.add_subcommand("compare", "score a trace against a reference");
    std::string cmp_ref, cmp_cand, cmp_out, cmp_model;
    double cmp_threshold = 85.0, cmp_guard = 1.0;
    bool cmp_all = false;
    compare->add_option("--ref", cmp_ref)->required();
    compare->add_option("--cand", cmp_cand)->required();
    compare->add_option("--threshold", cmp_threshold, "violation threshold, deg C");
    compare->add_option("--guard", cmp_guard, "conservative guard band, K");
    compare->add_option("--out", cmp_out, "report file (default stdout)");
    compare->add_option("--model", cmp_model, "restrict to this model's chiplet nodes");
    compare->add_flag("--all-nodes", cmp_all, "compare over all common nodes");

    // heatmap
    auto* heatmap = app.add_subcommand("heatmap", "per-layer temperature grids from a trace");
    std::string hm_model, hm_trace, hm_layer, hm_dir = ".";
    std::vector<double> hm_times;
    heatmap->add_option("--model", hm_model)->required();
    heatmap->add_option("--trace", hm_trace)->required();
    heatmap->add_option("--layer", hm_layer)->required();
    heatmap->add_option("--times", hm_times)->delimiter(',')->required();
    heatmap->add_option("--out-dir", hm_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (build->parsed()) return cmd_build(package_path, out_path);
        if (calibrate->parsed()) return cmd_calibrate(calib_input);
        if (synth->parsed()) return cmd_synth_wl1(synth_package, synth_spec, synth_out);
        if (simulate->parsed())
            return cmd_simulate(sim_model, sim_power, sim_cfg, sim_out, sim_hm_layer, sim_hm_times);
        if (steady->parsed()) return cmd_steady(steady_model, steady_power, steady_out);
        if (discretize->parsed()) return cmd_discretize(disc_model, disc_ts, disc_out);
        if (rundss->parsed()) return cmd_run_dss(rd_dss, rd_power, rd_out, rd_model);
        if (compare->parsed())
            return cmd_compare(cmp_ref, cmp_cand, cmp_threshold, cmp_guard, cmp_out, cmp_model, cmp_all);
        if (heatmap->parsed()) return cmd_heatmap(hm_model, hm_trace, hm_layer, hm_times, hm_dir);
    } catch (const mfit::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
