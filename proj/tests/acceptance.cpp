// Acceptance gate: one line per criterion, non-zero exit iff any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfit/dss.hpp"
#include "mfit/metrics.hpp"
#include "mfit/package.hpp"
#include "mfit/rc_model.hpp"
#include "mfit/transient.hpp"
#include "mfit/workload.hpp"
#include "support/dense_oracle.hpp"
#include "support/fixtures.hpp"
#include "support/random_spec.hpp"

using namespace mfit;
using namespace mfit::testing;

namespace {

#ifndef MFIT_CONFIG_DIR
#error "MFIT_CONFIG_DIR must point at the bundled package descriptions"
#endif

const char* kConfigs[] = {"chiplet16_2p5d.json", "chiplet36_2p5d.json", "chiplet64_2p5d.json",
                          "chiplet16x3_3d.json"};

std::string config_path(const char* name) {
    return std::string(MFIT_CONFIG_DIR) + "/" + name;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Failure {
    std::string detail;
};

void require(bool ok, const std::string& detail) {
    if (!ok) throw Failure{detail};
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

double max_trace_diff(const TemperatureTrace& a, const TemperatureTrace& b) {
    double worst = 0.0;
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c)
            worst = std::max(worst, std::abs(a.values(r, c) - b.values(r, c)));
    return worst;
}

// 1. RC/DSS equivalence on the 16-chiplet example, 10 s PRBS at Ts = 0.01 s.
void criterion_rc_dss_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    const RCModel m = build_rc(parse_package_file(config_path("chiplet16_2p5d.json")));

    SynthSpec synth;
    synth.stress_s = 2.0;
    synth.prbs_s = 6.0;
    synth.cooldown_s = 2.0; // 10 s total
    const PowerTrace pt = synth_wl1(synth, m.power_block_ids);

    const double ts = 0.01;
    const DSSModel dss = discretize(m, ts);
    const TemperatureTrace dss_tr = run_dss(dss, pt);

    SolverConfig cfg;
    cfg.rtol = 1e-8;
    cfg.atol = 1e-10;
    cfg.output_dt = ts;
    const TemperatureTrace rc_tr = simulate(m, pt, cfg);

    require(rc_tr.rows() == dss_tr.rows() && rc_tr.node_ids == dss_tr.node_ids,
            "trace shapes differ");
    const double worst = max_trace_diff(rc_tr, dss_tr);
    require(worst <= 0.05, "max |RC - DSS| = " + num(worst) + " K > 0.05 K");
    const double elapsed = seconds_since(t0);
    require(elapsed < 120.0, "took " + num(elapsed) + " s, budget 120 s");
}

// 2. Single-node step response against the closed form.
void criterion_scalar_closed_form() {
    const auto t0 = std::chrono::steady_clock::now();
    const double g = 0.1, c = 1.0, q = 1.0;
    const RCModel m = scalar_model(g, c);
    PowerTrace pt;
    pt.power_block_ids = {"q0"};
    pt.change_times = {0.0};
    pt.values = {{q}};
    pt.end_time = 30.0;
    SolverConfig cfg;
    cfg.output_dt = 0.05;
    const TemperatureTrace tr = simulate(m, pt, cfg);
    double worst = 0.0;
    for (int r = 0; r < tr.rows(); ++r) {
        const double exact = m.ambient_c + (q / g) * (1.0 - std::exp(-g * tr.times[r] / c));
        worst = std::max(worst, std::abs(tr.values(r, 0) - exact));
    }
    require(worst <= 1e-4, "max closed-form error = " + num(worst) + " K > 1e-4 K");
    const double elapsed = seconds_since(t0);
    require(elapsed < 1.0, "took " + num(elapsed) + " s, budget 1 s");
}

// 3. Energy balance on every bundled example; 48 W exact on the 16-chiplet one.
void criterion_energy_balance() {
    for (const char* name : kConfigs) {
        const PackageSpec spec = parse_package_file(config_path(name));
        const RCModel m = build_rc(spec);
        const std::string label = std::string(name) + ": ";

        const double watts = std::string(name).find("3d") != std::string::npos ? 1.2 : 3.0;
        const Eigen::VectorXd q = m.inject_uniform(watts);
        const double p_in = q.sum();
        const Eigen::VectorXd t = steady_state(m, q);
        const double p_out =
            m.gconv.dot(t - Eigen::VectorXd::Constant(m.size(), m.ambient_c));
        const double rel = std::abs(p_in - p_out) / p_in;
        require(rel <= 1e-6, label + "|P_in - P_out|/P_in = " + num(rel) + " > 1e-6");

        if (std::string(name) == "chiplet16_2p5d.json") {
            const double reported = watts * static_cast<double>(m.power_block_ids.size());
            require(reported == 48.0,
                    label + "P_in = " + num(reported) + " W, expected exactly 48 W");
        }
    }
}

// 4. 100 randomized <= 50-node specs against the dense assembly.
void criterion_dense_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (uint64_t seed = 1; seed <= 100; ++seed) {
        const PackageSpec spec = random_spec(seed);
        require(validate_package(spec).empty(), "random spec " + num(seed) + " invalid");
        const RCModel m = build_rc(spec);
        require(m.size() <= 50, "random spec " + num(seed) + " exceeds 50 nodes");
        worst = std::max(worst, dense_compare(m, dense_assemble(spec)));
    }
    require(worst <= 1e-12, "worst relative mismatch = " + num(worst) + " > 1e-12");
    const double elapsed = seconds_since(t0);
    require(elapsed < 30.0, "took " + num(elapsed) + " s, budget 30 s");
}

// 5. Matrix structure invariants across all bundled examples.
void criterion_matrix_structure() {
    for (const char* name : kConfigs) {
        const PackageSpec spec = parse_package_file(config_path(name));
        const RCModel m = build_rc(spec);
        const std::string label = std::string(name) + ": ";
        const int n = m.size();

        for (int k = 0; k < m.G.outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(m.G, k); it; ++it) {
                require(m.G.coeff(it.col(), it.row()) == it.value(), label + "G not symmetric");
                if (it.row() == it.col())
                    require(it.value() < 0, label + "non-negative diagonal entry");
                else
                    require(it.value() > 0, label + "non-positive coupling");
            }
        }

        const Eigen::VectorXd row_sums = m.G * Eigen::VectorXd::Ones(n);
        for (int i = 0; i < n; ++i) {
            const double scale = std::max(1.0, std::abs(m.G.coeff(i, i)));
            require(std::abs(row_sums[i] + m.gconv[i]) <= 1e-12 * scale,
                    label + "row sum != -G_conv at node " + m.nodes[i].id());
        }

        for (size_t p = 0; p < m.power_map.size(); ++p) {
            double sum = 0.0;
            for (const auto& [node, w] : m.power_map[p]) sum += w;
            require(std::abs(sum - 1.0) <= 1e-9,
                    label + "power partition of " + m.power_block_ids[p] + " sums to " + num(sum));
        }

        // overlap partition: the vertical interface of every node covers the
        // same fraction of its footprint as the regions declared above it
        std::map<std::string, int> layer_pos;
        for (size_t li = 0; li < spec.layers.size(); ++li) layer_pos[spec.layers[li].name] = (int)li;
        for (const NodeRecord& a : m.nodes) {
            const int li = layer_pos.at(a.layer);
            if (li + 1 >= static_cast<int>(spec.layers.size())) continue;
            const Layer& up = spec.layers[li + 1];

            double from_nodes = 0.0;
            for (const NodeRecord& b : m.nodes) {
                if (layer_pos.at(b.layer) != li + 1) continue;
                const double ox = std::min(a.cx + 0.5 * a.lx, b.cx + 0.5 * b.lx) -
                                  std::max(a.cx - 0.5 * a.lx, b.cx - 0.5 * b.lx);
                const double oy = std::min(a.cy + 0.5 * a.ly, b.cy + 0.5 * b.ly) -
                                  std::max(a.cy - 0.5 * a.ly, b.cy - 0.5 * b.ly);
                if (ox > 0 && oy > 0) from_nodes += ox * oy;
            }

            double from_spec = 0.0;
            if (!up.material.empty()) {
                from_spec = a.lx * a.ly; // full default region above
            } else {
                for (const Block& b : up.blocks) {
                    const double ox = std::min(a.cx + 0.5 * a.lx, b.origin_x + b.width) -
                                      std::max(a.cx - 0.5 * a.lx, b.origin_x);
                    const double oy = std::min(a.cy + 0.5 * a.ly, b.origin_y + b.height) -
                                      std::max(a.cy - 0.5 * a.ly, b.origin_y);
                    if (ox > 0 && oy > 0) from_spec += ox * oy;
                }
            }
            require(std::abs(from_nodes - from_spec) <= 1e-9 * (a.lx * a.ly),
                    label + "overlap partition broken at node " + a.id());
        }
    }
}

// 6. DSS algebra: semigroup, fixed point, spectral radius.
void criterion_dss_algebra() {
    const RCModel m = build_rc(small_chiplet_spec());
    require(m.size() <= 100, "fixture grew past 100 nodes");

    const DSSModel full = discretize(m, 0.01);
    const DSSModel half = discretize(m, 0.005);
    const Eigen::MatrixXd squared = half.A * half.A;
    const double scale =
        std::max(full.A.cwiseAbs().maxCoeff(), squared.cwiseAbs().maxCoeff());
    const double semi = (full.A - squared).cwiseAbs().maxCoeff() / scale;
    require(semi <= 1e-9, "semigroup defect = " + num(semi) + " > 1e-9");

    const Eigen::VectorXd q = m.inject_uniform(1.2);
    const Eigen::VectorXd watts =
        Eigen::VectorXd::Constant(static_cast<int>(m.power_block_ids.size()), 1.2);
    const Eigen::MatrixXd lhs =
        Eigen::MatrixXd::Identity(full.size(), full.size()) - full.A;
    const Eigen::VectorXd fixed =
        Eigen::PartialPivLU<Eigen::MatrixXd>(lhs).solve(full.B * watts);
    const Eigen::VectorXd ss = steady_state(m, q);
    double worst = 0.0;
    for (int i = 0; i < m.size(); ++i)
        worst = std::max(worst, std::abs(m.ambient_c + fixed[i] - ss[i]));
    require(worst <= 1e-6, "fixed-point error = " + num(worst) + " K > 1e-6 K");

    const double rho = spectral_radius_estimate(full.A);
    require(rho < 1.0, "spectral radius estimate = " + num(rho) + " >= 1");
}

// 7. Metrics fixtures and the guard-monotonicity property.
void criterion_metrics() {
    auto make_trace = [](std::vector<double> times, std::vector<std::vector<double>> rows) {
        TemperatureTrace t;
        t.times = std::move(times);
        t.node_ids = {"n"};
        t.values.resize(static_cast<int>(rows.size()), 1);
        for (size_t r = 0; r < rows.size(); ++r) t.values(static_cast<int>(r), 0) = rows[r][0];
        return t;
    };

    const auto mae_ref = make_trace({0, 1, 2}, {{1}, {2}, {3}});
    const auto mae_cand = make_trace({0, 1, 2}, {{1}, {2}, {4}});
    const ComparisonReport r1 = compare(mae_ref, mae_cand, 85.0, 1.0);
    require(r1.mae == 1.0 / 3.0, "MAE fixture produced " + num(r1.mae));

    const auto va_ref = make_trace({0, 1, 2, 3}, {{86}, {90}, {87}, {50}});
    const auto va_cand = make_trace({0, 1, 2, 3}, {{85}, {84}, {80}, {50}});
    const ComparisonReport r2 = compare(va_ref, va_cand, 85.0, 1.0);
    require(r2.violation_accuracy.has_value() && *r2.violation_accuracy == 2.0 / 3.0,
            "violation-accuracy fixture produced " +
                (r2.violation_accuracy ? num(*r2.violation_accuracy) : std::string("none")));

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(70.0, 100.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> times;
        std::vector<std::vector<double>> ra, rb;
        for (int k = 0; k < 40; ++k) {
            times.push_back(k);
            ra.push_back({u(rng)});
            rb.push_back({u(rng)});
        }
        const auto ref = make_trace(times, ra);
        const auto cand = make_trace(times, rb);
        double prev = -1.0;
        for (double guard = 0.0; guard <= 10.0; guard += 1.0) {
            const ComparisonReport r = compare(ref, cand, 85.0, guard);
            require(r.violation_accuracy.has_value(), "randomized fixture lost its violations");
            require(*r.violation_accuracy >= prev, "guard monotonicity broken");
            prev = *r.violation_accuracy;
        }
    }
}

// 8. Order-of-magnitude performance gates on the 16-chiplet example.
void criterion_performance() {
    const RCModel m = build_rc(parse_package_file(config_path("chiplet16_2p5d.json")));
    const PowerTrace pt = synth_wl1(SynthSpec{}, m.power_block_ids); // 55 s
    const DSSModel dss = discretize(m, 0.01);

    const auto t0 = std::chrono::steady_clock::now();
    const TemperatureTrace dss_tr = run_dss(dss, pt);
    const double dss_s = seconds_since(t0);
    require(dss_tr.rows() == 5501, "expected 5501 DSS samples, got " + num(dss_tr.rows()));
    require(dss_s < 1.0, "run-dss took " + num(dss_s) + " s, budget 1 s");

    const auto t1 = std::chrono::steady_clock::now();
    SolverConfig cfg;
    const TemperatureTrace rc_tr = simulate(m, pt, cfg);
    const double rc_s = seconds_since(t1);
    require(rc_tr.rows() == 5501, "expected 5501 RC samples, got " + num(rc_tr.rows()));
    require(rc_s < 300.0, "simulate took " + num(rc_s) + " s, budget 300 s");
}

// 9. Physical behavior: monotonicity, symmetry, bitwise ambient at zero power.
void criterion_physical_behavior() {
    const RCModel m = build_rc(parse_package_file(config_path("chiplet16_2p5d.json")));

    const Eigen::VectorXd lo = steady_state(m, m.inject_uniform(1.0));
    const Eigen::VectorXd hi = steady_state(m, m.inject_uniform(2.0));
    for (int i = 0; i < m.size(); ++i)
        require(hi[i] >= lo[i], "monotonicity broken at node " + m.nodes[i].id());
    double rise = 0.0;
    for (const NodeRecord& n : m.nodes)
        if (n.is_chiplet) rise = std::max(rise, hi[n.index] - lo[n.index]);
    require(rise > 0.1, "doubling power barely moved the chiplets");

    // mirror symmetry of the uniform-power field about the x midline
    const Eigen::VectorXd t = steady_state(m, m.inject_uniform(3.0));
    const double w = 15.5e-3;
    double asym = 0.0;
    for (const NodeRecord& n : m.nodes) {
        const int mirror = node_lookup(m, n.layer, w - n.cx, n.cy);
        asym = std::max(asym, std::abs(t[n.index] - t[mirror]));
    }
    require(asym <= 1e-6, "field asymmetry = " + num(asym) + " K > 1e-6 K");

    PowerTrace zero;
    zero.power_block_ids = m.power_block_ids;
    zero.change_times = {0.0};
    zero.values = {std::vector<double>(m.power_block_ids.size(), 0.0)};
    zero.end_time = 1.0;
    SolverConfig cfg;
    cfg.output_dt = 0.1;
    const TemperatureTrace tr = simulate(m, zero, cfg);
    for (int r = 0; r < tr.rows(); ++r)
        for (int c = 0; c < tr.cols(); ++c)
            require(tr.values(r, c) == m.ambient_c, "zero-power trace left ambient");
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void()> run;
    };
    const std::vector<Criterion> criteria = {
        {"RC/DSS equivalence (16-chiplet, 10 s PRBS, <= 0.05 K)", criterion_rc_dss_equivalence},
        {"scalar closed-form step response (<= 1e-4 K)", criterion_scalar_closed_form},
        {"steady-state energy balance (<= 1e-6 rel, 48 W exact)", criterion_energy_balance},
        {"dense-oracle assembly (100 random specs, <= 1e-12 rel)", criterion_dense_oracle},
        {"matrix structure invariants (all bundled examples)", criterion_matrix_structure},
        {"DSS algebra (semigroup, fixed point, spectral radius)", criterion_dss_algebra},
        {"metrics fixtures and guard monotonicity", criterion_metrics},
        {"performance sanity (run-dss < 1 s, simulate < 5 min)", criterion_performance},
        {"physical behavior (monotonic, symmetric, ambient)", criterion_physical_behavior},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        std::string detail;
        try {
            criteria[i].run();
        } catch (const Failure& f) {
            detail = f.detail;
        } catch (const std::exception& e) {
            detail = std::string("unexpected exception: ") + e.what();
        }
        if (detail.empty()) {
            std::printf("[PASS] %zu. %s\n", i + 1, criteria[i].name);
        } else {
            std::printf("[FAIL] %zu. %s: %s\n", i + 1, criteria[i].name, detail.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    return failures;
}
