#include <benchmark/benchmark.h>

#include <map>

#include "mfit/dss.hpp"
#include "mfit/package.hpp"
#include "mfit/rc_model.hpp"
#include "mfit/transient.hpp"
#include "mfit/workload.hpp"

namespace {

const char* config_for(int chiplets) {
    switch (chiplets) {
        case 16: return MFIT_CONFIG_DIR "/chiplet16_2p5d.json";
        case 36: return MFIT_CONFIG_DIR "/chiplet36_2p5d.json";
        case 64: return MFIT_CONFIG_DIR "/chiplet64_2p5d.json";
        default: return MFIT_CONFIG_DIR "/chiplet16x3_3d.json";
    }
}

const mfit::RCModel& cached_model(int chiplets) {
    static std::map<int, mfit::RCModel> cache;
    auto it = cache.find(chiplets);
    if (it == cache.end())
        it = cache.emplace(chiplets, mfit::build_rc(mfit::parse_package_file(config_for(chiplets))))
                 .first;
    return it->second;
}

void BM_BuildRC(benchmark::State& state) {
    const mfit::PackageSpec spec =
        mfit::parse_package_file(config_for(static_cast<int>(state.range(0))));
    for (auto _ : state) {
        mfit::RCModel m = mfit::build_rc(spec);
        benchmark::DoNotOptimize(m.G);
    }
}
BENCHMARK(BM_BuildRC)->Arg(16)->Arg(36)->Arg(64);

void BM_SteadyState(benchmark::State& state) {
    const mfit::RCModel& m = cached_model(static_cast<int>(state.range(0)));
    const Eigen::VectorXd q = m.inject_uniform(3.0);
    for (auto _ : state) {
        Eigen::VectorXd t = mfit::steady_state(m, q);
        benchmark::DoNotOptimize(t);
    }
}
BENCHMARK(BM_SteadyState)->Arg(16)->Arg(36)->Arg(64);

void BM_Discretize(benchmark::State& state) {
    const mfit::RCModel& m = cached_model(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        mfit::DSSModel dss = mfit::discretize(m, 0.01);
        benchmark::DoNotOptimize(dss.A);
    }
}
BENCHMARK(BM_Discretize)->Arg(16)->Arg(36)->Arg(64);

void BM_DssStep(benchmark::State& state) {
    const mfit::RCModel& m = cached_model(static_cast<int>(state.range(0)));
    const mfit::DSSModel dss = mfit::discretize(m, 0.01);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dss.size());
    const Eigen::VectorXd watts =
        Eigen::VectorXd::Constant(static_cast<int>(dss.power_block_ids.size()), 3.0);
    for (auto _ : state) {
        x = mfit::step(dss, x, watts);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_DssStep)->Arg(16)->Arg(36)->Arg(64);

void BM_Simulate1s(benchmark::State& state) {
    const mfit::RCModel& m = cached_model(static_cast<int>(state.range(0)));
    mfit::SynthSpec synth;
    synth.stress_s = 0.2;
    synth.prbs_s = 0.6;
    synth.cooldown_s = 0.2;
    const mfit::PowerTrace pt = mfit::synth_wl1(synth, m.power_block_ids);
    mfit::SolverConfig cfg;
    for (auto _ : state) {
        mfit::TemperatureTrace tr = mfit::simulate(m, pt, cfg);
        benchmark::DoNotOptimize(tr.values);
    }
}
BENCHMARK(BM_Simulate1s)->Arg(16)->Arg(36)->Arg(64)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
