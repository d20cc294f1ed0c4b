#include <benchmark/benchmark.h>

#include "rplsim/defense.hpp"
#include "rplsim/events.hpp"
#include "rplsim/scenario.hpp"
#include "rplsim/simulator.hpp"

namespace {

void BM_LiMsdDecision(benchmark::State& state) {
    const int children = static_cast<int>(state.range(0));
    rplsim::DefenseConfig cfg;
    cfg.mode = rplsim::DefenseMode::LiMsd;
    cfg.node_max = children + 1;
    rplsim::LiMsdDefense d(0, cfg);
    // warm table: one entry per child
    for (int c = 1; c <= children; ++c)
        d.on_dao(c, rplsim::GlobalPrefix{c}, 0.0);
    int child = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            d.on_dao(child, rplsim::GlobalPrefix{child}, 1.0));
        if (++child > children) child = 1;
    }
}
BENCHMARK(BM_LiMsdDecision)->Arg(4)->Arg(16)->Arg(32);

void BM_LiMsdBlacklisted(benchmark::State& state) {
    rplsim::DefenseConfig cfg;
    cfg.mode = rplsim::DefenseMode::LiMsd;
    cfg.activate_at = 0.0;
    rplsim::LiMsdDefense d(0, cfg);
    for (int i = 0; i <= cfg.beta; ++i)
        d.on_dao(1, rplsim::GlobalPrefix{1}, 200.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(d.on_dao(1, rplsim::GlobalPrefix{1}, 201.0));
}
BENCHMARK(BM_LiMsdBlacklisted);

void BM_EventQueue(benchmark::State& state) {
    const int batch = static_cast<int>(state.range(0));
    rplsim::EventQueue q;
    double t = 0.0;
    for (auto _ : state) {
        for (int i = 0; i < batch; ++i)
            q.schedule(t, t + (i * 37 % 101) * 0.01, rplsim::EventKind::DataGeneration, 0);
        for (int i = 0; i < batch; ++i) benchmark::DoNotOptimize(q.pop());
    }
    state.SetItemsProcessed(state.iterations() * batch * 2);
}
BENCHMARK(BM_EventQueue)->Arg(64)->Arg(1024);

void BM_StaticRun(benchmark::State& state) {
    rplsim::Scenario s;
    s.duration = 300.0;
    s.defense.mode = rplsim::DefenseMode::LiMsd;
    for (auto _ : state) {
        rplsim::Simulator sim(s, 7);
        benchmark::DoNotOptimize(sim.run());
    }
}
BENCHMARK(BM_StaticRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
