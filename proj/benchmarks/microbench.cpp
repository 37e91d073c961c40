#include "chattersim/channel.hpp"
#include "chattersim/engine.hpp"
#include "chattersim/metrics.hpp"
#include "chattersim/traceio.hpp"

#include <benchmark/benchmark.h>

using namespace chattersim;

namespace {

SessionConfig default_session(Protocol protocol) {
    SessionConfig cfg;
    cfg.protocol = protocol;
    cfg.seed = 1;
    return cfg;
}

void BM_RunSessionChatterbox(benchmark::State& state) {
    const SessionConfig cfg = default_session(Protocol::Chatterbox);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_session(cfg));
    }
}
BENCHMARK(BM_RunSessionChatterbox);

void BM_RunSessionTcp(benchmark::State& state) {
    const SessionConfig cfg = default_session(Protocol::TcpLike);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_session(cfg));
    }
}
BENCHMARK(BM_RunSessionTcp);

void BM_RunSessionDup(benchmark::State& state) {
    SessionConfig cfg = default_session(Protocol::Duplication);
    cfg.dup_factor = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_session(cfg));
    }
}
BENCHMARK(BM_RunSessionDup)->Arg(2)->Arg(5);

void BM_MarkovTransmit(benchmark::State& state) {
    MarkovChannel channel(MarkovParams{}, 200);
    Rng rng(7);
    Packet p;
    SimTime now = 0;
    for (auto _ : state) {
        now += 100;
        benchmark::DoNotOptimize(channel.transmit(p, now, rng));
    }
}
BENCHMARK(BM_MarkovTransmit);

void BM_ComputeMetrics(benchmark::State& state) {
    const SessionResult result = run_session(default_session(Protocol::Chatterbox));
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_report(result));
    }
}
BENCHMARK(BM_ComputeMetrics);

void BM_SynthesizeTrace(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(synthesize_trace(MarkovParams{}, 10000, 3));
    }
}
BENCHMARK(BM_SynthesizeTrace);

} // namespace

BENCHMARK_MAIN();
