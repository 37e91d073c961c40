#include "chattersim/bench.hpp"

#include "chattersim/engine.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace chattersim;

TEST_SUITE_BEGIN("bench");

namespace {

ExperimentGrid tiny_grid() {
    ExperimentGrid grid;
    grid.protocols = {{Protocol::Chatterbox, 0}};
    grid.rtts = {400};
    grid.channels = {{0.9, 0.5}};
    grid.n_sessions = 2;
    grid.base.session_len_ms = 5000;
    return grid;
}

AggregateRow synthetic_row(const std::string& protocol, double stall, double redundancy,
                           double late) {
    AggregateRow row;
    row.protocol = protocol;
    row.rtt_ms = 400;
    row.stay_good = 0.9;
    row.stay_lossy = 0.5;
    row.n = 30;
    row.stall_ratio.mean = stall;
    row.redundancy.mean = redundancy;
    row.late_fraction.mean = late;
    return row;
}

} // namespace

TEST_CASE("a single-cell grid yields one row") {
    auto rows = run_experiment(tiny_grid());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].protocol == "chatterbox");
    CHECK(rows[0].rtt_ms == 400);
    CHECK(rows[0].n == 2);
}

TEST_CASE("grid rows cover the protocol by rtt layout") {
    ExperimentGrid grid = tiny_grid();
    grid.protocols = default_protocols();
    grid.rtts = {100, 400};
    grid.n_sessions = 1;
    auto rows = run_experiment(grid);
    CHECK(rows.size() == 12); // 6 protocols x 2 rtts x 1 channel
    CHECK(rows[0].protocol == "chatterbox");
    CHECK(rows[5].protocol == "dup5");
    CHECK(rows[0].rtt_ms == 100);
    CHECK(rows[6].rtt_ms == 400);
}

TEST_CASE("rerunning a grid reproduces identical csv bytes") {
    const auto a = write_bench_csv(run_experiment(tiny_grid()));
    const auto b = write_bench_csv(run_experiment(tiny_grid()));
    CHECK(a == b);
    CHECK(a.rfind("protocol,rtt_ms,p,q,n,stall_ratio_mean,stall_ratio_std,", 0) == 0);
}

TEST_CASE("aggregate means match independently recomputed session metrics") {
    ExperimentGrid grid = tiny_grid();
    grid.n_sessions = 4;
    auto rows = run_experiment(grid);
    REQUIRE(rows.size() == 1);

    SessionConfig cfg = grid.base;
    cfg.protocol = Protocol::Chatterbox;
    cfg.rtt_ms = 400;
    const auto seed0 = cell_seed(grid.base_seed, grid.protocols[0], 400, 0.9, 0.5);
    double sum = 0.0;
    for (const auto& result : run_sessions(cfg, grid.n_sessions, seed0)) {
        sum += compute_report(result).stall_ratio;
    }
    CHECK(rows[0].stall_ratio.mean == doctest::Approx(sum / grid.n_sessions).epsilon(1e-12));
}

TEST_CASE("cell seeds depend only on the cell identity") {
    ProtocolChoice cb{Protocol::Chatterbox, 0};
    ProtocolChoice tcp{Protocol::TcpLike, 0};
    CHECK(cell_seed(1, cb, 400, 0.9, 0.5) == cell_seed(1, cb, 400, 0.9, 0.5));
    CHECK(cell_seed(1, cb, 400, 0.9, 0.5) != cell_seed(1, tcp, 400, 0.9, 0.5));
    CHECK(cell_seed(1, cb, 400, 0.9, 0.5) != cell_seed(1, cb, 100, 0.9, 0.5));
    CHECK(cell_seed(1, cb, 400, 0.9, 0.5) != cell_seed(2, cb, 400, 0.9, 0.5));
}

TEST_CASE("compare reproduces the headline reduction arithmetic") {
    std::vector<AggregateRow> rows{
        synthetic_row("tcp", 0.20, 0.0, 0.40),
        synthetic_row("chatterbox", 0.058, 0.35, 0.05),
    };
    auto reductions = compare(rows, "tcp");
    REQUIRE(reductions.size() == 2);
    CHECK(reductions[0].stall_reduction_pct == doctest::Approx(0.0));
    CHECK(reductions[1].stall_reduction_pct == doctest::Approx(71.0));
    CHECK(reductions[1].late_reduction_pct == doctest::Approx(87.5));
    // baseline redundancy of zero: reduction undefined
    CHECK_FALSE(reductions[1].redundancy_reduction_pct.has_value());
}

TEST_CASE("compare requires the baseline in every cell") {
    std::vector<AggregateRow> rows{synthetic_row("chatterbox", 0.1, 0.3, 0.1)};
    CHECK_THROWS_WITH(compare(rows, "tcp"), doctest::Contains("baseline"));
}

TEST_CASE("empty grid axes are rejected") {
    ExperimentGrid grid = tiny_grid();
    grid.rtts.clear();
    CHECK_THROWS_AS(run_experiment(grid), std::invalid_argument);
}

TEST_SUITE_END();
