#include "chattersim/metrics.hpp"

#include "chattersim/engine.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace chattersim;

TEST_SUITE_BEGIN("metrics");

namespace {

SessionConfig lossless(Protocol protocol) {
    SessionConfig cfg;
    cfg.protocol = protocol;
    cfg.markov.stay_good = 1.0;
    return cfg;
}

std::vector<SimTime> uniform_timeline(int n, SimTime gap) {
    std::vector<SimTime> t;
    for (int i = 0; i < n; ++i) {
        t.push_back(i * gap);
    }
    return t;
}

} // namespace

TEST_CASE("uniform renders have zero stall") {
    CHECK(stall_ratio(uniform_timeline(100, 100)) == 0.0);
}

TEST_CASE("stall ratio counts full gaps above the threshold over the render span") {
    const std::vector<SimTime> t{0, 100, 200, 5000, 5100};
    CHECK(stall_ratio(t) == doctest::Approx(4800.0 / 5100.0));
}

TEST_CASE("a gap exactly at the threshold is not a stall") {
    CHECK(stall_ratio(uniform_timeline(10, 200)) == 0.0);
}

TEST_CASE("stall ratio needs two rendered tokens") {
    CHECK_THROWS_WITH(stall_ratio({0}), doctest::Contains("undefined stall ratio"));
}

TEST_CASE("stall ratio variants: excess-only and session denominator") {
    const std::vector<SimTime> t{0, 100, 200, 5000, 5100};
    MetricsOptions excess;
    excess.stall_excess_only = true;
    CHECK(stall_ratio(t, 200, excess) == doctest::Approx(4600.0 / 5100.0));

    MetricsOptions session;
    session.denominator = StallDenominator::Session;
    const std::vector<SimTime> shifted{1000, 1100, 6000, 6100};
    // span denominator: 6100-1000, session denominator: 6100-0
    CHECK(stall_ratio(shifted, 200, session) == doctest::Approx(4900.0 / 6100.0));
    CHECK(stall_ratio(shifted) == doctest::Approx(4900.0 / 5100.0));
}

TEST_CASE("adding a render between two others never increases stall time") {
    // stall-time numerators, compared on the same span
    const std::vector<SimTime> base{0, 1000};
    const double before = stall_ratio(base) * 1000.0;
    for (SimTime mid = 100; mid < 1000; mid += 100) {
        const std::vector<SimTime> denser{0, mid, 1000};
        CHECK(stall_ratio(denser) * 1000.0 <= before);
    }
}

TEST_CASE("redundancy is zero for a lossless single-packet-per-token baseline") {
    auto result = run_session(lossless(Protocol::TcpLike));
    CHECK(redundancy_rate(result.packet_log, 300, 60, 8) == 0.0);
}

TEST_CASE("lossless duplication-K redundancy is exactly K-1") {
    for (int k : {2, 3, 5}) {
        SessionConfig cfg = lossless(Protocol::Duplication);
        cfg.dup_factor = k;
        auto result = run_session(cfg);
        CHECK(redundancy_rate(result.packet_log, 300, 60, 8) ==
              doctest::Approx(static_cast<double>(k - 1)));
    }
}

TEST_CASE("lossless chatterbox redundancy matches the ack-timing oracle") {
    // Oracle, derived from first principles: token j goes out at j*100 and
    // its ack returns at j*100 + 400, landing exactly on token (j+4)'s
    // generation instant; arrivals beat generation at ties, so the packet
    // for token j carries min(j, 3) piggybacked indices. After the last
    // token (t = 29900) the unacked tail {296..299} drains via acks at
    // 30000..30300; the idle timer at 30100 still sees {298, 299} and
    // resends them once (60 + 16 bytes).
    std::int64_t expected_bytes = 0;
    const std::int64_t n = 300;
    for (std::int64_t j = 0; j < n; ++j) {
        const std::int64_t carried = 1 + std::min<std::int64_t>(j, 3);
        expected_bytes += 60 + 8 * carried;
    }
    expected_bytes += 60 + 2 * 8;
    CHECK(expected_bytes == 27628);

    auto result = run_session(lossless(Protocol::Chatterbox));
    std::int64_t actual = 0;
    for (const auto& rec : result.packet_log) {
        actual += rec.size_bytes;
    }
    CHECK(actual == expected_bytes);

    const double expected_redundancy = static_cast<double>(27628 - 20400) / 20400.0;
    CHECK(redundancy_rate(result.packet_log, 300, 60, 8) ==
          doctest::Approx(expected_redundancy));
    CHECK(expected_redundancy == doctest::Approx(0.354314).epsilon(1e-4));
}

TEST_CASE("late fraction counts renders more than the threshold after generation") {
    const auto gen = uniform_timeline(10, 100);
    auto render = gen;
    for (auto& t : render) {
        t += 200; // lossless delay at rtt 400
    }
    CHECK(late_fraction(render, gen) == 0.0);

    render[4] = gen[4] + 1000;
    CHECK(late_fraction(render, gen) == doctest::Approx(0.1));

    // exactly at the threshold is not late
    const std::vector<SimTime> gen3{0, 100, 200};
    const std::vector<SimTime> render3{400, 400, 400};
    CHECK(late_fraction(render3, gen3) == 0.0);
}

TEST_CASE("late fraction is monotone non-increasing in the threshold") {
    const auto gen = uniform_timeline(50, 100);
    std::vector<SimTime> render = gen;
    for (std::size_t i = 0; i < render.size(); ++i) {
        render[i] += 100 + static_cast<SimTime>(i * 17 % 900);
    }
    double prev = 1.1;
    for (SimTime threshold = 0; threshold <= 1000; threshold += 50) {
        const double f = late_fraction(render, gen, threshold);
        CHECK(f <= prev);
        prev = f;
    }
}

TEST_CASE("p95 gap uses the nearest rank") {
    CHECK(p95_gap(uniform_timeline(101, 100)) == 100); // 100 equal gaps

    std::vector<SimTime> t = uniform_timeline(20, 100); // 19 gaps of 100
    t.push_back(t.back() + 5000);                       // and one of 5000
    CHECK(p95_gap(t) == 5000);

    CHECK(p95_gap({0, 700}) == 700); // single gap
    CHECK_THROWS_AS(p95_gap({0}), std::invalid_argument);
}

TEST_CASE("metrics are pure functions of the session result") {
    SessionConfig cfg;
    cfg.seed = 12;
    auto result = run_session(cfg);
    auto a = compute_report(result);
    auto b = compute_report(result);
    CHECK(a.stall_ratio == b.stall_ratio);
    CHECK(a.redundancy_rate == b.redundancy_rate);
    CHECK(a.late_fraction == b.late_fraction);
    CHECK(a.p95_gap_ms == b.p95_gap_ms);
    CHECK(a.total_bytes_sent == b.total_bytes_sent);
    CHECK(a.stall_ratio >= 0.0);
    CHECK(a.stall_ratio < 1.0);
}

TEST_SUITE_END();
