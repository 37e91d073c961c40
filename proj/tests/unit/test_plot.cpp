#include "chattersim/plot.hpp"

#include "chattersim/bench.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace chattersim;

TEST_SUITE_BEGIN("plot");

namespace {

std::string sample_csv() {
    std::vector<AggregateRow> rows;
    for (const char* proto : {"chatterbox", "tcp", "dup2"}) {
        for (SimTime rtt : {100, 400}) {
            AggregateRow r;
            r.protocol = proto;
            r.rtt_ms = rtt;
            r.stay_good = 0.9;
            r.stay_lossy = 0.5;
            r.n = 30;
            r.stall_ratio.mean = proto[0] == 't' ? 0.5 : 0.2;
            rows.push_back(r);
        }
    }
    return write_bench_csv(rows);
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

} // namespace

TEST_CASE("grouped bars cover every cell and protocol") {
    auto csv = parse_bench_csv(sample_csv());
    auto svg = render_grouped_bars(csv, "stall_ratio_mean");
    // background + 6 bars + 3 legend swatches
    CHECK(count_occurrences(svg, "<rect") == 10);
    CHECK(count_occurrences(svg, ">chatterbox<") == 1);
    CHECK(count_occurrences(svg, ">tcp<") == 1);
    CHECK(count_occurrences(svg, ">dup2<") == 1);
    CHECK(svg.find("rtt=100 p=0.9 q=0.5") != std::string::npos);
    CHECK(svg.find("rtt=400 p=0.9 q=0.5") != std::string::npos);
}

TEST_CASE("identical input renders identical svg bytes") {
    auto csv = parse_bench_csv(sample_csv());
    CHECK(render_grouped_bars(csv, "stall_ratio_mean") ==
          render_grouped_bars(csv, "stall_ratio_mean"));
}

TEST_CASE("unknown metric columns are rejected") {
    auto csv = parse_bench_csv(sample_csv());
    CHECK_THROWS_AS(render_grouped_bars(csv, "no_such_metric"), std::invalid_argument);
}

TEST_CASE("empty csv input is rejected") {
    CHECK_THROWS_AS(parse_bench_csv(""), std::runtime_error);
    CHECK_THROWS_AS(parse_bench_csv("protocol,rtt_ms,p,q\n"), std::runtime_error);
}

TEST_SUITE_END();
