#include "chattersim/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace chattersim {

namespace {

std::vector<SimTime> render_gaps(const std::vector<SimTime>& timeline) {
    std::vector<SimTime> gaps;
    gaps.reserve(timeline.size() > 0 ? timeline.size() - 1 : 0);
    for (std::size_t i = 1; i < timeline.size(); ++i) {
        gaps.push_back(timeline[i] - timeline[i - 1]);
    }
    return gaps;
}

} // namespace

double stall_ratio(const std::vector<SimTime>& render_timeline, SimTime stall_threshold_ms,
                   const MetricsOptions& options) {
    if (render_timeline.size() < 2) {
        throw std::invalid_argument("undefined stall ratio: fewer than 2 rendered tokens");
    }
    std::int64_t stall = 0;
    for (SimTime gap : render_gaps(render_timeline)) {
        if (gap > stall_threshold_ms) {
            stall += options.stall_excess_only ? gap - stall_threshold_ms : gap;
        }
    }
    const SimTime last = render_timeline.back();
    const SimTime span_start =
        options.denominator == StallDenominator::Session ? 0 : render_timeline.front();
    const SimTime span = last - span_start;
    if (span <= 0) {
        return 0.0;
    }
    return static_cast<double>(stall) / static_cast<double>(span);
}

double redundancy_rate(const std::vector<TransmissionRecord>& packet_log, std::int64_t n_tokens,
                       std::int64_t header_bytes, std::int64_t token_payload_bytes) {
    const std::int64_t ideal = n_tokens * (header_bytes + token_payload_bytes);
    if (ideal <= 0) {
        return 0.0;
    }
    std::int64_t actual = 0;
    for (const auto& rec : packet_log) {
        actual += rec.size_bytes;
    }
    return static_cast<double>(actual - ideal) / static_cast<double>(ideal);
}

double late_fraction(const std::vector<SimTime>& render_timeline,
                     const std::vector<SimTime>& gen_times, SimTime late_threshold_ms) {
    if (render_timeline.size() != gen_times.size()) {
        throw std::invalid_argument("late_fraction: timelines not aligned by index");
    }
    if (render_timeline.empty()) {
        return 0.0;
    }
    std::size_t late = 0;
    for (std::size_t i = 0; i < render_timeline.size(); ++i) {
        if (render_timeline[i] - gen_times[i] > late_threshold_ms) {
            ++late;
        }
    }
    return static_cast<double>(late) / static_cast<double>(render_timeline.size());
}

SimTime p95_gap(const std::vector<SimTime>& render_timeline) {
    if (render_timeline.size() < 2) {
        throw std::invalid_argument("undefined p95 gap: fewer than 2 rendered tokens");
    }
    std::vector<SimTime> gaps = render_gaps(render_timeline);
    std::sort(gaps.begin(), gaps.end());
    const std::size_t n = gaps.size();
    std::size_t rank = (95 * n) / 100 + 1; // 1-based nearest rank
    rank = std::min(rank, n);
    return gaps[rank - 1];
}

MetricsReport compute_report(const SessionResult& result, const MetricsOptions& options) {
    MetricsReport report;
    const auto& cfg = result.config;
    report.stall_ratio = stall_ratio(result.render_timeline, cfg.stall_threshold_ms, options);
    report.redundancy_rate = redundancy_rate(result.packet_log, cfg.n_tokens, cfg.header_bytes,
                                             cfg.token_payload_bytes);
    report.late_fraction =
        late_fraction(result.render_timeline, result.gen_times, cfg.late_threshold_ms);
    report.p95_gap_ms = p95_gap(result.render_timeline);
    report.total_bytes_sent = 0;
    for (const auto& rec : result.packet_log) {
        report.total_bytes_sent += rec.size_bytes;
    }
    report.observed_loss_rate = result.observed_loss_rate;
    return report;
}

std::string format_report(const MetricsReport& report) {
    char buf[96];
    std::ostringstream out;
    auto row = [&](const char* name, const char* fmt, auto value) {
        std::snprintf(buf, sizeof(buf), fmt, value);
        out << name;
        for (std::size_t i = std::string(name).size(); i < 22; ++i) {
            out << ' ';
        }
        out << buf << '\n';
    };
    row("stall_ratio", "%.4f", report.stall_ratio);
    row("redundancy_rate", "%.4f", report.redundancy_rate);
    row("late_fraction", "%.4f", report.late_fraction);
    row("p95_gap_ms", "%lld", static_cast<long long>(report.p95_gap_ms));
    row("total_bytes_sent", "%lld", static_cast<long long>(report.total_bytes_sent));
    row("observed_loss_rate", "%.4f", report.observed_loss_rate);
    return out.str();
}

} // namespace chattersim
