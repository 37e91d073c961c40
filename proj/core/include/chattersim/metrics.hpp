#pragma once

#include "chattersim/engine.hpp"
#include "chattersim/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace chattersim {

enum class StallDenominator {
    RenderSpan, // last render - first render
    Session,    // session start (t=0) to last render
};

struct MetricsOptions {
    /// Count only the part of a gap above the threshold instead of the
    /// whole gap.
    bool stall_excess_only = false;
    StallDenominator denominator = StallDenominator::RenderSpan;
};

struct MetricsReport {
    double stall_ratio = 0.0;
    double redundancy_rate = 0.0;
    double late_fraction = 0.0;
    SimTime p95_gap_ms = 0;
    std::int64_t total_bytes_sent = 0;
    double observed_loss_rate = 0.0;
};

/// Fraction of the render span spent in inter-render gaps strictly above
/// the threshold. Throws std::invalid_argument below 2 rendered tokens.
double stall_ratio(const std::vector<SimTime>& render_timeline,
                   SimTime stall_threshold_ms = 200,
                   const MetricsOptions& options = {});

/// Bytes sent beyond the ideal of each token shipped exactly once in its
/// own packet, as a fraction of that ideal. Lost transmissions count: the
/// bytes went on the wire. Can go negative only for schemes that batch
/// multiple new tokens per packet; not clamped.
double redundancy_rate(const std::vector<TransmissionRecord>& packet_log,
                       std::int64_t n_tokens, std::int64_t header_bytes,
                       std::int64_t token_payload_bytes);

/// Fraction of tokens rendered more than `late_threshold_ms` after their
/// generation time.
double late_fraction(const std::vector<SimTime>& render_timeline,
                     const std::vector<SimTime>& gen_times,
                     SimTime late_threshold_ms = 400);

/// Nearest-rank 95th percentile of inter-render gaps: the (floor(0.95*n)+1)-th
/// smallest gap, clamped to the largest. Throws below 2 rendered tokens.
SimTime p95_gap(const std::vector<SimTime>& render_timeline);

MetricsReport compute_report(const SessionResult& result, const MetricsOptions& options = {});

std::string format_report(const MetricsReport& report);

} // namespace chattersim
