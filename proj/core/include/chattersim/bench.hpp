#pragma once

#include "chattersim/config.hpp"
#include "chattersim/metrics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chattersim {

struct ProtocolChoice {
    Protocol protocol = Protocol::Chatterbox;
    int dup_factor = 0; // used only for Duplication

    std::string name() const { return protocol_name(protocol, dup_factor); }
    bool operator==(const ProtocolChoice&) const = default;
};

struct ChannelCell {
    double stay_good = 0.9;
    double stay_lossy = 0.5;

    bool operator==(const ChannelCell&) const = default;
};

/// Cartesian sweep over protocols x rtt x channel parameters.
struct ExperimentGrid {
    std::vector<ProtocolChoice> protocols;
    std::vector<SimTime> rtts{100, 200, 400};
    std::vector<ChannelCell> channels{{0.9, 0.5}, {0.5, 0.5}, {0.9, 0.8}};
    int n_sessions = 30;
    std::uint64_t base_seed = 1;
    SessionConfig base; // remaining session parameters
    MetricsOptions metrics;
};

ExperimentGrid default_grid();

/// All six evaluated schemes: chatterbox, tcp, dup2..dup5.
std::vector<ProtocolChoice> default_protocols();

struct MetricStats {
    double mean = 0.0;
    double stddev = 0.0; // sample stddev (n-1)
};

struct AggregateRow {
    std::string protocol;
    SimTime rtt_ms = 0;
    double stay_good = 0.0;
    double stay_lossy = 0.0;
    int n = 0;
    MetricStats stall_ratio;
    MetricStats redundancy;
    MetricStats late_fraction;
    MetricStats p95_gap_ms;
    MetricStats observed_loss;
};

/// Session seeds are a pure function of (base_seed, cell identity, session
/// index), so cells can run in any order without changing results.
std::uint64_t cell_seed(std::uint64_t base_seed, const ProtocolChoice& protocol,
                        SimTime rtt_ms, double stay_good, double stay_lossy);

/// Runs every cell of the grid; rows come out in grid enumeration order
/// (channel, then rtt, then protocol). Throws with the cell identity
/// attached if a session fails.
std::vector<AggregateRow> run_experiment(const ExperimentGrid& grid);

/// Percentage reductions of each protocol against the baseline within the
/// same (rtt, p, q) cell: 100 * (base - x) / base. Unset when the baseline
/// mean is zero.
struct ReductionRow {
    std::string protocol;
    SimTime rtt_ms = 0;
    double stay_good = 0.0;
    double stay_lossy = 0.0;
    std::optional<double> stall_reduction_pct;
    std::optional<double> redundancy_reduction_pct;
    std::optional<double> late_reduction_pct;
};

/// Throws std::invalid_argument if the baseline is missing from any cell.
std::vector<ReductionRow> compare(const std::vector<AggregateRow>& rows,
                                  const std::string& baseline_protocol);

/// CSV schema:
/// protocol,rtt_ms,p,q,n,stall_ratio_mean,stall_ratio_std,redundancy_mean,
/// redundancy_std,late_frac_mean,p95_gap_mean_ms,observed_loss_mean
std::string write_bench_csv(const std::vector<AggregateRow>& rows);

/// Aligned summary with 95% confidence intervals on the means.
std::string format_aggregate_table(const std::vector<AggregateRow>& rows);
std::string format_reduction_table(const std::vector<ReductionRow>& rows,
                                   const std::string& baseline_protocol);

} // namespace chattersim
