#include "chattersim/bench.hpp"

#include "chattersim/engine.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace chattersim {

namespace {

std::string fmt(double v, const char* spec = "%.9g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

MetricStats stats_of(const std::vector<double>& xs) {
    MetricStats s;
    if (xs.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - s.mean) * (x - s.mean);
        }
        s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

std::string cell_label(SimTime rtt, double p, double q) {
    return "rtt=" + std::to_string(rtt) + " p=" + fmt(p, "%g") + " q=" + fmt(q, "%g");
}

} // namespace

std::vector<ProtocolChoice> default_protocols() {
    return {
        {Protocol::Chatterbox, 0}, {Protocol::TcpLike, 0},    {Protocol::Duplication, 2},
        {Protocol::Duplication, 3}, {Protocol::Duplication, 4}, {Protocol::Duplication, 5},
    };
}

ExperimentGrid default_grid() {
    ExperimentGrid grid;
    grid.protocols = default_protocols();
    return grid;
}

std::uint64_t cell_seed(std::uint64_t base_seed, const ProtocolChoice& protocol, SimTime rtt_ms,
                        double stay_good, double stay_lossy) {
    std::uint64_t h = 14695981039346656037ull;
    const std::string name = protocol.name();
    h = fnv1a64(name.data(), name.size(), h);
    const auto rtt = static_cast<std::int64_t>(rtt_ms);
    h = fnv1a64(&rtt, sizeof(rtt), h);
    std::uint64_t bits = 0;
    std::memcpy(&bits, &stay_good, sizeof(bits));
    h = fnv1a64(&bits, sizeof(bits), h);
    std::memcpy(&bits, &stay_lossy, sizeof(bits));
    h = fnv1a64(&bits, sizeof(bits), h);
    return base_seed ^ h;
}

std::vector<AggregateRow> run_experiment(const ExperimentGrid& grid) {
    if (grid.protocols.empty() || grid.rtts.empty() || grid.channels.empty()) {
        throw std::invalid_argument("experiment grid has an empty axis");
    }
    if (grid.n_sessions < 1) {
        throw std::invalid_argument("n_sessions must be at least 1");
    }

    std::vector<AggregateRow> rows;
    for (const ChannelCell& ch : grid.channels) {
        for (SimTime rtt : grid.rtts) {
            for (const ProtocolChoice& proto : grid.protocols) {
                SessionConfig cfg = grid.base;
                cfg.protocol = proto.protocol;
                if (proto.dup_factor > 0) {
                    cfg.dup_factor = proto.dup_factor;
                }
                cfg.rtt_ms = rtt;
                cfg.markov.stay_good = ch.stay_good;
                cfg.markov.stay_lossy = ch.stay_lossy;

                const std::uint64_t seed0 =
                    cell_seed(grid.base_seed, proto, rtt, ch.stay_good, ch.stay_lossy);

                std::vector<double> stall, redundancy, late, p95, loss;
                try {
                    for (const SessionResult& r :
                         run_sessions(cfg, grid.n_sessions, seed0)) {
                        const MetricsReport m = compute_report(r, grid.metrics);
                        stall.push_back(m.stall_ratio);
                        redundancy.push_back(m.redundancy_rate);
                        late.push_back(m.late_fraction);
                        p95.push_back(static_cast<double>(m.p95_gap_ms));
                        loss.push_back(m.observed_loss_rate);
                    }
                } catch (const std::exception& e) {
                    throw std::runtime_error("cell [" + proto.name() + " " +
                                             cell_label(rtt, ch.stay_good, ch.stay_lossy) +
                                             "]: " + e.what());
                }

                AggregateRow row;
                row.protocol = proto.name();
                row.rtt_ms = rtt;
                row.stay_good = ch.stay_good;
                row.stay_lossy = ch.stay_lossy;
                row.n = grid.n_sessions;
                row.stall_ratio = stats_of(stall);
                row.redundancy = stats_of(redundancy);
                row.late_fraction = stats_of(late);
                row.p95_gap_ms = stats_of(p95);
                row.observed_loss = stats_of(loss);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::vector<ReductionRow> compare(const std::vector<AggregateRow>& rows,
                                  const std::string& baseline_protocol) {
    // Index baselines per (rtt, p, q) cell.
    auto same_cell = [](const AggregateRow& a, const AggregateRow& b) {
        return a.rtt_ms == b.rtt_ms && a.stay_good == b.stay_good &&
               a.stay_lossy == b.stay_lossy;
    };

    std::vector<ReductionRow> out;
    for (const AggregateRow& row : rows) {
        const AggregateRow* base = nullptr;
        for (const AggregateRow& cand : rows) {
            if (cand.protocol == baseline_protocol && same_cell(cand, row)) {
                base = &cand;
                break;
            }
        }
        if (base == nullptr) {
            throw std::invalid_argument("baseline '" + baseline_protocol +
                                        "' missing from cell " +
                                        cell_label(row.rtt_ms, row.stay_good, row.stay_lossy));
        }
        ReductionRow r;
        r.protocol = row.protocol;
        r.rtt_ms = row.rtt_ms;
        r.stay_good = row.stay_good;
        r.stay_lossy = row.stay_lossy;
        auto reduction = [](double base_mean, double x) -> std::optional<double> {
            if (base_mean == 0.0) {
                return std::nullopt;
            }
            return 100.0 * (base_mean - x) / base_mean;
        };
        r.stall_reduction_pct = reduction(base->stall_ratio.mean, row.stall_ratio.mean);
        r.redundancy_reduction_pct = reduction(base->redundancy.mean, row.redundancy.mean);
        r.late_reduction_pct = reduction(base->late_fraction.mean, row.late_fraction.mean);
        out.push_back(std::move(r));
    }
    return out;
}

std::string write_bench_csv(const std::vector<AggregateRow>& rows) {
    std::ostringstream out;
    out << "protocol,rtt_ms,p,q,n,stall_ratio_mean,stall_ratio_std,redundancy_mean,"
           "redundancy_std,late_frac_mean,p95_gap_mean_ms,observed_loss_mean\n";
    for (const auto& r : rows) {
        out << r.protocol << ',' << r.rtt_ms << ',' << fmt(r.stay_good, "%g") << ','
            << fmt(r.stay_lossy, "%g") << ',' << r.n << ',' << fmt(r.stall_ratio.mean) << ','
            << fmt(r.stall_ratio.stddev) << ',' << fmt(r.redundancy.mean) << ','
            << fmt(r.redundancy.stddev) << ',' << fmt(r.late_fraction.mean) << ','
            << fmt(r.p95_gap_ms.mean) << ',' << fmt(r.observed_loss.mean) << '\n';
    }
    return out.str();
}

std::string format_aggregate_table(const std::vector<AggregateRow>& rows) {
    std::ostringstream out;
    char buf[160];
    out << "protocol    cell                      stall_ratio (95% CI)      redundancy        "
           "late_frac   loss\n";
    for (const auto& r : rows) {
        const double half = r.n > 0 ? 1.96 * r.stall_ratio.stddev / std::sqrt(r.n) : 0.0;
        std::snprintf(buf, sizeof(buf),
                      "%-11s %-25s %7.4f +/- %-12.4f %7.4f +/- %-7.4f %9.4f %7.4f\n",
                      r.protocol.c_str(),
                      cell_label(r.rtt_ms, r.stay_good, r.stay_lossy).c_str(),
                      r.stall_ratio.mean, half, r.redundancy.mean,
                      r.n > 0 ? 1.96 * r.redundancy.stddev / std::sqrt(r.n) : 0.0,
                      r.late_fraction.mean, r.observed_loss.mean);
        out << buf;
    }
    return out.str();
}

std::string format_reduction_table(const std::vector<ReductionRow>& rows,
                                   const std::string& baseline_protocol) {
    std::ostringstream out;
    out << "reductions vs baseline '" << baseline_protocol << "' (positive = better)\n";
    out << "protocol    cell                      stall%      redundancy%  late%\n";
    char buf[160];
    auto cell = [](const std::optional<double>& v) -> std::string {
        if (!v) {
            return "n/a";
        }
        char b[32];
        std::snprintf(b, sizeof(b), "%.1f", *v);
        return b;
    };
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-11s %-25s %-11s %-12s %-11s\n", r.protocol.c_str(),
                      cell_label(r.rtt_ms, r.stay_good, r.stay_lossy).c_str(),
                      cell(r.stall_reduction_pct).c_str(),
                      cell(r.redundancy_reduction_pct).c_str(),
                      cell(r.late_reduction_pct).c_str());
        out << buf;
    }
    return out.str();
}

} // namespace chattersim
