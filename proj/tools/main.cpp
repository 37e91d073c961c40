// chattersim: deterministic simulator and benchmark harness for LLM token
// streaming transports.
//
// Subcommands:
//   run        one session, metrics table (+ optional JSON result)
//   trace-run  run with a loss-trace channel
//   bench      parameter sweep, CSV + reduction table vs a baseline
//   inspect    packet-capacity overflow diagnostic
//   plot       grouped-bar SVG from a bench CSV
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/validation error.

#include "chattersim/bench.hpp"
#include "chattersim/config.hpp"
#include "chattersim/engine.hpp"
#include "chattersim/metrics.hpp"
#include "chattersim/plot.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using namespace chattersim;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonFlags {
    std::string config_path;
    std::string protocol;
    int dup_factor = 0;
    std::int64_t token_gap_ms = -1;
    std::int64_t session_len_ms = -1;
    std::int64_t n_tokens = -1;
    std::int64_t rtt_ms = -1;
    int packet_token_capacity = -1;
    std::int64_t header_bytes = -1;
    std::int64_t token_payload_bytes = -1;
    std::int64_t stall_threshold_ms = -1;
    std::int64_t late_threshold_ms = -1;
    std::int64_t idle_resend_ms = -1;
    std::string channel;
    double p = -1.0;
    double q = -1.0;
    double loss_prob_lossy = -1.0;
    std::int64_t state_slot_ms = -1;
    std::string trace_path;
    bool loop_trace = false;
    bool ack_path_lossy = false;
    std::int64_t rto_base_ms = -1;
    std::int64_t rto_max_ms = -1;
    int rto_backoff = -1;
    int fast_retransmit_threshold = -1;
    std::int64_t seed = -1;

    bool stall_excess = false;
    std::string stall_denominator;
};

void add_session_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "flat key = value config file");
    cmd->add_option("--protocol", f.protocol, "chatterbox | tcp | dup2..dup5 | duplication");
    cmd->add_option("--dup-factor", f.dup_factor, "duplication copies (2..5)");
    cmd->add_option("--token-gap-ms", f.token_gap_ms, "token generation gap G (ms)");
    cmd->add_option("--session-len-ms", f.session_len_ms, "session length (ms)");
    cmd->add_option("--n-tokens,--tokens", f.n_tokens, "token count override");
    cmd->add_option("--rtt-ms,--rtt", f.rtt_ms, "round-trip time (ms, even)");
    cmd->add_option("--packet-token-capacity,--capacity", f.packet_token_capacity,
                    "max tokens per packet T");
    cmd->add_option("--header-bytes", f.header_bytes, "per-packet header bytes");
    cmd->add_option("--token-payload-bytes", f.token_payload_bytes, "per-token payload bytes");
    cmd->add_option("--stall-threshold-ms", f.stall_threshold_ms, "stall gap threshold (ms)");
    cmd->add_option("--late-threshold-ms", f.late_threshold_ms, "late-token threshold (ms)");
    cmd->add_option("--idle-resend-ms", f.idle_resend_ms, "idle resend interval (ms)");
    cmd->add_option("--channel", f.channel, "markov | trace");
    cmd->add_option("--p", f.p, "Markov stay-in-Good probability per slot");
    cmd->add_option("--q", f.q, "Markov stay-in-Lossy probability per slot");
    cmd->add_option("--loss-prob-lossy", f.loss_prob_lossy, "drop probability in Lossy state");
    cmd->add_option("--state-slot-ms", f.state_slot_ms, "Markov slot length (ms)");
    cmd->add_option("--trace-path,--trace", f.trace_path, "loss trace CSV (selects trace channel)");
    cmd->add_flag("--loop-trace", f.loop_trace, "wrap around when the trace runs out");
    cmd->add_flag("--ack-path-lossy", f.ack_path_lossy, "run acks through an independent Markov channel");
    cmd->add_option("--rto-base-ms", f.rto_base_ms, "TCP baseline RTO base (0 = 2*rtt+200)");
    cmd->add_option("--rto-max-ms", f.rto_max_ms, "RTO backoff ceiling (0 = 8x base)");
    cmd->add_option("--rto-backoff", f.rto_backoff, "RTO backoff factor");
    cmd->add_option("--fast-retransmit-threshold", f.fast_retransmit_threshold,
                    "gap reports before fast retransmit");
    cmd->add_option("--seed", f.seed, "session seed (default: CHATTERSIM_SEED or 1)");
    cmd->add_flag("--stall-excess", f.stall_excess, "count only the gap portion above the threshold");
    cmd->add_option("--denominator", f.stall_denominator, "stall denominator: span | session");
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("CHATTERSIM_SEED")) {
        try {
            return static_cast<std::uint64_t>(std::stoull(env));
        } catch (const std::exception&) {
            throw std::runtime_error("CHATTERSIM_SEED is not an integer");
        }
    }
    return 1;
}

/// Config file first, then flags on top.
SessionConfig build_config(const CommonFlags& f, MetricsOptions& metrics) {
    SessionConfig cfg;
    cfg.seed = default_seed();

    bool file_stall_excess = false;
    std::string file_denominator;
    if (!f.config_path.empty()) {
        auto kv = load_kv_file(f.config_path);
        auto rest = apply_config_kv(cfg, kv);
        for (const auto& e : rest) {
            if (e.key == "stall_excess") {
                file_stall_excess = e.value == "true" || e.value == "1";
            } else if (e.key == "stall_denominator") {
                file_denominator = e.value;
            } else {
                throw std::runtime_error("config line " + std::to_string(e.line) +
                                         ": unknown key '" + e.key + "'");
            }
        }
    }

    if (!f.protocol.empty()) {
        auto p = parse_protocol(f.protocol);
        if (!p) {
            throw std::runtime_error("unknown protocol '" + f.protocol + "'");
        }
        cfg.protocol = p->first;
        if (p->second > 0) {
            cfg.dup_factor = p->second;
        }
    }
    if (f.dup_factor > 0) cfg.dup_factor = f.dup_factor;
    if (f.token_gap_ms >= 0) cfg.token_gap_ms = f.token_gap_ms;
    if (f.session_len_ms >= 0) cfg.session_len_ms = f.session_len_ms;
    if (f.n_tokens >= 0) cfg.n_tokens = f.n_tokens;
    if (f.rtt_ms >= 0) cfg.rtt_ms = f.rtt_ms;
    if (f.packet_token_capacity >= 0) cfg.packet_token_capacity = f.packet_token_capacity;
    if (f.header_bytes >= 0) cfg.header_bytes = f.header_bytes;
    if (f.token_payload_bytes >= 0) cfg.token_payload_bytes = f.token_payload_bytes;
    if (f.stall_threshold_ms >= 0) cfg.stall_threshold_ms = f.stall_threshold_ms;
    if (f.late_threshold_ms >= 0) cfg.late_threshold_ms = f.late_threshold_ms;
    if (f.idle_resend_ms >= 0) cfg.idle_resend_ms = f.idle_resend_ms;
    if (!f.channel.empty()) {
        if (f.channel == "markov") {
            cfg.channel = ChannelKind::Markov;
        } else if (f.channel == "trace") {
            cfg.channel = ChannelKind::Trace;
        } else {
            throw std::runtime_error("unknown channel '" + f.channel + "'");
        }
    }
    if (f.p >= 0.0) cfg.markov.stay_good = f.p;
    if (f.q >= 0.0) cfg.markov.stay_lossy = f.q;
    if (f.loss_prob_lossy >= 0.0) cfg.markov.loss_prob_lossy = f.loss_prob_lossy;
    if (f.state_slot_ms >= 0) cfg.markov.state_slot_ms = f.state_slot_ms;
    if (!f.trace_path.empty()) {
        cfg.trace_path = f.trace_path;
        cfg.channel = ChannelKind::Trace;
    }
    if (f.loop_trace) cfg.loop_trace = true;
    if (f.ack_path_lossy) cfg.ack_path_lossy = true;
    if (f.rto_base_ms >= 0) cfg.rto_base_ms = f.rto_base_ms;
    if (f.rto_max_ms >= 0) cfg.rto_max_ms = f.rto_max_ms;
    if (f.rto_backoff >= 0) cfg.rto_backoff = f.rto_backoff;
    if (f.fast_retransmit_threshold >= 0)
        cfg.fast_retransmit_threshold = f.fast_retransmit_threshold;
    if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);

    metrics.stall_excess_only = file_stall_excess || f.stall_excess;
    std::string denom = !f.stall_denominator.empty() ? f.stall_denominator : file_denominator;
    if (!denom.empty()) {
        if (denom == "span") {
            metrics.denominator = StallDenominator::RenderSpan;
        } else if (denom == "session") {
            metrics.denominator = StallDenominator::Session;
        } else {
            throw std::runtime_error("unknown stall denominator '" + denom + "'");
        }
    }
    return cfg;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write file: " + path);
    }
    out << content;
}

int cmd_run(const CommonFlags& flags, const std::string& out_path) {
    MetricsOptions metrics;
    SessionConfig cfg;
    try {
        cfg = build_config(flags, metrics);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    ConfigValidation v = validate_config(cfg);
    if (!v.ok()) {
        for (const auto& e : v.errors) {
            std::cerr << "error: " << e << '\n';
        }
        return kExitUsage;
    }

    SessionResult result = run_session(v.config);
    MetricsReport report = compute_report(result, metrics);
    std::cout << format_report(report);
    if (!out_path.empty()) {
        write_file(out_path, to_json(result) + "\n");
    }
    return 0;
}

struct BenchFlags {
    CommonFlags common;
    std::vector<std::string> protocols;
    std::vector<std::int64_t> rtts;
    std::vector<std::string> channels; // "p:q"
    int sessions = 30;
    std::int64_t base_seed = -1;
    std::string baseline = "tcp";
    std::string out_csv = "bench.csv";
};

int cmd_bench(const BenchFlags& flags) {
    MetricsOptions metrics;
    ExperimentGrid grid = default_grid();
    try {
        grid.base = build_config(flags.common, metrics);
        grid.metrics = metrics;
        grid.n_sessions = flags.sessions;
        grid.base_seed =
            flags.base_seed >= 0 ? static_cast<std::uint64_t>(flags.base_seed) : grid.base.seed;

        if (!flags.protocols.empty()) {
            grid.protocols.clear();
            for (const auto& name : flags.protocols) {
                auto p = parse_protocol(name);
                if (!p) {
                    throw std::runtime_error("unknown protocol '" + name + "'");
                }
                int k = p->second > 0 ? p->second : grid.base.dup_factor;
                grid.protocols.push_back({p->first, p->first == Protocol::Duplication ? k : 0});
            }
        }
        if (!flags.rtts.empty()) {
            grid.rtts.assign(flags.rtts.begin(), flags.rtts.end());
        }
        if (!flags.channels.empty()) {
            grid.channels.clear();
            for (const auto& pq : flags.channels) {
                const auto colon = pq.find(':');
                if (colon == std::string::npos) {
                    throw std::runtime_error("channel cell must be p:q, got '" + pq + "'");
                }
                ChannelCell cell;
                try {
                    cell.stay_good = std::stod(pq.substr(0, colon));
                    cell.stay_lossy = std::stod(pq.substr(colon + 1));
                } catch (const std::exception&) {
                    throw std::runtime_error("channel cell must be numeric p:q, got '" + pq +
                                             "'");
                }
                grid.channels.push_back(cell);
            }
        }

        // Validate every cell's parameter combination up front.
        std::vector<std::string> errors;
        for (SimTime rtt : grid.rtts) {
            for (const ChannelCell& cell : grid.channels) {
                SessionConfig probe = grid.base;
                probe.rtt_ms = rtt;
                probe.markov.stay_good = cell.stay_good;
                probe.markov.stay_lossy = cell.stay_lossy;
                for (const auto& e : validate_config(probe).errors) {
                    if (std::find(errors.begin(), errors.end(), e) == errors.end()) {
                        errors.push_back(e);
                    }
                }
            }
        }
        if (!errors.empty()) {
            for (const auto& e : errors) {
                std::cerr << "error: " << e << '\n';
            }
            return kExitUsage;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    const auto rows = run_experiment(grid);
    write_file(flags.out_csv, write_bench_csv(rows));
    std::cout << format_aggregate_table(rows) << '\n';
    std::cout << format_reduction_table(compare(rows, flags.baseline), flags.baseline);
    std::cout << "wrote " << flags.out_csv << '\n';
    return 0;
}

int cmd_inspect(std::int64_t gap, std::int64_t capacity, std::int64_t rtt, std::int64_t loss) {
    if (gap < 0 || capacity < 1 || rtt < 0 || loss < 0) {
        std::cerr << "error: expected -G >= 0, -T >= 1, --rtt >= 0, -L >= 0\n";
        return kExitUsage;
    }
    const OverflowDiagnosis d = overflow_condition(gap, capacity, rtt, loss);
    std::cout << "holds: " << (d.holds ? "true" : "false") << " (" << d.lhs_ms
              << (d.holds ? " <= " : " > ") << d.rhs_ms << ")\n";
    return 0;
}

int cmd_plot(const std::string& csv_path, const std::string& metric, const std::string& out_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open CSV: " << csv_path << '\n';
        return kExitUsage;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string svg;
    try {
        svg = render_grouped_bars(parse_bench_csv(buf.str()), metric);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    write_file(out_path, svg);
    std::cout << "wrote " << out_path << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"token streaming transport simulator"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    std::string run_out;
    CLI::App* run = app.add_subcommand("run", "run one session and print metrics");
    add_session_flags(run, run_flags);
    run->add_option("--out", run_out, "write the session result JSON here");

    CommonFlags tr_flags;
    std::string tr_out;
    CLI::App* trace_run = app.add_subcommand("trace-run", "run one session over a loss trace");
    add_session_flags(trace_run, tr_flags);
    trace_run->add_option("--out", tr_out, "write the session result JSON here");

    BenchFlags bench_flags;
    CLI::App* bench = app.add_subcommand("bench", "sweep protocols/rtts/channels");
    add_session_flags(bench, bench_flags.common);
    bench->add_option("--protocols", bench_flags.protocols, "protocols to compare")->delimiter(',');
    bench->add_option("--rtts", bench_flags.rtts, "rtt values (ms)")->delimiter(',');
    bench->add_option("--channels", bench_flags.channels, "channel cells as p:q")->delimiter(',');
    bench->add_option("--sessions", bench_flags.sessions, "sessions per cell");
    bench->add_option("--base-seed", bench_flags.base_seed, "base seed for cell seeds");
    bench->add_option("--baseline", bench_flags.baseline, "baseline protocol for reductions");
    bench->add_option("--out", bench_flags.out_csv, "output CSV path");

    std::int64_t ins_gap = 100;
    std::int64_t ins_cap = 10;
    std::int64_t ins_rtt = 400;
    std::int64_t ins_loss = 200;
    CLI::App* inspect = app.add_subcommand("inspect", "packet-capacity overflow diagnostic");
    inspect->add_option("-G,--token-gap-ms", ins_gap, "token gap (ms)");
    inspect->add_option("-T,--packet-token-capacity", ins_cap, "tokens per packet");
    inspect->add_option("--rtt,--rtt-ms", ins_rtt, "round-trip time (ms)");
    inspect->add_option("-L,--loss-ms", ins_loss, "loss duration (ms)");

    std::string plot_csv;
    std::string plot_metric = "stall_ratio_mean";
    std::string plot_out = "plot.svg";
    CLI::App* plot = app.add_subcommand("plot", "grouped-bar SVG from a bench CSV");
    plot->add_option("--csv", plot_csv, "bench CSV path")->required();
    plot->add_option("--metric", plot_metric, "metric column to plot");
    plot->add_option("--out", plot_out, "output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (run->parsed()) {
            return cmd_run(run_flags, run_out);
        }
        if (trace_run->parsed()) {
            if (tr_flags.trace_path.empty()) {
                std::cerr << "error: trace-run requires --trace\n";
                return kExitUsage;
            }
            return cmd_run(tr_flags, tr_out);
        }
        if (bench->parsed()) {
            return cmd_bench(bench_flags);
        }
        if (inspect->parsed()) {
            return cmd_inspect(ins_gap, ins_cap, ins_rtt, ins_loss);
        }
        if (plot->parsed()) {
            return cmd_plot(plot_csv, plot_metric, plot_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
