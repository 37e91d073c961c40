#pragma once

#include "chattersim/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace chattersim {

enum class Protocol { Chatterbox, TcpLike, Duplication };
enum class ChannelKind { Markov, Trace };

/// Two-state loss channel parameters. `stay_good`/`stay_lossy` are the
/// per-slot probabilities of REMAINING in the current state; expected dwell
/// is slot/(1-stay). The (0.9, 0.5) default dwells 1000ms good / 200ms lossy
/// and loses 15% of packets overall.
struct MarkovParams {
    double stay_good = 0.9;       // p
    double stay_lossy = 0.5;      // q
    double loss_prob_lossy = 0.9; // drop probability while lossy
    SimTime state_slot_ms = 100;

    bool operator==(const MarkovParams&) const = default;
};

/// Full parameterization of one simulated streaming session.
struct SessionConfig {
    Protocol protocol = Protocol::Chatterbox;
    int dup_factor = 2; // duplication copies K, 2..5

    SimTime token_gap_ms = 100;  // G
    SimTime session_len_ms = 30000;
    std::int64_t n_tokens = 0;   // 0 = session_len / gap
    SimTime rtt_ms = 400;        // must be even; one-way delay = rtt/2

    int packet_token_capacity = 10; // T
    std::int64_t header_bytes = 60;
    std::int64_t token_payload_bytes = 8;

    SimTime stall_threshold_ms = 200;
    SimTime late_threshold_ms = 400;
    SimTime idle_resend_ms = 200;

    ChannelKind channel = ChannelKind::Markov;
    MarkovParams markov;
    std::string trace_path;
    bool loop_trace = false;
    bool ack_path_lossy = false;

    SimTime rto_base_ms = 0; // 0 = 2*rtt + 200
    SimTime rto_max_ms = 0;  // 0 = 8 * rto_base; backoff never exceeds this
    int rto_backoff = 2;
    int fast_retransmit_threshold = 3;

    std::uint64_t seed = 1;

    /// Replaces the fixed cadence when non-empty (strictly increasing).
    std::vector<SimTime> custom_gen_times;

    bool operator==(const SessionConfig&) const = default;
};

struct ConfigValidation {
    SessionConfig config; // normalized; meaningful only when ok()
    std::vector<std::string> errors;

    bool ok() const { return errors.empty(); }
};

/// Checks every field invariant and reports the complete violation list.
/// On success the returned config is normalized: n_tokens and rto_base_ms
/// sentinels are resolved. Normalization is idempotent.
ConfigValidation validate_config(const SessionConfig& cfg);

std::string protocol_name(const SessionConfig& cfg);
std::string protocol_name(Protocol protocol, int dup_factor);

/// Accepts "chatterbox", "tcp"/"tcp_like", "duplication", "dup2".."dup5".
/// Returns (protocol, dup_factor or 0 when the name does not carry one).
std::optional<std::pair<Protocol, int>> parse_protocol(const std::string& name);

// Flat `key = value` config file support. '#' starts a comment.
struct ConfigKv {
    std::string key;
    std::string value;
    int line = 0;
};

/// Throws std::runtime_error with a line number on malformed input.
std::vector<ConfigKv> parse_kv_stream(std::istream& in);
std::vector<ConfigKv> load_kv_file(const std::string& path);

/// Applies recognized keys to `cfg`; returns entries it did not consume.
/// Throws std::runtime_error on unparseable values.
std::vector<ConfigKv> apply_config_kv(SessionConfig& cfg, const std::vector<ConfigKv>& kv);

/// Inverse of apply_config_kv for the recognized keys.
std::string write_config(const SessionConfig& cfg);

} // namespace chattersim
