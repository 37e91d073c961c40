#pragma once

#include "chattersim/channel.hpp"
#include "chattersim/config.hpp"
#include "chattersim/types.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace chattersim {

/// Event kinds in tie-break order: at equal times, packet arrivals are
/// handled before ack arrivals, then token generation, then sender timers.
/// A packet that lands exactly on a generation instant is therefore acked
/// before the next send.
enum class EventKind : int {
    FwdArrival = 0,
    AckArrival = 1,
    TokenGen = 2,
    SenderTimer = 3,
};

struct Event {
    SimTime time = 0;
    EventKind kind = EventKind::TokenGen;
    std::uint64_t seq = 0; // insertion counter, final tie-break
    std::variant<std::monostate, Packet, Ack, TokenIndex> payload;
};

/// One forward transmission and its fate.
struct TransmissionRecord {
    std::int64_t packet_id = 0;
    SimTime send_time = 0;
    std::vector<TokenIndex> token_indices;
    PacketKind kind = PacketKind::Initial;
    std::int64_t size_bytes = 0;
    bool delivered = false;
    SimTime arrival_time = -1; // -1 when lost
};

struct SessionResult {
    std::vector<SimTime> gen_times;        // by token index
    std::vector<SimTime> render_timeline;  // by token index
    std::vector<TransmissionRecord> packet_log;
    double observed_loss_rate = 0.0;
    SessionConfig config; // normalized echo
};

/// Runs one session to completion: tokens generated on the configured
/// cadence (last one flagged EOS), sender/channel/receiver/ack path wired
/// through a deterministic event loop, until the sender reports finished.
///
/// Throws std::invalid_argument on config errors and std::runtime_error
/// ("session did not complete") when the hard cap of 10x the session length
/// passes without completion.
SessionResult run_session(const SessionConfig& cfg);

/// Session k runs with seed base_seed + k on an independent channel.
std::vector<SessionResult> run_sessions(const SessionConfig& cfg, int n_sessions,
                                        std::uint64_t base_seed);

/// Stable JSON serialization (sorted keys); identical runs give identical
/// bytes.
std::string to_json(const SessionResult& result, int indent = 2);

} // namespace chattersim
