#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chattersim {

/// Milliseconds since session start. All schedule arithmetic stays integral.
using SimTime = std::int64_t;

using TokenIndex = std::int64_t;

/// One generated unit of response text.
struct Token {
    TokenIndex index = 0;
    SimTime gen_time = 0;
    std::int64_t payload_bytes = 0;
    bool eos = false;
};

enum class PacketKind { Initial, Retransmit, Duplicate, IdleResend };

std::string to_string(PacketKind kind);

/// One transmission unit. Retransmissions and duplicates get fresh ids.
struct Packet {
    std::int64_t packet_id = 0;
    SimTime send_time = 0;
    std::vector<TokenIndex> token_indices; // non-empty, duplicate-free
    PacketKind kind = PacketKind::Initial;
    std::int64_t size_bytes = 0; // header + carried payload bytes
};

/// A grow-only set of token indices, stored as a contiguous prefix plus
/// sorted extras above it. This is the wire shape of receiver feedback:
/// recovery schemes can deliver tokens out of order, so a plain cumulative
/// ack number is not enough.
class IndexSet {
public:
    /// Indices [0, prefix) are all present.
    TokenIndex prefix() const { return prefix_; }
    const std::vector<TokenIndex>& extras() const { return extras_; }

    bool contains(TokenIndex idx) const;

    /// Returns true if the index was newly added.
    bool insert(TokenIndex idx);

    std::size_t size() const { return static_cast<std::size_t>(prefix_) + extras_.size(); }
    bool empty() const { return prefix_ == 0 && extras_.empty(); }
    std::optional<TokenIndex> max_index() const;

    std::vector<TokenIndex> to_vector() const;

    bool operator==(const IndexSet&) const = default;

private:
    TokenIndex prefix_ = 0;
    std::vector<TokenIndex> extras_; // sorted, unique, all >= prefix_
};

/// Receiver feedback: which token indices it now holds.
struct Ack {
    std::int64_t acked_packet_id = 0;
    IndexSet held_indices;
    SimTime send_time = 0;
};

/// Result of evaluating whether the unacked backlog can outgrow packet
/// capacity: holds when gap * (capacity - 1) <= 2 * rtt + loss_time.
struct OverflowDiagnosis {
    bool holds = false;
    std::int64_t lhs_ms = 0;
    std::int64_t rhs_ms = 0;
};

OverflowDiagnosis overflow_condition(std::int64_t gap_ms, std::int64_t capacity_tokens,
                                     std::int64_t rtt_ms, std::int64_t loss_ms);

} // namespace chattersim
