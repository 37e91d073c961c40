#pragma once

#include "chattersim/config.hpp"
#include "chattersim/types.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace chattersim {

/// Sender side of a token streaming scheme, driven by the event loop.
/// Handlers return the packets to put on the wire at `now`.
class SenderBehavior {
public:
    virtual ~SenderBehavior() = default;

    virtual std::vector<Packet> on_token(const Token& token, SimTime now) = 0;
    virtual std::vector<Packet> on_ack(const Ack& ack, SimTime now) = 0;
    virtual std::vector<Packet> on_timer(SimTime now) = 0;

    /// Next instant on_timer wants to run, if any.
    virtual std::optional<SimTime> next_timer_deadline() const = 0;

    /// True once the stream is fully delivered: every sent token (the EOS
    /// token included) has been acknowledged.
    virtual bool finished() const = 0;
};

/// Piggybacking sender: every outgoing packet carries the new token plus as
/// many still-unacked tokens as fit, earliest first, so any single delivered
/// packet renders independently of earlier losses. Loss is never detected
/// explicitly; recovery is the piggyback itself plus an idle resend after
/// `idle_resend_ms` of send silence.
class ChatterboxSender final : public SenderBehavior {
public:
    explicit ChatterboxSender(const SessionConfig& cfg);

    std::vector<Packet> on_token(const Token& token, SimTime now) override;
    std::vector<Packet> on_ack(const Ack& ack, SimTime now) override;
    std::vector<Packet> on_timer(SimTime now) override;
    std::optional<SimTime> next_timer_deadline() const override;
    bool finished() const override;

    const std::vector<TokenIndex>& unacked() const { return unacked_; }

private:
    Packet build_packet(std::optional<TokenIndex> new_index, SimTime now, PacketKind kind);
    std::int64_t packet_bytes(const std::vector<TokenIndex>& indices) const;

    int capacity_;
    std::int64_t header_bytes_;
    SimTime idle_resend_ms_;

    std::vector<TokenIndex> unacked_; // ascending == send order
    std::vector<std::int64_t> payload_bytes_; // by token index
    SimTime last_send_time_ = 0;
    bool eos_generated_ = false;
    std::int64_t next_packet_id_ = 0;
};

/// Retransmission baseline: one packet per token, loss recovered by
/// duplicate-gap reports (fast retransmit) or the RTO with exponential
/// backoff. Models only the retransmission behavior, not congestion control.
class TcpLikeSender final : public SenderBehavior {
public:
    explicit TcpLikeSender(const SessionConfig& cfg);

    std::vector<Packet> on_token(const Token& token, SimTime now) override;
    std::vector<Packet> on_ack(const Ack& ack, SimTime now) override;
    std::vector<Packet> on_timer(SimTime now) override;
    std::optional<SimTime> next_timer_deadline() const override;
    bool finished() const override;

    SimTime rto_current_ms() const { return rto_current_; }

private:
    Packet single_token_packet(TokenIndex index, SimTime now, PacketKind kind);

    std::int64_t header_bytes_;
    SimTime rto_base_;
    SimTime rto_max_;
    int backoff_factor_;
    int fast_retransmit_threshold_;

    std::vector<TokenIndex> outstanding_; // ascending, sent but unacked
    std::vector<std::int64_t> payload_bytes_;
    std::map<TokenIndex, int> gap_reports_;
    std::optional<SimTime> rto_deadline_;
    SimTime rto_current_;
    bool eos_generated_ = false;
    std::int64_t next_packet_id_ = 0;
};

/// Wraps a base sender and emits K copies of every packet it produces
/// (retransmissions included). Copies share content and send time but get
/// fresh packet ids; copies 2..K are marked Duplicate.
class DuplicationSender final : public SenderBehavior {
public:
    /// Throws std::invalid_argument unless copies >= 2.
    DuplicationSender(std::unique_ptr<SenderBehavior> base, int copies);

    std::vector<Packet> on_token(const Token& token, SimTime now) override;
    std::vector<Packet> on_ack(const Ack& ack, SimTime now) override;
    std::vector<Packet> on_timer(SimTime now) override;
    std::optional<SimTime> next_timer_deadline() const override;
    bool finished() const override;

private:
    std::vector<Packet> duplicate(std::vector<Packet> packets);

    std::unique_ptr<SenderBehavior> base_;
    int copies_;
    std::int64_t next_packet_id_ = 0;
};

struct RenderEvent {
    TokenIndex index = 0;
    SimTime time = 0;
};

/// Receiver shared by all schemes: collect carried indices, render the
/// maximal contiguous prefix, ack every packet with the full held set.
class Receiver {
public:
    std::pair<std::vector<RenderEvent>, Ack> on_packet(const Packet& packet, SimTime now);

    const IndexSet& held() const { return held_; }
    /// Count of rendered tokens == first missing index.
    TokenIndex rendered_prefix() const { return held_.prefix(); }
    const std::vector<RenderEvent>& render_log() const { return render_log_; }

private:
    IndexSet held_;
    std::vector<RenderEvent> render_log_;
};

/// Builds the configured scheme; cfg must be validated.
std::unique_ptr<SenderBehavior> make_sender(const SessionConfig& cfg);

} // namespace chattersim
