#pragma once

#include "chattersim/config.hpp"
#include "chattersim/rng.hpp"
#include "chattersim/types.hpp"

#include <cstddef>
#include <vector>

namespace chattersim {

struct DeliveryOutcome {
    bool delivered = false;
    SimTime arrival_time = 0; // meaningful only when delivered
};

/// Loss + delay model for one direction. Delivered packets keep FIFO order:
/// the one-way delay is constant, there is no reordering or queueing.
class Channel {
public:
    virtual ~Channel() = default;

    /// One loss decision per transmission.
    virtual DeliveryOutcome transmit(const Packet& packet, SimTime now, Rng& rng) = 0;

    /// Same loss process without a packet attached (ack path reuse).
    virtual DeliveryOutcome decide(SimTime now, Rng& rng) = 0;
};

/// Two-state (Good/Lossy) Markov channel. State transitions happen only at
/// slot boundaries; each elapsed slot consumes exactly one stay/leave draw,
/// in slot order, before any per-packet loss draw.
class MarkovChannel final : public Channel {
public:
    enum class State { Good, Lossy };

    MarkovChannel(MarkovParams params, SimTime one_way_delay_ms,
                  State initial = State::Good, SimTime slot_start = 0);

    /// Advances slot-by-slot to the slot containing `now`. Idempotent for a
    /// fixed `now`; consumes floor((now - slot_start)/slot) draws.
    void advance_to(SimTime now, Rng& rng);

    DeliveryOutcome transmit(const Packet& packet, SimTime now, Rng& rng) override;
    DeliveryOutcome decide(SimTime now, Rng& rng) override;

    State state() const { return state_; }
    SimTime slot_start() const { return slot_start_; }
    double loss_prob() const;

private:
    MarkovParams params_;
    SimTime one_way_delay_ms_;
    State state_;
    SimTime slot_start_;
};

/// Long-run fraction of packets lost by a MarkovChannel:
/// loss_prob_lossy * (1-p) / ((1-p) + (1-q)).
/// Throws std::invalid_argument for the degenerate p = q = 1 chain.
double stationary_loss_rate(double stay_good, double stay_lossy, double loss_prob_lossy);

/// Recorded per-transmission loss outcomes (true = lost).
struct LossTrace {
    std::vector<bool> outcomes;
    std::size_t cursor = 0;

    std::size_t size() const { return outcomes.size(); }
    double loss_fraction() const;

    bool operator==(const LossTrace&) const = default;
};

/// Replays a LossTrace against the forward path, consuming exactly one
/// outcome per transmission (duplicates and retransmissions included).
class TraceChannel final : public Channel {
public:
    TraceChannel(LossTrace trace, SimTime one_way_delay_ms, bool loop = false);

    /// Throws std::runtime_error("trace exhausted at packet N") when the
    /// trace runs out and looping is disabled.
    DeliveryOutcome transmit(const Packet& packet, SimTime now, Rng& rng) override;
    DeliveryOutcome decide(SimTime now, Rng& rng) override;

    const LossTrace& trace() const { return trace_; }

private:
    LossTrace trace_;
    SimTime one_way_delay_ms_;
    bool loop_;
    std::size_t transmissions_ = 0;
};

} // namespace chattersim
