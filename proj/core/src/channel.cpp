#include "chattersim/channel.hpp"

#include <stdexcept>

namespace chattersim {

MarkovChannel::MarkovChannel(MarkovParams params, SimTime one_way_delay_ms, State initial,
                             SimTime slot_start)
    : params_(params), one_way_delay_ms_(one_way_delay_ms), state_(initial),
      slot_start_(slot_start) {}

double MarkovChannel::loss_prob() const {
    return state_ == State::Lossy ? params_.loss_prob_lossy : 0.0;
}

void MarkovChannel::advance_to(SimTime now, Rng& rng) {
    while (slot_start_ + params_.state_slot_ms <= now) {
        slot_start_ += params_.state_slot_ms;
        const double stay = state_ == State::Good ? params_.stay_good : params_.stay_lossy;
        if (!rng.bernoulli(stay)) {
            state_ = state_ == State::Good ? State::Lossy : State::Good;
        }
    }
}

DeliveryOutcome MarkovChannel::decide(SimTime now, Rng& rng) {
    advance_to(now, rng);
    const bool lost = rng.bernoulli(loss_prob());
    return DeliveryOutcome{!lost, now + one_way_delay_ms_};
}

DeliveryOutcome MarkovChannel::transmit(const Packet&, SimTime now, Rng& rng) {
    return decide(now, rng);
}

double stationary_loss_rate(double stay_good, double stay_lossy, double loss_prob_lossy) {
    const double leave_good = 1.0 - stay_good;
    const double leave_lossy = 1.0 - stay_lossy;
    if (leave_good == 0.0 && leave_lossy == 0.0) {
        throw std::invalid_argument("stationary_loss_rate: degenerate chain (p = q = 1)");
    }
    return loss_prob_lossy * leave_good / (leave_good + leave_lossy);
}

double LossTrace::loss_fraction() const {
    if (outcomes.empty()) {
        return 0.0;
    }
    std::size_t lost = 0;
    for (bool b : outcomes) {
        lost += b ? 1u : 0u;
    }
    return static_cast<double>(lost) / static_cast<double>(outcomes.size());
}

TraceChannel::TraceChannel(LossTrace trace, SimTime one_way_delay_ms, bool loop)
    : trace_(std::move(trace)), one_way_delay_ms_(one_way_delay_ms), loop_(loop) {}

DeliveryOutcome TraceChannel::decide(SimTime now, Rng&) {
    if (trace_.cursor >= trace_.outcomes.size()) {
        if (!loop_ || trace_.outcomes.empty()) {
            throw std::runtime_error("trace exhausted at packet " +
                                     std::to_string(transmissions_));
        }
        trace_.cursor = 0;
    }
    const bool lost = trace_.outcomes[trace_.cursor++];
    ++transmissions_;
    return DeliveryOutcome{!lost, now + one_way_delay_ms_};
}

DeliveryOutcome TraceChannel::transmit(const Packet&, SimTime now, Rng& rng) {
    return decide(now, rng);
}

} // namespace chattersim
