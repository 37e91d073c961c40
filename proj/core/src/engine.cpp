#include "chattersim/engine.hpp"

#include "chattersim/protocols.hpp"
#include "chattersim/traceio.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <memory>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace chattersim {

namespace {

struct EventOrder {
    // std::priority_queue is a max-heap; invert to pop the smallest
    // (time, kind, seq) first.
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) {
            return a.time > b.time;
        }
        if (a.kind != b.kind) {
            return static_cast<int>(a.kind) > static_cast<int>(b.kind);
        }
        return a.seq > b.seq;
    }
};

class SessionRun {
public:
    explicit SessionRun(const SessionConfig& cfg)
        : cfg_(cfg), fwd_rng_(Rng::derive(cfg.seed, 0)), rev_rng_(Rng::derive(cfg.seed, 1)),
          sender_(make_sender(cfg)) {
        const SimTime owd = cfg_.rtt_ms / 2;
        if (cfg_.channel == ChannelKind::Trace) {
            forward_ = std::make_unique<TraceChannel>(load_loss_trace(cfg_.trace_path), owd,
                                                      cfg_.loop_trace);
        } else {
            forward_ = std::make_unique<MarkovChannel>(cfg_.markov, owd);
        }
        if (cfg_.ack_path_lossy) {
            reverse_ = std::make_unique<MarkovChannel>(cfg_.markov, owd);
        }
    }

    SessionResult run() {
        const auto n = static_cast<std::size_t>(cfg_.n_tokens);
        result_.config = cfg_;
        result_.gen_times.assign(n, -1);
        result_.render_timeline.assign(n, -1);

        for (std::size_t i = 0; i < n; ++i) {
            const SimTime t = cfg_.custom_gen_times.empty()
                                  ? static_cast<SimTime>(i) * cfg_.token_gap_ms
                                  : cfg_.custom_gen_times[i];
            push(t, EventKind::TokenGen, static_cast<TokenIndex>(i));
        }

        const SimTime last_gen = cfg_.custom_gen_times.empty()
                                     ? static_cast<SimTime>(cfg_.n_tokens - 1) * cfg_.token_gap_ms
                                     : cfg_.custom_gen_times.back();
        const SimTime hard_cap =
            10 * std::max(cfg_.session_len_ms, last_gen + cfg_.token_gap_ms);

        while (!queue_.empty() && !sender_->finished()) {
            Event ev = queue_.top();
            queue_.pop();
            if (ev.time > hard_cap) {
                throw std::runtime_error("session did not complete within 10x session length");
            }
            dispatch(ev);
            reconcile_timer();
        }
        if (!sender_->finished()) {
            throw std::runtime_error("session did not complete: event queue drained early");
        }

        finalize();
        return std::move(result_);
    }

private:
    void push(SimTime time, EventKind kind, std::variant<std::monostate, Packet, Ack, TokenIndex> payload) {
        queue_.push(Event{time, kind, next_seq_++, std::move(payload)});
    }

    void dispatch(const Event& ev) {
        switch (ev.kind) {
        case EventKind::TokenGen: {
            const auto idx = std::get<TokenIndex>(ev.payload);
            Token token;
            token.index = idx;
            token.gen_time = ev.time;
            token.payload_bytes = cfg_.token_payload_bytes;
            token.eos = idx == cfg_.n_tokens - 1;
            result_.gen_times[static_cast<std::size_t>(idx)] = ev.time;
            send_all(sender_->on_token(token, ev.time), ev.time);
            break;
        }
        case EventKind::FwdArrival: {
            const auto& packet = std::get<Packet>(ev.payload);
            auto [renders, ack] = receiver_.on_packet(packet, ev.time);
            for (const RenderEvent& r : renders) {
                result_.render_timeline[static_cast<std::size_t>(r.index)] = r.time;
            }
            send_ack(std::move(ack), ev.time);
            break;
        }
        case EventKind::AckArrival: {
            const auto& ack = std::get<Ack>(ev.payload);
            send_all(sender_->on_ack(ack, ev.time), ev.time);
            break;
        }
        case EventKind::SenderTimer: {
            auto it = scheduled_timers_.find(ev.time);
            if (it != scheduled_timers_.end()) {
                scheduled_timers_.erase(it);
            }
            const auto deadline = sender_->next_timer_deadline();
            if (deadline && *deadline == ev.time) {
                send_all(sender_->on_timer(ev.time), ev.time);
            }
            // A stale deadline just falls through; reconcile_timer reschedules.
            break;
        }
        }
    }

    void send_all(std::vector<Packet> packets, SimTime now) {
        for (Packet& p : packets) {
            const DeliveryOutcome outcome = forward_->transmit(p, now, fwd_rng_);
            TransmissionRecord rec;
            rec.packet_id = p.packet_id;
            rec.send_time = p.send_time;
            rec.token_indices = p.token_indices;
            rec.kind = p.kind;
            rec.size_bytes = p.size_bytes;
            rec.delivered = outcome.delivered;
            rec.arrival_time = outcome.delivered ? outcome.arrival_time : -1;
            result_.packet_log.push_back(std::move(rec));
            if (outcome.delivered) {
                push(outcome.arrival_time, EventKind::FwdArrival, std::move(p));
            }
        }
    }

    void send_ack(Ack ack, SimTime now) {
        DeliveryOutcome outcome{true, now + cfg_.rtt_ms / 2};
        if (reverse_) {
            outcome = reverse_->decide(now, rev_rng_);
        }
        if (outcome.delivered) {
            push(outcome.arrival_time, EventKind::AckArrival, std::move(ack));
        }
    }

    void reconcile_timer() {
        const auto deadline = sender_->next_timer_deadline();
        if (deadline && scheduled_timers_.count(*deadline) == 0) {
            scheduled_timers_.insert(*deadline);
            push(*deadline, EventKind::SenderTimer, std::monostate{});
        }
    }

    void finalize() {
        std::size_t lost = 0;
        for (const auto& rec : result_.packet_log) {
            lost += rec.delivered ? 0u : 1u;
        }
        result_.observed_loss_rate =
            result_.packet_log.empty()
                ? 0.0
                : static_cast<double>(lost) / static_cast<double>(result_.packet_log.size());

        for (std::size_t i = 0; i < result_.render_timeline.size(); ++i) {
            if (result_.render_timeline[i] < 0) {
                throw std::logic_error("completed session left token " + std::to_string(i) +
                                       " unrendered");
            }
        }
    }

    SessionConfig cfg_;
    Rng fwd_rng_;
    Rng rev_rng_;
    std::unique_ptr<SenderBehavior> sender_;
    std::unique_ptr<Channel> forward_;
    std::unique_ptr<Channel> reverse_; // null = lossless ack path
    Receiver receiver_;

    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
    std::uint64_t next_seq_ = 0;
    std::multiset<SimTime> scheduled_timers_;
    SessionResult result_;
};

} // namespace

SessionResult run_session(const SessionConfig& cfg) {
    ConfigValidation v = validate_config(cfg);
    if (!v.ok()) {
        std::string msg = "invalid config:";
        for (const auto& e : v.errors) {
            msg += " " + e + ";";
        }
        throw std::invalid_argument(msg);
    }
    SessionRun run(v.config);
    return run.run();
}

std::vector<SessionResult> run_sessions(const SessionConfig& cfg, int n_sessions,
                                        std::uint64_t base_seed) {
    if (n_sessions < 1) {
        throw std::invalid_argument("n_sessions must be at least 1");
    }
    std::vector<SessionResult> out;
    out.reserve(static_cast<std::size_t>(n_sessions));
    for (int k = 0; k < n_sessions; ++k) {
        SessionConfig c = cfg;
        c.seed = base_seed + static_cast<std::uint64_t>(k);
        try {
            out.push_back(run_session(c));
        } catch (const std::exception& e) {
            throw std::runtime_error("session " + std::to_string(k) + ": " + e.what());
        }
    }
    return out;
}

std::string to_json(const SessionResult& result, int indent) {
    nlohmann::json j;
    const auto& cfg = result.config;
    j["config"] = {
        {"protocol", protocol_name(cfg)},
        {"dup_factor", cfg.dup_factor},
        {"token_gap_ms", cfg.token_gap_ms},
        {"session_len_ms", cfg.session_len_ms},
        {"n_tokens", cfg.n_tokens},
        {"rtt_ms", cfg.rtt_ms},
        {"packet_token_capacity", cfg.packet_token_capacity},
        {"header_bytes", cfg.header_bytes},
        {"token_payload_bytes", cfg.token_payload_bytes},
        {"stall_threshold_ms", cfg.stall_threshold_ms},
        {"late_threshold_ms", cfg.late_threshold_ms},
        {"idle_resend_ms", cfg.idle_resend_ms},
        {"channel", cfg.channel == ChannelKind::Markov ? "markov" : "trace"},
        {"p", cfg.markov.stay_good},
        {"q", cfg.markov.stay_lossy},
        {"loss_prob_lossy", cfg.markov.loss_prob_lossy},
        {"state_slot_ms", cfg.markov.state_slot_ms},
        {"trace_path", cfg.trace_path},
        {"loop_trace", cfg.loop_trace},
        {"ack_path_lossy", cfg.ack_path_lossy},
        {"rto_base_ms", cfg.rto_base_ms},
        {"rto_max_ms", cfg.rto_max_ms},
        {"rto_backoff", cfg.rto_backoff},
        {"fast_retransmit_threshold", cfg.fast_retransmit_threshold},
        {"seed", cfg.seed},
    };
    j["gen_times"] = result.gen_times;
    j["render_timeline"] = result.render_timeline;
    j["observed_loss_rate"] = result.observed_loss_rate;

    nlohmann::json log = nlohmann::json::array();
    for (const auto& rec : result.packet_log) {
        log.push_back({
            {"packet_id", rec.packet_id},
            {"send_time", rec.send_time},
            {"token_indices", rec.token_indices},
            {"kind", to_string(rec.kind)},
            {"size_bytes", rec.size_bytes},
            {"delivered", rec.delivered},
            {"arrival_time", rec.arrival_time},
        });
    }
    j["packet_log"] = std::move(log);
    return j.dump(indent);
}

} // namespace chattersim
