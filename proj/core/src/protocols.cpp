#include "chattersim/protocols.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace chattersim {

// ---------------------------------------------------------------- chatterbox

ChatterboxSender::ChatterboxSender(const SessionConfig& cfg)
    : capacity_(cfg.packet_token_capacity), header_bytes_(cfg.header_bytes),
      idle_resend_ms_(cfg.idle_resend_ms) {}

std::int64_t ChatterboxSender::packet_bytes(const std::vector<TokenIndex>& indices) const {
    std::int64_t bytes = header_bytes_;
    for (TokenIndex idx : indices) {
        bytes += payload_bytes_[static_cast<std::size_t>(idx)];
    }
    return bytes;
}

Packet ChatterboxSender::build_packet(std::optional<TokenIndex> new_index, SimTime now,
                                      PacketKind kind) {
    Packet p;
    p.packet_id = next_packet_id_++;
    p.send_time = now;
    p.kind = kind;

    // New token first, then unacked earliest-first until the packet is full.
    // When not everything fits, the earliest unacked win: they are the ones
    // blocking the receiver's render prefix.
    int room = capacity_;
    if (new_index) {
        p.token_indices.push_back(*new_index);
        --room;
    }
    for (TokenIndex idx : unacked_) {
        if (room == 0) {
            break;
        }
        p.token_indices.push_back(idx);
        --room;
    }
    p.size_bytes = packet_bytes(p.token_indices);
    return p;
}

std::vector<Packet> ChatterboxSender::on_token(const Token& token, SimTime now) {
    assert(static_cast<std::size_t>(token.index) == payload_bytes_.size());
    payload_bytes_.push_back(token.payload_bytes);
    if (token.eos) {
        eos_generated_ = true;
    }

    Packet p = build_packet(token.index, now, PacketKind::Initial);
    unacked_.push_back(token.index); // append after the send, keeping order
    last_send_time_ = now;
    return {std::move(p)};
}

std::vector<Packet> ChatterboxSender::on_ack(const Ack& ack, SimTime now) {
    (void)now;
    std::erase_if(unacked_, [&](TokenIndex idx) { return ack.held_indices.contains(idx); });
    return {};
}

std::vector<Packet> ChatterboxSender::on_timer(SimTime now) {
    if (unacked_.empty() || now - last_send_time_ < idle_resend_ms_) {
        return {};
    }
    Packet p = build_packet(std::nullopt, now, PacketKind::IdleResend);
    last_send_time_ = now;
    return {std::move(p)};
}

std::optional<SimTime> ChatterboxSender::next_timer_deadline() const {
    if (unacked_.empty()) {
        return std::nullopt;
    }
    return last_send_time_ + idle_resend_ms_;
}

bool ChatterboxSender::finished() const {
    return eos_generated_ && unacked_.empty();
}

// ------------------------------------------------------------------ tcp-like

TcpLikeSender::TcpLikeSender(const SessionConfig& cfg)
    : header_bytes_(cfg.header_bytes), rto_base_(cfg.rto_base_ms), rto_max_(cfg.rto_max_ms),
      backoff_factor_(cfg.rto_backoff), fast_retransmit_threshold_(cfg.fast_retransmit_threshold),
      rto_current_(cfg.rto_base_ms) {}

Packet TcpLikeSender::single_token_packet(TokenIndex index, SimTime now, PacketKind kind) {
    Packet p;
    p.packet_id = next_packet_id_++;
    p.send_time = now;
    p.kind = kind;
    p.token_indices = {index};
    p.size_bytes = header_bytes_ + payload_bytes_[static_cast<std::size_t>(index)];
    return p;
}

std::vector<Packet> TcpLikeSender::on_token(const Token& token, SimTime now) {
    assert(static_cast<std::size_t>(token.index) == payload_bytes_.size());
    payload_bytes_.push_back(token.payload_bytes);
    if (token.eos) {
        eos_generated_ = true;
    }
    outstanding_.push_back(token.index);
    if (!rto_deadline_) {
        rto_deadline_ = now + rto_current_;
    }
    return {single_token_packet(token.index, now, PacketKind::Initial)};
}

std::vector<Packet> TcpLikeSender::on_ack(const Ack& ack, SimTime now) {
    bool progress = false;
    std::erase_if(outstanding_, [&](TokenIndex idx) {
        if (ack.held_indices.contains(idx)) {
            progress = true;
            gap_reports_.erase(idx);
            return true;
        }
        return false;
    });

    // Every outstanding index below the highest held one is a gap report;
    // the selective ack proves later data arrived while this did not.
    std::vector<Packet> out;
    const auto max_held = ack.held_indices.max_index();
    if (max_held) {
        for (TokenIndex idx : outstanding_) {
            if (idx >= *max_held) {
                break;
            }
            int& count = gap_reports_[idx];
            ++count;
            if (count >= fast_retransmit_threshold_) {
                out.push_back(single_token_packet(idx, now, PacketKind::Retransmit));
                count = 0;
            }
        }
    }

    if (outstanding_.empty()) {
        rto_deadline_.reset();
        rto_current_ = rto_base_;
    } else if (progress) {
        // Fresh forward progress: drop the backoff and restart the timer.
        rto_current_ = rto_base_;
        rto_deadline_ = now + rto_current_;
    }
    return out;
}

std::vector<Packet> TcpLikeSender::on_timer(SimTime now) {
    if (!rto_deadline_ || now < *rto_deadline_ || outstanding_.empty()) {
        return {};
    }
    Packet p = single_token_packet(outstanding_.front(), now, PacketKind::Retransmit);
    rto_current_ = std::min(rto_current_ * backoff_factor_, rto_max_);
    rto_deadline_ = now + rto_current_;
    return {std::move(p)};
}

std::optional<SimTime> TcpLikeSender::next_timer_deadline() const {
    if (outstanding_.empty()) {
        return std::nullopt;
    }
    return rto_deadline_;
}

bool TcpLikeSender::finished() const {
    return eos_generated_ && outstanding_.empty();
}

// --------------------------------------------------------------- duplication

DuplicationSender::DuplicationSender(std::unique_ptr<SenderBehavior> base, int copies)
    : base_(std::move(base)), copies_(copies) {
    if (!base_) {
        throw std::invalid_argument("duplication requires a base sender");
    }
    if (copies_ < 2) {
        throw std::invalid_argument("duplication factor must be at least 2");
    }
}

std::vector<Packet> DuplicationSender::duplicate(std::vector<Packet> packets) {
    std::vector<Packet> out;
    out.reserve(packets.size() * static_cast<std::size_t>(copies_));
    for (auto& p : packets) {
        Packet original = std::move(p);
        original.packet_id = next_packet_id_++;
        out.push_back(original);
        for (int c = 1; c < copies_; ++c) {
            Packet copy = original;
            copy.packet_id = next_packet_id_++;
            copy.kind = PacketKind::Duplicate;
            out.push_back(std::move(copy));
        }
    }
    return out;
}

std::vector<Packet> DuplicationSender::on_token(const Token& token, SimTime now) {
    return duplicate(base_->on_token(token, now));
}

std::vector<Packet> DuplicationSender::on_ack(const Ack& ack, SimTime now) {
    return duplicate(base_->on_ack(ack, now));
}

std::vector<Packet> DuplicationSender::on_timer(SimTime now) {
    return duplicate(base_->on_timer(now));
}

std::optional<SimTime> DuplicationSender::next_timer_deadline() const {
    return base_->next_timer_deadline();
}

bool DuplicationSender::finished() const {
    return base_->finished();
}

// ------------------------------------------------------------------ receiver

std::pair<std::vector<RenderEvent>, Ack> Receiver::on_packet(const Packet& packet, SimTime now) {
    const TokenIndex before = held_.prefix();
    for (TokenIndex idx : packet.token_indices) {
        held_.insert(idx); // duplicates are a no-op
    }

    std::vector<RenderEvent> renders;
    for (TokenIndex idx = before; idx < held_.prefix(); ++idx) {
        renders.push_back(RenderEvent{idx, now});
        render_log_.push_back(RenderEvent{idx, now});
    }

    Ack ack;
    ack.acked_packet_id = packet.packet_id;
    ack.held_indices = held_;
    ack.send_time = now;
    return {std::move(renders), std::move(ack)};
}

// ------------------------------------------------------------------- factory

std::unique_ptr<SenderBehavior> make_sender(const SessionConfig& cfg) {
    switch (cfg.protocol) {
    case Protocol::Chatterbox:
        return std::make_unique<ChatterboxSender>(cfg);
    case Protocol::TcpLike:
        return std::make_unique<TcpLikeSender>(cfg);
    case Protocol::Duplication:
        return std::make_unique<DuplicationSender>(std::make_unique<TcpLikeSender>(cfg),
                                                   cfg.dup_factor);
    }
    throw std::invalid_argument("unknown protocol");
}

} // namespace chattersim
