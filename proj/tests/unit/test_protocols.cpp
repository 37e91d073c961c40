#include "chattersim/protocols.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace chattersim;

TEST_SUITE_BEGIN("protocols");

namespace {

SessionConfig base_config() {
    SessionConfig cfg = validate_config(SessionConfig{}).config;
    return cfg;
}

Token make_token(TokenIndex index, SimTime gen_time, bool eos = false) {
    return Token{index, gen_time, 8, eos};
}

Ack ack_holding(std::initializer_list<TokenIndex> indices, SimTime t = 0) {
    Ack ack;
    for (TokenIndex idx : indices) {
        ack.held_indices.insert(idx);
    }
    ack.send_time = t;
    return ack;
}

/// Feeds tokens 0..n-1 at the configured cadence with no acks.
std::vector<Packet> feed_tokens(SenderBehavior& sender, int n, SimTime gap = 100) {
    std::vector<Packet> sent;
    for (int i = 0; i < n; ++i) {
        auto out = sender.on_token(make_token(i, i * gap), i * gap);
        sent.insert(sent.end(), out.begin(), out.end());
    }
    return sent;
}

} // namespace

TEST_CASE("chatterbox packets carry the new token plus all unacked") {
    ChatterboxSender sender(base_config());
    feed_tokens(sender, 3); // 0,1,2 all unacked
    sender.on_ack(ack_holding({0}), 250);
    CHECK(sender.unacked() == std::vector<TokenIndex>{1, 2});

    auto out = sender.on_token(make_token(3, 300), 300);
    REQUIRE(out.size() == 1);
    CHECK(out[0].token_indices == std::vector<TokenIndex>{3, 1, 2});
    CHECK(out[0].kind == PacketKind::Initial);
    CHECK(out[0].size_bytes == 60 + 3 * 8);
    CHECK(sender.unacked() == std::vector<TokenIndex>{1, 2, 3});
}

TEST_CASE("first chatterbox packet carries only the new token") {
    ChatterboxSender sender(base_config());
    auto out = sender.on_token(make_token(0, 0), 0);
    REQUIRE(out.size() == 1);
    CHECK(out[0].token_indices == std::vector<TokenIndex>{0});
    CHECK(out[0].size_bytes == 68);
}

TEST_CASE("chatterbox overflow keeps the earliest unacked tokens") {
    ChatterboxSender sender(base_config());
    feed_tokens(sender, 11); // unacked 0..10, more than fits alongside a new token
    auto out = sender.on_token(make_token(11, 1100), 1100);
    REQUIRE(out.size() == 1);
    const std::vector<TokenIndex> expected{11, 0, 1, 2, 3, 4, 5, 6, 7, 8};
    CHECK(out[0].token_indices == expected);
}

TEST_CASE("chatterbox ack removes held indices and emits nothing") {
    ChatterboxSender sender(base_config());
    feed_tokens(sender, 4);
    sender.on_ack(ack_holding({0}), 200);
    CHECK(sender.unacked() == std::vector<TokenIndex>{1, 2, 3});

    CHECK(sender.on_ack(ack_holding({1, 2}), 300).empty());
    CHECK(sender.unacked() == std::vector<TokenIndex>{3});

    sender.on_ack(ack_holding({}), 350);
    CHECK(sender.unacked() == std::vector<TokenIndex>{3});
}

TEST_CASE("chatterbox finishes only once everything including EOS is acked") {
    ChatterboxSender sender(base_config());
    sender.on_token(make_token(0, 0), 0);
    sender.on_token(make_token(1, 100, /*eos=*/true), 100);
    CHECK_FALSE(sender.finished());
    sender.on_ack(ack_holding({0, 1, 2, 3}), 300); // superset is fine
    CHECK(sender.unacked().empty());
    CHECK(sender.finished());
}

TEST_CASE("chatterbox idle resend fires after the quiet interval") {
    ChatterboxSender sender(base_config());
    sender.on_token(make_token(0, 0), 0);
    sender.on_ack(ack_holding({0}), 150);

    // nothing unacked: no timer
    CHECK_FALSE(sender.next_timer_deadline().has_value());

    auto out = sender.on_token(make_token(1, 200), 200);
    REQUIRE(out.size() == 1);
    REQUIRE(sender.next_timer_deadline() == 400);

    CHECK(sender.on_timer(300).empty()); // too early
    auto resend = sender.on_timer(400);
    REQUIRE(resend.size() == 1);
    CHECK(resend[0].kind == PacketKind::IdleResend);
    CHECK(resend[0].token_indices == std::vector<TokenIndex>{1});
    CHECK(sender.next_timer_deadline() == 600); // re-armed
}

TEST_CASE("chatterbox idle resend carries up to capacity, earliest first") {
    ChatterboxSender sender(base_config());
    feed_tokens(sender, 15);
    auto out = sender.on_timer(1400 + 200);
    REQUIRE(out.size() == 1);
    const std::vector<TokenIndex> expected{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK(out[0].token_indices == expected);
}

TEST_CASE("receiver renders the contiguous prefix and acks the full set") {
    Receiver rx;
    Packet p0;
    p0.packet_id = 0;
    p0.token_indices = {0};
    auto [r0, a0] = rx.on_packet(p0, 200);
    REQUIRE(r0.size() == 1);
    CHECK(r0[0].index == 0);
    CHECK(a0.held_indices.to_vector() == std::vector<TokenIndex>{0});

    Packet p1;
    p1.packet_id = 1;
    p1.token_indices = {3, 1, 2};
    auto [r1, a1] = rx.on_packet(p1, 400);
    REQUIRE(r1.size() == 3);
    CHECK(r1[0].index == 1);
    CHECK(r1[2].index == 3);
    CHECK(r1[2].time == 400);
    CHECK(a1.held_indices.to_vector() == std::vector<TokenIndex>{0, 1, 2, 3});
    CHECK(a1.acked_packet_id == 1);

    // duplicate delivery: no renders, same held set
    auto [r2, a2] = rx.on_packet(p1, 500);
    CHECK(r2.empty());
    CHECK(a2.held_indices.to_vector() == std::vector<TokenIndex>{0, 1, 2, 3});
}

TEST_CASE("receiver does not render past a gap") {
    Receiver rx;
    Packet p0;
    p0.token_indices = {0};
    rx.on_packet(p0, 200);

    Packet p3;
    p3.packet_id = 7;
    p3.token_indices = {3};
    auto [renders, ack] = rx.on_packet(p3, 300);
    CHECK(renders.empty());
    CHECK(rx.rendered_prefix() == 1);
    CHECK(ack.held_indices.prefix() == 1);
    CHECK(ack.held_indices.extras() == std::vector<TokenIndex>{3});
}

TEST_CASE("tcp sender emits one packet per token") {
    TcpLikeSender sender(base_config());
    auto sent = feed_tokens(sender, 3);
    REQUIRE(sent.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(sent[i].token_indices == std::vector<TokenIndex>{i});
        CHECK(sent[i].kind == PacketKind::Initial);
        CHECK(sent[i].size_bytes == 68);
    }
    CHECK(sender.next_timer_deadline() == 1000); // armed at the first send
}

TEST_CASE("tcp fast retransmit triggers on the third gap report") {
    TcpLikeSender sender(base_config());
    feed_tokens(sender, 5);

    // token 1 lost; acks arrive for 0, then 2, 3, 4
    CHECK(sender.on_ack(ack_holding({0}), 400).empty());
    CHECK(sender.on_ack(ack_holding({0, 2}), 500).empty());
    CHECK(sender.on_ack(ack_holding({0, 2, 3}), 600).empty());
    auto out = sender.on_ack(ack_holding({0, 2, 3, 4}), 700);
    REQUIRE(out.size() == 1);
    CHECK(out[0].token_indices == std::vector<TokenIndex>{1});
    CHECK(out[0].kind == PacketKind::Retransmit);

    // counter was reset: three more duplicate reports, then it fires again
    CHECK(sender.on_ack(ack_holding({0, 2, 3, 4}), 800).empty());
    CHECK(sender.on_ack(ack_holding({0, 2, 3, 4}), 900).empty());
    CHECK(sender.on_ack(ack_holding({0, 2, 3, 4}), 1000).size() == 1);
}

TEST_CASE("single gapped ack leaves both missing tokens un-retransmitted") {
    TcpLikeSender sender(base_config());
    feed_tokens(sender, 3);
    auto out = sender.on_ack(ack_holding({2}), 600);
    CHECK(out.empty()); // one report each for 0 and 1, threshold not reached
    CHECK_FALSE(sender.finished());
}

TEST_CASE("tcp rto retransmits the earliest outstanding token with backoff") {
    SessionConfig cfg = base_config(); // rto base 1000
    TcpLikeSender sender(cfg);
    sender.on_token(make_token(0, 0), 0);
    REQUIRE(sender.next_timer_deadline() == 1000);

    auto out = sender.on_timer(1000);
    REQUIRE(out.size() == 1);
    CHECK(out[0].token_indices == std::vector<TokenIndex>{0});
    CHECK(out[0].kind == PacketKind::Retransmit);
    CHECK(sender.next_timer_deadline() == 3000); // 1000 + 2000
    CHECK(sender.rto_current_ms() == 2000);

    out = sender.on_timer(3000);
    REQUIRE(out.size() == 1);
    CHECK(sender.next_timer_deadline() == 7000); // 3000 + 4000
    CHECK(sender.rto_current_ms() == 4000);
}

TEST_CASE("rto backoff never exceeds the configured ceiling") {
    SessionConfig cfg = base_config(); // base 1000, max 8000
    TcpLikeSender sender(cfg);
    sender.on_token(make_token(0, 0), 0);
    SimTime t = 0;
    for (int i = 0; i < 10; ++i) {
        t = *sender.next_timer_deadline();
        sender.on_timer(t);
        CHECK(sender.rto_current_ms() <= 8000);
    }
    CHECK(sender.rto_current_ms() == 8000);
}

TEST_CASE("ack progress resets the rto backoff") {
    TcpLikeSender sender(base_config());
    feed_tokens(sender, 2);
    sender.on_timer(1000); // backoff to 2000
    CHECK(sender.rto_current_ms() == 2000);
    sender.on_ack(ack_holding({0}), 1200);
    CHECK(sender.rto_current_ms() == 1000);
    CHECK(sender.next_timer_deadline() == 2200);
}

TEST_CASE("ack covering everything disarms the rto") {
    TcpLikeSender sender(base_config());
    feed_tokens(sender, 2);
    auto out = sender.on_ack(ack_holding({0, 1}), 500);
    CHECK(out.empty());
    CHECK_FALSE(sender.next_timer_deadline().has_value());
}

TEST_CASE("tcp finishes only after the eos token is acked") {
    TcpLikeSender sender(base_config());
    sender.on_token(make_token(0, 0), 0);
    sender.on_token(make_token(1, 100, /*eos=*/true), 100);
    sender.on_ack(ack_holding({0}), 400);
    CHECK_FALSE(sender.finished());
    sender.on_ack(ack_holding({0, 1}), 500);
    CHECK(sender.finished());
}

TEST_CASE("duplication wraps every emission in K copies") {
    SessionConfig cfg = base_config();
    DuplicationSender sender(std::make_unique<TcpLikeSender>(cfg), 2);

    auto out = sender.on_token(make_token(0, 0), 0);
    REQUIRE(out.size() == 2);
    CHECK(out[0].token_indices == out[1].token_indices);
    CHECK(out[0].packet_id != out[1].packet_id);
    CHECK(out[0].send_time == out[1].send_time);
    CHECK(out[0].kind == PacketKind::Initial);
    CHECK(out[1].kind == PacketKind::Duplicate);

    // retransmissions are duplicated as well
    auto rto = sender.on_timer(1000);
    REQUIRE(rto.size() == 2);
    CHECK(rto[0].kind == PacketKind::Retransmit);
    CHECK(rto[1].kind == PacketKind::Duplicate);
}

TEST_CASE("duplication factor below two is rejected") {
    SessionConfig cfg = base_config();
    CHECK_THROWS_AS(DuplicationSender(std::make_unique<TcpLikeSender>(cfg), 1),
                    std::invalid_argument);
}

TEST_CASE("sender factory builds the configured scheme") {
    SessionConfig cfg = base_config();
    cfg.protocol = Protocol::Duplication;
    cfg.dup_factor = 3;
    auto sender = make_sender(cfg);
    auto out = sender->on_token(make_token(0, 0), 0);
    CHECK(out.size() == 3);
}

TEST_SUITE_END();
