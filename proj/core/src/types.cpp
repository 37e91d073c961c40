#include "chattersim/types.hpp"

#include <algorithm>

namespace chattersim {

std::string to_string(PacketKind kind) {
    switch (kind) {
    case PacketKind::Initial: return "initial";
    case PacketKind::Retransmit: return "retransmit";
    case PacketKind::Duplicate: return "duplicate";
    case PacketKind::IdleResend: return "idle_resend";
    }
    return "unknown";
}

bool IndexSet::contains(TokenIndex idx) const {
    if (idx < prefix_) {
        return true;
    }
    return std::binary_search(extras_.begin(), extras_.end(), idx);
}

bool IndexSet::insert(TokenIndex idx) {
    if (idx < prefix_) {
        return false;
    }
    if (idx == prefix_) {
        ++prefix_;
        // absorb extras that now continue the prefix
        auto it = extras_.begin();
        while (it != extras_.end() && *it == prefix_) {
            ++prefix_;
            ++it;
        }
        extras_.erase(extras_.begin(), it);
        return true;
    }
    auto it = std::lower_bound(extras_.begin(), extras_.end(), idx);
    if (it != extras_.end() && *it == idx) {
        return false;
    }
    extras_.insert(it, idx);
    return true;
}

std::optional<TokenIndex> IndexSet::max_index() const {
    if (!extras_.empty()) {
        return extras_.back();
    }
    if (prefix_ > 0) {
        return prefix_ - 1;
    }
    return std::nullopt;
}

std::vector<TokenIndex> IndexSet::to_vector() const {
    std::vector<TokenIndex> out;
    out.reserve(size());
    for (TokenIndex i = 0; i < prefix_; ++i) {
        out.push_back(i);
    }
    out.insert(out.end(), extras_.begin(), extras_.end());
    return out;
}

OverflowDiagnosis overflow_condition(std::int64_t gap_ms, std::int64_t capacity_tokens,
                                     std::int64_t rtt_ms, std::int64_t loss_ms) {
    OverflowDiagnosis d;
    d.lhs_ms = gap_ms * (capacity_tokens - 1);
    d.rhs_ms = 2 * rtt_ms + loss_ms;
    d.holds = d.lhs_ms <= d.rhs_ms;
    return d;
}

} // namespace chattersim
