#pragma once

#include "chattersim/channel.hpp"
#include "chattersim/config.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace chattersim {

/// Loss-trace CSV: UTF-8, header `seq,lost`, one row per transmitted
/// packet, seq contiguous from 0, lost in {0,1}.
///
/// Throws std::runtime_error with the offending line number on malformed
/// input.
LossTrace parse_loss_trace(std::istream& in);
LossTrace load_loss_trace(const std::string& path);

void write_loss_trace(const LossTrace& trace, std::ostream& out);
void save_loss_trace(const LossTrace& trace, const std::string& path);

/// Draws n outcomes from a Markov channel sampled at its slot spacing.
/// Same (params, n, seed) always yields the same trace.
LossTrace synthesize_trace(const MarkovParams& params, std::size_t n, std::uint64_t seed);

} // namespace chattersim
