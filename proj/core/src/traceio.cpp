#include "chattersim/traceio.hpp"

#include "chattersim/rng.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace chattersim {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
    throw std::runtime_error(what + " (line " + std::to_string(line) + ")");
}

} // namespace

LossTrace parse_loss_trace(std::istream& in) {
    std::string line;
    int lineno = 0;

    if (!std::getline(in, line)) {
        throw std::runtime_error("empty trace");
    }
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "seq,lost") {
        parse_fail(lineno, "expected header 'seq,lost'");
    }

    LossTrace trace;
    std::int64_t expected_seq = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            parse_fail(lineno, "expected 'seq,lost' row");
        }
        const std::string seq_str = line.substr(0, comma);
        const std::string lost_str = line.substr(comma + 1);

        std::int64_t seq = 0;
        try {
            std::size_t pos = 0;
            seq = std::stoll(seq_str, &pos);
            if (pos != seq_str.size()) throw std::invalid_argument("trailing chars");
        } catch (const std::exception&) {
            parse_fail(lineno, "seq must be an integer");
        }
        if (seq != expected_seq) {
            parse_fail(lineno, "seq must be contiguous from 0, expected " +
                                   std::to_string(expected_seq));
        }
        ++expected_seq;

        if (lost_str == "0") {
            trace.outcomes.push_back(false);
        } else if (lost_str == "1") {
            trace.outcomes.push_back(true);
        } else {
            parse_fail(lineno, "lost must be 0 or 1");
        }
    }
    if (trace.outcomes.empty()) {
        throw std::runtime_error("empty trace");
    }
    return trace;
}

LossTrace load_loss_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open trace file: " + path);
    }
    return parse_loss_trace(in);
}

void write_loss_trace(const LossTrace& trace, std::ostream& out) {
    out << "seq,lost\n";
    for (std::size_t i = 0; i < trace.outcomes.size(); ++i) {
        out << i << ',' << (trace.outcomes[i] ? '1' : '0') << '\n';
    }
}

void save_loss_trace(const LossTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write trace file: " + path);
    }
    write_loss_trace(trace, out);
}

LossTrace synthesize_trace(const MarkovParams& params, std::size_t n, std::uint64_t seed) {
    LossTrace trace;
    trace.outcomes.reserve(n);
    Rng rng(Rng::derive(seed, 0));
    MarkovChannel channel(params, /*one_way_delay_ms=*/0);
    Packet probe;
    for (std::size_t i = 0; i < n; ++i) {
        const SimTime now = static_cast<SimTime>(i) * params.state_slot_ms;
        const DeliveryOutcome outcome = channel.transmit(probe, now, rng);
        trace.outcomes.push_back(!outcome.delivered);
    }
    return trace;
}

} // namespace chattersim
