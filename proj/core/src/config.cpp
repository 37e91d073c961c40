#include "chattersim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chattersim {

namespace {

void check_prob(std::vector<std::string>& errors, double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        errors.push_back(std::string(name) + " out of [0,1]");
    }
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::int64_t to_i64(const ConfigKv& kv) {
    try {
        std::size_t pos = 0;
        std::int64_t v = std::stoll(kv.value, &pos);
        if (pos != kv.value.size()) throw std::invalid_argument("trailing chars");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config line " + std::to_string(kv.line) + ": '" + kv.key +
                                 "' expects an integer, got '" + kv.value + "'");
    }
}

double to_f64(const ConfigKv& kv) {
    try {
        std::size_t pos = 0;
        double v = std::stod(kv.value, &pos);
        if (pos != kv.value.size()) throw std::invalid_argument("trailing chars");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config line " + std::to_string(kv.line) + ": '" + kv.key +
                                 "' expects a number, got '" + kv.value + "'");
    }
}

bool to_bool(const ConfigKv& kv) {
    if (kv.value == "true" || kv.value == "1") return true;
    if (kv.value == "false" || kv.value == "0") return false;
    throw std::runtime_error("config line " + std::to_string(kv.line) + ": '" + kv.key +
                             "' expects true/false, got '" + kv.value + "'");
}

} // namespace

ConfigValidation validate_config(const SessionConfig& cfg) {
    ConfigValidation out;
    out.config = cfg;
    auto& errors = out.errors;

    if (cfg.token_gap_ms <= 0) {
        errors.push_back("token_gap_ms must be positive");
    }
    if (cfg.session_len_ms <= 0) {
        errors.push_back("session_len_ms must be positive");
    }
    if (cfg.n_tokens < 0) {
        errors.push_back("n_tokens must be non-negative");
    }
    if (cfg.rtt_ms < 0) {
        errors.push_back("rtt_ms must be non-negative");
    }
    if (cfg.rtt_ms % 2 != 0) {
        errors.push_back("rtt must be even");
    }
    if (cfg.packet_token_capacity < 1) {
        errors.push_back("packet_token_capacity must be at least 1");
    }
    if (cfg.header_bytes < 0) {
        errors.push_back("header_bytes must be non-negative");
    }
    if (cfg.token_payload_bytes <= 0) {
        errors.push_back("token_payload_bytes must be positive");
    }
    if (cfg.stall_threshold_ms < 0) {
        errors.push_back("stall_threshold_ms must be non-negative");
    }
    if (cfg.late_threshold_ms < 0) {
        errors.push_back("late_threshold_ms must be non-negative");
    }
    if (cfg.idle_resend_ms <= 0) {
        errors.push_back("idle_resend_ms must be positive");
    }
    check_prob(errors, cfg.markov.stay_good, "p");
    check_prob(errors, cfg.markov.stay_lossy, "q");
    check_prob(errors, cfg.markov.loss_prob_lossy, "loss_prob_lossy");
    if (cfg.markov.state_slot_ms <= 0) {
        errors.push_back("state_slot_ms must be positive");
    }
    if (cfg.protocol == Protocol::Duplication && (cfg.dup_factor < 2 || cfg.dup_factor > 5)) {
        errors.push_back("dup_factor out of {2,3,4,5}");
    }
    if (cfg.channel == ChannelKind::Trace && cfg.trace_path.empty()) {
        errors.push_back("trace_path required for trace channel");
    }
    if (cfg.rto_base_ms < 0) {
        errors.push_back("rto_base_ms must be non-negative");
    }
    if (cfg.rto_max_ms < 0) {
        errors.push_back("rto_max_ms must be non-negative");
    }
    if (cfg.rto_backoff < 1) {
        errors.push_back("rto_backoff must be at least 1");
    }
    if (cfg.fast_retransmit_threshold < 1) {
        errors.push_back("fast_retransmit_threshold must be at least 1");
    }
    for (std::size_t i = 1; i < cfg.custom_gen_times.size(); ++i) {
        if (cfg.custom_gen_times[i] <= cfg.custom_gen_times[i - 1]) {
            errors.push_back("custom_gen_times must be strictly increasing");
            break;
        }
    }
    if (!cfg.custom_gen_times.empty() && cfg.custom_gen_times.front() < 0) {
        errors.push_back("custom_gen_times must be non-negative");
    }

    if (!errors.empty()) {
        return out;
    }

    // Normalize sentinels. Running validation again is a no-op.
    auto& c = out.config;
    if (!c.custom_gen_times.empty()) {
        c.n_tokens = static_cast<std::int64_t>(c.custom_gen_times.size());
    } else if (c.n_tokens == 0) {
        c.n_tokens = c.session_len_ms / c.token_gap_ms;
        if (c.n_tokens == 0) {
            errors.push_back("session shorter than one token gap");
            return out;
        }
    }
    if (c.rto_base_ms == 0) {
        c.rto_base_ms = 2 * c.rtt_ms + 200;
    }
    if (c.rto_max_ms == 0) {
        c.rto_max_ms = 8 * c.rto_base_ms;
    }
    c.rto_max_ms = std::max(c.rto_max_ms, c.rto_base_ms);
    return out;
}

std::string protocol_name(Protocol protocol, int dup_factor) {
    switch (protocol) {
    case Protocol::Chatterbox: return "chatterbox";
    case Protocol::TcpLike: return "tcp";
    case Protocol::Duplication: return "dup" + std::to_string(dup_factor);
    }
    return "unknown";
}

std::string protocol_name(const SessionConfig& cfg) {
    return protocol_name(cfg.protocol, cfg.dup_factor);
}

std::optional<std::pair<Protocol, int>> parse_protocol(const std::string& name) {
    if (name == "chatterbox") {
        return std::make_pair(Protocol::Chatterbox, 0);
    }
    if (name == "tcp" || name == "tcp_like") {
        return std::make_pair(Protocol::TcpLike, 0);
    }
    if (name == "duplication") {
        return std::make_pair(Protocol::Duplication, 0);
    }
    if (name.size() == 4 && name.rfind("dup", 0) == 0 && name[3] >= '2' && name[3] <= '9') {
        return std::make_pair(Protocol::Duplication, name[3] - '0');
    }
    return std::nullopt;
}

std::vector<ConfigKv> parse_kv_stream(std::istream& in) {
    std::vector<ConfigKv> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected 'key = value'");
        }
        ConfigKv kv;
        kv.key = trim(t.substr(0, eq));
        kv.value = trim(t.substr(eq + 1));
        kv.line = lineno;
        if (kv.key.empty()) {
            throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
        }
        out.push_back(std::move(kv));
    }
    return out;
}

std::vector<ConfigKv> load_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path);
    }
    return parse_kv_stream(in);
}

std::vector<ConfigKv> apply_config_kv(SessionConfig& cfg, const std::vector<ConfigKv>& kv) {
    std::vector<ConfigKv> rest;
    for (const auto& e : kv) {
        if (e.key == "protocol") {
            auto p = parse_protocol(e.value);
            if (!p) {
                throw std::runtime_error("config line " + std::to_string(e.line) +
                                         ": unknown protocol '" + e.value + "'");
            }
            cfg.protocol = p->first;
            if (p->second > 0) cfg.dup_factor = p->second;
        } else if (e.key == "dup_factor") {
            cfg.dup_factor = static_cast<int>(to_i64(e));
        } else if (e.key == "token_gap_ms") {
            cfg.token_gap_ms = to_i64(e);
        } else if (e.key == "session_len_ms") {
            cfg.session_len_ms = to_i64(e);
        } else if (e.key == "n_tokens") {
            cfg.n_tokens = to_i64(e);
        } else if (e.key == "rtt_ms") {
            cfg.rtt_ms = to_i64(e);
        } else if (e.key == "packet_token_capacity") {
            cfg.packet_token_capacity = static_cast<int>(to_i64(e));
        } else if (e.key == "header_bytes") {
            cfg.header_bytes = to_i64(e);
        } else if (e.key == "token_payload_bytes") {
            cfg.token_payload_bytes = to_i64(e);
        } else if (e.key == "stall_threshold_ms") {
            cfg.stall_threshold_ms = to_i64(e);
        } else if (e.key == "late_threshold_ms") {
            cfg.late_threshold_ms = to_i64(e);
        } else if (e.key == "idle_resend_ms") {
            cfg.idle_resend_ms = to_i64(e);
        } else if (e.key == "channel") {
            if (e.value == "markov") {
                cfg.channel = ChannelKind::Markov;
            } else if (e.value == "trace") {
                cfg.channel = ChannelKind::Trace;
            } else {
                throw std::runtime_error("config line " + std::to_string(e.line) +
                                         ": unknown channel '" + e.value + "'");
            }
        } else if (e.key == "p") {
            cfg.markov.stay_good = to_f64(e);
        } else if (e.key == "q") {
            cfg.markov.stay_lossy = to_f64(e);
        } else if (e.key == "loss_prob_lossy") {
            cfg.markov.loss_prob_lossy = to_f64(e);
        } else if (e.key == "state_slot_ms") {
            cfg.markov.state_slot_ms = to_i64(e);
        } else if (e.key == "trace_path") {
            cfg.trace_path = e.value;
        } else if (e.key == "loop_trace") {
            cfg.loop_trace = to_bool(e);
        } else if (e.key == "ack_path_lossy") {
            cfg.ack_path_lossy = to_bool(e);
        } else if (e.key == "rto_base_ms") {
            cfg.rto_base_ms = to_i64(e);
        } else if (e.key == "rto_max_ms") {
            cfg.rto_max_ms = to_i64(e);
        } else if (e.key == "rto_backoff") {
            cfg.rto_backoff = static_cast<int>(to_i64(e));
        } else if (e.key == "fast_retransmit_threshold") {
            cfg.fast_retransmit_threshold = static_cast<int>(to_i64(e));
        } else if (e.key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(to_i64(e));
        } else {
            rest.push_back(e);
        }
    }
    return rest;
}

std::string write_config(const SessionConfig& cfg) {
    std::ostringstream out;
    out << "protocol = " << protocol_name(cfg) << '\n';
    out << "dup_factor = " << cfg.dup_factor << '\n';
    out << "token_gap_ms = " << cfg.token_gap_ms << '\n';
    out << "session_len_ms = " << cfg.session_len_ms << '\n';
    out << "n_tokens = " << cfg.n_tokens << '\n';
    out << "rtt_ms = " << cfg.rtt_ms << '\n';
    out << "packet_token_capacity = " << cfg.packet_token_capacity << '\n';
    out << "header_bytes = " << cfg.header_bytes << '\n';
    out << "token_payload_bytes = " << cfg.token_payload_bytes << '\n';
    out << "stall_threshold_ms = " << cfg.stall_threshold_ms << '\n';
    out << "late_threshold_ms = " << cfg.late_threshold_ms << '\n';
    out << "idle_resend_ms = " << cfg.idle_resend_ms << '\n';
    out << "channel = " << (cfg.channel == ChannelKind::Markov ? "markov" : "trace") << '\n';
    out << "p = " << fmt_double(cfg.markov.stay_good) << '\n';
    out << "q = " << fmt_double(cfg.markov.stay_lossy) << '\n';
    out << "loss_prob_lossy = " << fmt_double(cfg.markov.loss_prob_lossy) << '\n';
    out << "state_slot_ms = " << cfg.markov.state_slot_ms << '\n';
    if (!cfg.trace_path.empty()) {
        out << "trace_path = " << cfg.trace_path << '\n';
    }
    out << "loop_trace = " << (cfg.loop_trace ? "true" : "false") << '\n';
    out << "ack_path_lossy = " << (cfg.ack_path_lossy ? "true" : "false") << '\n';
    out << "rto_base_ms = " << cfg.rto_base_ms << '\n';
    out << "rto_max_ms = " << cfg.rto_max_ms << '\n';
    out << "rto_backoff = " << cfg.rto_backoff << '\n';
    out << "fast_retransmit_threshold = " << cfg.fast_retransmit_threshold << '\n';
    out << "seed = " << cfg.seed << '\n';
    return out.str();
}

} // namespace chattersim
