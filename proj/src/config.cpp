#include "lossq/config.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "lossq/error.hpp"
#include "lossq/report.hpp"

namespace lossq {
namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double to_real(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size() || !std::isfinite(v)) throw ValidationError("expected a real number, got '" + s + "'");
    return v;
}

long long to_integer(const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size()) throw ValidationError("expected an integer, got '" + s + "'");
    return v;
}

int to_int(const std::string& s, long long lo, long long hi) {
    const long long v = to_integer(s);
    if (v < lo || v > hi)
        throw ValidationError("integer " + s + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

std::vector<int> to_k_range(const std::string& s) {
    std::vector<int> out;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        const int a = to_int(trim(s.substr(0, dots)), 0, 1000000);
        const int b = to_int(trim(s.substr(dots + 2)), 0, 1000000);
        if (b < a) throw ValidationError("empty range '" + s + "'");
        for (int k = a; k <= b; ++k) out.push_back(k);
    } else {
        for (const auto& tok : split_list(s)) out.push_back(to_int(tok, 0, 1000000));
    }
    if (out.empty()) throw ValidationError("k_range must not be empty");
    return out;
}

PacketLaw to_packet_law(const std::string& s) {
    std::vector<std::pair<int, double>> pairs;
    for (const auto& tok : split_list(s)) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos) throw ValidationError("expected packets:prob, got '" + tok + "'");
        pairs.emplace_back(to_int(tok.substr(0, colon), 1, 1000000), to_real(tok.substr(colon + 1)));
    }
    return PacketLaw::from_pairs(pairs);
}

std::string join_k(const std::vector<int>& ks) {
    std::string out;
    for (std::size_t i = 0; i < ks.size(); ++i) out += (i ? "," : "") + std::to_string(ks[i]);
    return out;
}

std::string packet_text(const PacketLaw& nu) {
    std::string out;
    for (const auto& [v, p] : nu.pairs()) out += (out.empty() ? "" : " ") + std::to_string(v) + ":" + format_double(p);
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"model.lambda",
         [](RunConfig& c, const std::string& v) {
             c.model.lambda = to_real(v);
             if (!(c.model.lambda > 0.0)) throw ValidationError("must be > 0");
         }},
        {"model.service", [](RunConfig& c, const std::string& v) { c.model.service = parse_service(v); }},
        {"model.N", [](RunConfig& c, const std::string& v) { c.model.buffer = to_int(v, 1, 100000000); }},
        {"model.nu", [](RunConfig& c, const std::string& v) { c.model.nu = to_packet_law(v); }},
        {"model.p",
         [](RunConfig& c, const std::string& v) {
             c.model.p = to_real(v);
             if (!(c.model.p >= 0.0 && c.model.p <= 1.0)) throw ValidationError("must lie in [0, 1]");
         }},
        {"command.name", [](RunConfig& c, const std::string& v) { c.command.name = parse_command(v); }},
        {"command.seed",
         [](RunConfig& c, const std::string& v) {
             std::size_t used = 0;
             unsigned long long s = 0;
             try {
                 s = std::stoull(v, &used);
             } catch (const std::exception&) {
                 used = 0;
             }
             if (v.empty() || used != v.size() || v[0] == '-') throw ValidationError("expected a 64-bit unsigned seed");
             c.command.seed = s;
         }},
        {"command.replications",
         [](RunConfig& c, const std::string& v) { c.command.replications = to_int(v, 1, 1000000); }},
        {"command.n_busy_periods",
         [](RunConfig& c, const std::string& v) {
             c.command.n_busy_periods = to_integer(v);
             if (c.command.n_busy_periods < 1) throw ValidationError("must be >= 1");
         }},
        {"command.event_cap",
         [](RunConfig& c, const std::string& v) {
             c.command.event_cap = to_integer(v);
             if (c.command.event_cap < 1) throw ValidationError("must be >= 1");
         }},
        {"command.zeta_mode", [](RunConfig& c, const std::string& v) { c.command.zeta_mode = parse_zeta_mode(v); }},
        {"command.threads",
         [](RunConfig& c, const std::string& v) { c.command.threads = static_cast<unsigned>(to_int(v, 0, 4096)); }},
        {"command.k_range", [](RunConfig& c, const std::string& v) { c.command.k_range = to_k_range(v); }},
        {"command.q",
         [](RunConfig& c, const std::string& v) {
             c.command.q = to_real(v);
             if (!(c.command.q >= 0.0 && c.command.q <= 1.0)) throw ValidationError("must lie in [0, 1]");
         }},
        {"command.l", [](RunConfig& c, const std::string& v) { c.command.l = to_int(v, 1, 1000000); }},
        {"command.recover_threshold",
         [](RunConfig& c, const std::string& v) { c.command.recover_threshold = to_int(v, 0, 1000000); }},
        {"command.heavy_traffic_eps",
         [](RunConfig& c, const std::string& v) {
             c.command.heavy_traffic_eps = to_real(v);
             if (!(c.command.heavy_traffic_eps >= 0.0)) throw ValidationError("must be >= 0");
         }},
        {"command.zero_c",
         [](RunConfig& c, const std::string& v) {
             c.command.zero_c = to_real(v);
             if (!(c.command.zero_c >= 0.0)) throw ValidationError("must be >= 0");
         }},
        {"output.path",
         [](RunConfig& c, const std::string& v) {
             if (v.empty()) throw ValidationError("must not be empty");
             c.output.path = v;
         }},
        {"output.format", [](RunConfig& c, const std::string& v) { c.output.format = parse_format(v); }},
    };
    return table;
}

}  // namespace

const char* to_string(Command command) {
    switch (command) {
        case Command::analyze: return "analyze";
        case Command::simulate: return "simulate";
        case Command::asymptote: return "asymptote";
        case Command::redundancy: return "redundancy";
        case Command::compare: return "compare";
        case Command::echo: return "echo";
    }
    return "?";
}

const char* to_string(Format format) { return format == Format::csv ? "csv" : "json"; }

Command parse_command(const std::string& text) {
    for (Command c : {Command::analyze, Command::simulate, Command::asymptote, Command::redundancy, Command::compare,
                      Command::echo})
        if (text == to_string(c)) return c;
    throw ValidationError("unknown command '" + text + "'");
}

Format parse_format(const std::string& text) {
    if (text == "csv") return Format::csv;
    if (text == "json") return Format::json;
    throw ValidationError("unknown format '" + text + "' (csv | json)");
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::string section;
    std::set<std::string> seen;
    std::map<std::string, int> line_of;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError(where + "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "model" && section != "command" && section != "output")
                throw ValidationError(where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError(where + "expected key = value");
        if (section.empty()) throw ValidationError(where + "key outside of any section");
        const std::string field = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(field);
        if (it == setters().end()) throw ValidationError(where + "unknown key " + field);
        if (!seen.insert(field).second) throw ValidationError(where + field + ": duplicate key");
        line_of[field] = line_no;
        try {
            it->second(cfg, value);
        } catch (const ValidationError& e) {
            throw ValidationError(where + field + ": " + e.what());
        }
    }
    for (const char* required : {"model.lambda", "model.service", "model.N"})
        if (!seen.count(required)) throw ValidationError(std::string("missing required key ") + required);

    // Cross-field constraints.
    if (cfg.model.buffer < cfg.model.nu.lower()) {
        const std::string where = "line " + std::to_string(line_of["model.N"]) + ": ";
        throw ValidationError(where + "model.N: buffer of " + std::to_string(cfg.model.buffer) +
                              " packets cannot hold a message of " + std::to_string(cfg.model.nu.lower()) +
                              " packets (model.nu)");
    }
    return cfg;
}

std::string emit_config(const RunConfig& c) {
    std::ostringstream os;
    os << "[model]\n";
    os << "lambda = " << format_double(c.model.lambda) << "\n";
    os << "service = " << c.model.service.describe() << "\n";
    os << "N = " << c.model.buffer << "\n";
    os << "nu = " << packet_text(c.model.nu) << "\n";
    os << "p = " << format_double(c.model.p) << "\n";
    os << "\n[command]\n";
    os << "name = " << to_string(c.command.name) << "\n";
    os << "seed = " << c.command.seed << "\n";
    os << "replications = " << c.command.replications << "\n";
    os << "n_busy_periods = " << c.command.n_busy_periods << "\n";
    os << "event_cap = " << c.command.event_cap << "\n";
    os << "zeta_mode = " << to_string(c.command.zeta_mode) << "\n";
    os << "threads = " << c.command.threads << "\n";
    os << "k_range = " << join_k(c.command.k_range) << "\n";
    os << "q = " << format_double(c.command.q) << "\n";
    os << "l = " << c.command.l << "\n";
    if (c.command.recover_threshold) os << "recover_threshold = " << *c.command.recover_threshold << "\n";
    os << "heavy_traffic_eps = " << format_double(c.command.heavy_traffic_eps) << "\n";
    os << "zero_c = " << format_double(c.command.zero_c) << "\n";
    os << "\n[output]\n";
    os << "path = " << c.output.path << "\n";
    os << "format = " << to_string(c.output.format) << "\n";
    return os.str();
}

}  // namespace lossq
