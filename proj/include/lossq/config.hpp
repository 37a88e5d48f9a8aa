#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lossq/packetization.hpp"
#include "lossq/service.hpp"
#include "lossq/simulator.hpp"

namespace lossq {

enum class Command { analyze, simulate, asymptote, redundancy, compare, echo };
enum class Format { csv, json };

const char* to_string(Command command);
const char* to_string(Format format);
Command parse_command(const std::string& text);
Format parse_format(const std::string& text);

struct ModelBlock {
    double lambda = 1.0;
    ServiceDistribution service = ServiceDistribution::exponential(1.0);
    int buffer = 1;  // N
    PacketLaw nu = PacketLaw::constant(1);
    double p = 0.0;

    bool operator==(const ModelBlock&) const = default;
};

struct CommandBlock {
    Command name = Command::analyze;
    std::uint64_t seed = 1;
    int replications = 4;
    std::int64_t n_busy_periods = 100000;
    std::int64_t event_cap = 1'000'000'000;  // events per busy cycle before a runaway error
    ZetaMode zeta_mode = ZetaMode::iid_per_arrival;
    unsigned threads = 0;
    std::vector<int> k_range{0, 1, 2, 3};
    double q = 0.0;
    int l = 1;
    std::optional<int> recover_threshold;
    double heavy_traffic_eps = 0.1;
    double zero_c = 0.05;

    bool operator==(const CommandBlock&) const = default;
};

struct OutputBlock {
    std::string path = "-";  // "-" is standard output
    Format format = Format::csv;

    bool operator==(const OutputBlock&) const = default;
};

struct RunConfig {
    ModelBlock model;
    CommandBlock command;
    OutputBlock output;

    bool operator==(const RunConfig&) const = default;
};

// Sectioned key = value text: [model], [command], [output]; '#' starts a comment.
// Errors carry the line number and the dotted field path.
RunConfig parse_config(std::string_view text);

// Canonical text form; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

}  // namespace lossq
