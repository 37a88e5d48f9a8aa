#pragma once

#include <string>
#include <vector>

#include "lossq/config.hpp"
#include "lossq/error.hpp"

namespace lossq {

struct Artifact {
    std::string path;
    std::string content;
};

struct Execution {
    ExitCode exit_code = ExitCode::ok;
    // The main document, bound for config.output.path.
    std::string document;
    // Extra files, e.g. the simulation summary next to the CSV.
    std::vector<Artifact> side_files;
    // Human-readable status for stderr.
    std::string message;
};

// Runs the configured command. Library errors propagate as lossq::Error.
Execution execute(const RunConfig& config);

// Writes the document and side files; "-" is standard output, and a side file
// bound to "-" goes to standard error. Throws UsageError when a path cannot be written.
void write_outputs(const RunConfig& config, const Execution& execution);

}  // namespace lossq
