#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lossq/cli.hpp"

namespace {

int code(lossq::ExitCode c) { return static_cast<int>(c); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lossq: loss probability in finite-buffer single-server queues"};
    std::string command;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    app.add_option("command", command, "analyze | simulate | asymptote | redundancy | compare | echo")->required();
    app.add_option("--config", config_path, "configuration file")->required();
    app.add_option("--seed", seed, "override command.seed");
    app.add_option("--out", out, "output path, - for stdout");
    app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return code(lossq::ExitCode::usage);
    }

    try {
        lossq::RunConfig cfg;
        lossq::Command cmd;
        try {
            cmd = lossq::parse_command(command);
        } catch (const lossq::Error& e) {
            throw lossq::UsageError(e.what());
        }
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw lossq::UsageError("cannot read config file '" + config_path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        try {
            cfg = lossq::parse_config(text.str());
        } catch (const lossq::ValidationError& e) {
            throw lossq::ValidationError(config_path + ": " + e.what());
        }
        cfg.command.name = cmd;
        if (seed) cfg.command.seed = *seed;
        if (out) cfg.output.path = *out;
        if (format) cfg.output.format = lossq::parse_format(*format);

        const auto result = lossq::execute(cfg);
        lossq::write_outputs(cfg, result);
        if (!result.message.empty()) std::cerr << result.message << (result.message.back() == '\n' ? "" : "\n");
        return code(result.exit_code);
    } catch (const lossq::Error& e) {
        std::cerr << "lossq: " << e.what() << "\n";
        return code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "lossq: internal error: " << e.what() << "\n";
        return code(lossq::ExitCode::validation);
    }
}
