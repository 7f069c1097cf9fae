#include <array>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bordepth/errors.hpp"
#include "bordepth_cli/commands.hpp"

namespace bordepth::cli {

namespace {

struct Command {
    std::string_view name;
    std::string_view help;
};

constexpr std::array<Command, 5> kCommands{{
    {"synth", "Generate a synthetic benchmark (tools, queries, scores)"},
    {"score", "Score a benchmark's queries with BM25"},
    {"train", "Train depth policies and write policy files"},
    {"eval", "Train (or load) policies and write evaluation reports"},
    {"sweep", "Evaluate every cell of a sweep.* grid"},
}};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Learned retrieval depth for tool selection", "bordepth"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "bordepth 0.3.0");

    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    std::size_t jobs = 0;
    for (const auto& c : kCommands) {
        auto* sub = app.add_subcommand(std::string(c.name), std::string(c.help));
        sub->add_option("-c,--config", config_path, "Config file (key = value lines)")
            ->check(CLI::ExistingFile);
        sub->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
        sub->add_option("-s,--set", overrides, "Override a config key: key=value (repeatable)");
        sub->add_option("-j,--jobs", jobs, "Worker threads (overrides the jobs key)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        Config config = config_path.empty() ? Config{} : Config::load(config_path);
        for (const auto& o : overrides) {
            config.apply(o);
        }
        if (jobs > 0) {
            config.set("jobs", std::to_string(jobs));
        }
        const std::filesystem::path out_path(out_dir);
        if (app.got_subcommand("synth")) {
            synth(config, out_path, out);
        } else if (app.got_subcommand("score")) {
            score(config, out_path, out);
        } else if (app.got_subcommand("train")) {
            train(config, out_path, out);
        } else if (app.got_subcommand("eval")) {
            eval(config, out_path, out);
        } else if (sweep(config, out_path, out) > 0) {
            err << "bordepth: some sweep cells failed, see failures.txt\n";
            return 4;
        }
    } catch (const std::exception& e) {
        err << "bordepth: error: " << e.what() << '\n';
        return exit_code(e);
    }
    return 0;
}

}  // namespace bordepth::cli
