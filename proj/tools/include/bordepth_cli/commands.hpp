#pragma once

#include <filesystem>
#include <iosfwd>

#include "bordepth/config.hpp"

namespace bordepth::cli {

// Each command reads the full configuration, writes its artifacts and a
// manifest.cfg into `out`, and reports progress on `log`.
// They throw ConfigError / DataError / TrainingError; exit_code() maps those.

void synth(const Config& config, const std::filesystem::path& out, std::ostream& log);
void score(const Config& config, const std::filesystem::path& out, std::ostream& log);
void train(const Config& config, const std::filesystem::path& out, std::ostream& log);
void eval(const Config& config, const std::filesystem::path& out, std::ostream& log);
/// Returns the number of failed cells; failures do not stop the other cells.
std::size_t sweep(const Config& config, const std::filesystem::path& out, std::ostream& log);

/// 1 config/usage, 2 data or I/O, 3 training/numeric. `run` returns 4 when sweep cells failed.
[[nodiscard]] int exit_code(const std::exception& e);

/// Full command line: `bordepth <command> [--config FILE] [--out DIR] [--set key=value]... [--jobs N]`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bordepth::cli
