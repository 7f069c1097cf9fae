#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "bordepth/config.hpp"
#include "bordepth/harness.hpp"
#include "bordepth/synthetic.hpp"

namespace bordepth::cli {

/// Where benchmark data comes from: files when data.dir / data.tools is set, otherwise
/// a synthetic benchmark generated in memory from the synth.* keys.
struct DataSettings {
    std::string preset = "strong";
    SyntheticSpec synth = synthetic_preset("strong");
    std::uint64_t synth_seed = 7;

    std::filesystem::path tools;
    std::filesystem::path queries;
    std::filesystem::path scores;
    /// auto: the score file when there is one, BM25 otherwise.
    std::string scorer = "auto";
    Bm25Params bm25;

    [[nodiscard]] bool from_files() const { return !tools.empty(); }
};

struct Settings {
    DataSettings data;
    ExperimentSpec experiment;
    /// eval: load learned policies from here instead of training.
    std::filesystem::path policy_dir;
    bool shortlists = false;
};

/// Throws ConfigError on unknown keys or bad values.
[[nodiscard]] Settings parse_settings(const Config& config);

/// Loads or generates the benchmark and returns it with full-registry scores.
[[nodiscard]] std::pair<Benchmark, ScoreMap> load_data(const DataSettings& data);

/// The config echoed into manifest.cfg: the user's keys with paths made absolute,
/// plus explicit seeds.
[[nodiscard]] Config manifest_config(const Config& config);

}  // namespace bordepth::cli
