#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "bordepth/dataset.hpp"

namespace bordepth {

/// Desk-scale stand-in for a scored tool-selection benchmark.
///
/// Each query's gold rank is 1 with probability `found_at_1`, otherwise
/// 1 + Geometric(rank_tail) on {1, 2, ...}, capped at N. The ranked score list
/// is a decreasing curve a * exp(-(i-1)/tau) plus Gaussian noise, sorted, with
/// the gold tool placed at its sampled rank.
///
/// The curve tracks how confident the scorer is: with clarity
/// c = rank^(-confidence_coupling) (jittered), the top level a and the head
/// sharpness 1/tau both grow with c. Queries the scorer gets wrong therefore
/// look flatter and lower, which is the only thing a depth policy can react to.
/// confidence_coupling = 0 gives every query the same curve.
struct SyntheticSpec {
    std::int64_t candidates = 100;
    std::size_t num_queries = 2000;
    double found_at_1 = 0.7;
    double rank_tail = 0.35;
    double score_noise = 0.02;
    double confidence_coupling = 0.5;
    double clarity_jitter = 0.08;

    void validate() const;
};

/// Named presets: "strong", "weak", "mixed", "tiny". Throws ConfigError otherwise.
[[nodiscard]] SyntheticSpec synthetic_preset(std::string_view name);

/// Registry of `candidates` tools, `num_queries` queries with one gold each, and full scores.
[[nodiscard]] Benchmark generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace bordepth
