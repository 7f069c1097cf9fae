#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "bordepth/env.hpp"

namespace bordepth {

inline constexpr std::size_t kFeatureCount = 6;

/// Learner input, every component in [0, 1]:
///   0 top score, min-max scaled by the range of top scores seen in training
///   1 gap first-to-current, divided by the candidate list's score range
///   2 spread, same scaling
///   3 depth / N
///   4 log2(N) / 24, clamped
///   5 ceiling / log2(N)
using FeatureVector = std::array<double, kFeatureCount>;

/// Learned affine map for the raw top score; fitted once on the training lists.
struct FeatureScaler {
    double top_min = 0.0;
    double top_max = 1.0;

    void fit(std::span<const double> top_scores);
    [[nodiscard]] double scale_top(double top) const;

    friend bool operator==(const FeatureScaler&, const FeatureScaler&) = default;
};

[[nodiscard]] FeatureVector extract_features(const State& s, const FeatureScaler& scaler);

}  // namespace bordepth
