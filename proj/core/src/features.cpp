#include "bordepth/features.hpp"

#include <algorithm>
#include <cmath>

namespace bordepth {

namespace {

double unit_clamp(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

void FeatureScaler::fit(std::span<const double> top_scores) {
    if (top_scores.empty()) {
        top_min = 0.0;
        top_max = 1.0;
        return;
    }
    const auto [lo, hi] = std::minmax_element(top_scores.begin(), top_scores.end());
    top_min = *lo;
    top_max = *hi;
}

double FeatureScaler::scale_top(double top) const {
    const double range = top_max - top_min;
    if (!(range > 0.0)) {
        return 0.5;
    }
    return unit_clamp((top - top_min) / range);
}

FeatureVector extract_features(const State& s, const FeatureScaler& scaler) {
    const double range = s.top_score - s.score_floor;
    const auto n = static_cast<double>(s.registry_size);
    const double log_n = std::log2(n);
    FeatureVector f{};
    f[0] = scaler.scale_top(s.top_score);
    f[1] = range > 0.0 ? unit_clamp(s.gap_first_to_current / range) : 0.0;
    f[2] = range > 0.0 ? unit_clamp(s.spread / range) : 0.0;
    f[3] = static_cast<double>(s.depth) / n;
    f[4] = unit_clamp(log_n / 24.0);
    f[5] = log_n > 0.0 ? unit_clamp(s.ceiling.value() / log_n) : 0.0;
    return f;
}

}  // namespace bordepth
