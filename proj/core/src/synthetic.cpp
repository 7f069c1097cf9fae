#include "bordepth/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "bordepth/errors.hpp"

namespace bordepth {

void SyntheticSpec::validate() const {
    if (candidates < 1 || num_queries == 0) {
        throw ConfigError("synthetic benchmark needs >= 1 candidate and >= 1 query");
    }
    if (!(found_at_1 >= 0.0 && found_at_1 <= 1.0)) {
        throw ConfigError("found_at_1 must lie in [0, 1]");
    }
    if (!(rank_tail > 0.0 && rank_tail <= 1.0)) {
        throw ConfigError("rank_tail must lie in (0, 1]");
    }
    if (!(score_noise >= 0.0) || !(confidence_coupling >= 0.0) || !(clarity_jitter >= 0.0)) {
        throw ConfigError("score_noise, confidence_coupling and clarity_jitter must be >= 0");
    }
}

SyntheticSpec synthetic_preset(std::string_view name) {
    SyntheticSpec s;
    if (name == "strong") {
        return s;
    }
    if (name == "weak") {
        s.found_at_1 = 0.33;
        s.rank_tail = 0.04;
        s.score_noise = 0.05;
        return s;
    }
    if (name == "mixed") {
        s.candidates = 50;
        s.found_at_1 = 0.45;
        s.rank_tail = 0.08;
        s.clarity_jitter = 0.35;
        return s;
    }
    if (name == "tiny") {
        s.candidates = 10;
        s.num_queries = 50;
        s.found_at_1 = 0.6;
        s.rank_tail = 0.5;
        s.score_noise = 0.01;
        return s;
    }
    throw ConfigError(fmt::format("unknown synthetic preset '{}' (strong, weak, mixed, tiny)", name));
}

Benchmark generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    const auto n = static_cast<std::size_t>(spec.candidates);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::geometric_distribution<std::int64_t> tail(spec.rank_tail);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick_tool(0, n - 1);

    Benchmark b;
    b.registry.reserve(n);
    const int width = static_cast<int>(std::to_string(n).size());
    for (std::size_t i = 0; i < n; ++i) {
        Tool t;
        t.id = fmt::format("t{:0{}}", i, width);
        t.name = fmt::format("synthetic_tool_{}", i);
        t.description = fmt::format("Synthetic tool number {}.", i);
        b.registry.push_back(std::move(t));
    }

    ScoreMap scores;
    std::vector<double> curve(n);
    std::vector<std::size_t> others(n > 0 ? n - 1 : 0);
    const int qwidth = static_cast<int>(std::to_string(spec.num_queries).size());
    for (std::size_t q = 0; q < spec.num_queries; ++q) {
        Query query;
        query.id = fmt::format("q{:0{}}", q, qwidth);
        query.text = fmt::format("synthetic query {}", q);
        const std::size_t gold = pick_tool(rng);
        query.gold_ids = {b.registry[gold].id};

        std::int64_t gold_rank = 1;
        if (!(unit(rng) < spec.found_at_1)) {
            gold_rank = std::min<std::int64_t>(spec.candidates, 2 + tail(rng));
        }

        const double clarity = std::clamp(
            std::pow(static_cast<double>(gold_rank), -spec.confidence_coupling) +
                spec.clarity_jitter * gauss(rng),
            0.02, 1.0);
        const double level = 0.35 + 0.6 * clarity;
        const double tau = 0.6 + 12.0 * (1.0 - clarity);
        for (std::size_t i = 0; i < n; ++i) {
            curve[i] = level * std::exp(-static_cast<double>(i) / tau) +
                       spec.score_noise * gauss(rng);
        }
        std::sort(curve.begin(), curve.end(), std::greater<>());
        // Strictly decreasing, so ranking cannot move the gold off its slot.
        for (std::size_t i = 1; i < n; ++i) {
            curve[i] = std::min(curve[i], std::nextafter(curve[i - 1], -HUGE_VAL));
        }

        std::iota(others.begin(), others.end(), std::size_t{0});
        for (auto& o : others) {
            if (o >= gold) {
                ++o;
            }
        }
        std::shuffle(others.begin(), others.end(), rng);

        ScoreVector vec{query.id, std::vector<ScoreEntry>(n)};
        const auto gold_slot = static_cast<std::size_t>(gold_rank - 1);
        std::size_t next_other = 0;
        for (std::size_t slot = 0; slot < n; ++slot) {
            const std::size_t tool = slot == gold_slot ? gold : others[next_other++];
            vec.entries[tool] = {b.registry[tool].id, curve[slot]};
        }
        scores.emplace(query.id, std::move(vec));
        b.queries.push_back(std::move(query));
    }
    b.scores = std::move(scores);
    return b;
}

}  // namespace bordepth
