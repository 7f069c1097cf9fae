#include "bordepth/env.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "bordepth/errors.hpp"

namespace bordepth {

std::string_view to_string(RewardKind kind) {
    switch (kind) {
        case RewardKind::bor: return "bor";
        case RewardKind::f1: return "f1";
        case RewardKind::constant_one: return "constant_one";
    }
    return "?";
}

std::string_view to_string(RelevanceMode mode) {
    return mode == RelevanceMode::oracle ? "oracle" : "assume_one";
}

RewardKind parse_reward_kind(std::string_view name) {
    if (name == "bor") return RewardKind::bor;
    if (name == "f1") return RewardKind::f1;
    if (name == "constant_one" || name == "constant") return RewardKind::constant_one;
    throw ConfigError("unknown reward kind '" + std::string(name) +
                      "' (expected bor, f1 or constant_one)");
}

RelevanceMode parse_relevance_mode(std::string_view name) {
    if (name == "oracle") return RelevanceMode::oracle;
    if (name == "assume_one") return RelevanceMode::assume_one;
    throw ConfigError("unknown relevance mode '" + std::string(name) +
                      "' (expected oracle or assume_one)");
}

void EpisodeConfig::validate() const {
    if (!(step_cost >= 0.0) || !std::isfinite(step_cost)) {
        throw ConfigError("step_cost must be a finite value >= 0");
    }
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw ConfigError("gamma must lie in (0, 1]");
    }
}

double terminal_reward(RewardKind kind, std::int64_t corpus_size, std::int64_t relevant_count,
                       std::int64_t depth, bool found) {
    if (!found) {
        return 0.0;
    }
    switch (kind) {
        case RewardKind::bor:
            return metric::bor_max({corpus_size, relevant_count, depth}).value();
        case RewardKind::f1:
            return 2.0 / static_cast<double>(depth + 1);
        case RewardKind::constant_one:
            return 1.0;
    }
    return 0.0;
}

double episode_return(std::span<const double> rewards, double gamma) {
    double total = 0.0;
    double discount = 1.0;
    for (const double r : rewards) {
        total += discount * r;
        discount *= gamma;
    }
    return total;
}

State DepthEnv::reset(const RankedList& ranked, std::span<const std::string> gold,
                      const EpisodeConfig& cfg) {
    if (ranked.empty()) {
        throw DomainError("cannot start an episode on an empty ranked list");
    }
    if (gold.empty()) {
        throw DomainError("query '" + ranked.query_id + "' has no gold tools");
    }
    cfg.validate();
    cfg_ = cfg;
    scores_.clear();
    scores_.reserve(ranked.size());
    const std::unordered_set<std::string_view> gold_ids(gold.begin(), gold.end());
    gold_rank_ = 0;
    relevant_present_ = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        scores_.push_back(ranked.entries[i].score);
        if (gold_ids.contains(ranked.entries[i].tool_id)) {
            ++relevant_present_;
            if (gold_rank_ == 0) {
                gold_rank_ = static_cast<std::int64_t>(i) + 1;
            }
        }
    }
    floor_ = *std::min_element(scores_.begin(), scores_.end());
    depth_ = 1;
    prefix_min_ = scores_.front();
    active_ = true;
    return observe();
}

State DepthEnv::observe() const {
    if (depth_ < 1) {
        throw UsageError("observe() before reset()");
    }
    const double top = scores_.front();
    const auto idx = static_cast<std::size_t>(depth_ - 1);
    State s;
    s.top_score = top;
    s.gap_first_to_current = top - scores_[idx];
    s.spread = top - prefix_min_;
    s.depth = depth_;
    s.registry_size = size();
    s.ceiling = metric::bor_opt(size(), depth_);
    s.score_floor = floor_;
    return s;
}

StepOutcome DepthEnv::step(Action action) {
    if (!active_) {
        throw UsageError("step() called on a finished episode");
    }
    if (action == Action::Continue && depth_ < size()) {
        ++depth_;
        prefix_min_ = std::min(prefix_min_, scores_[static_cast<std::size_t>(depth_ - 1)]);
        return {observe(), -cfg_.step_cost, false};
    }
    active_ = false;
    const std::int64_t r = cfg_.relevance == RelevanceMode::oracle
                               ? std::max<std::int64_t>(relevant_present_, 1)
                               : 1;
    return {std::nullopt,
            terminal_reward(cfg_.reward_kind, size(), r, depth_, found_within(depth_)), true};
}

}  // namespace bordepth
