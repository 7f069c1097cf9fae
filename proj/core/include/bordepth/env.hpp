#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bordepth/metric.hpp"
#include "bordepth/scorer.hpp"

namespace bordepth {

enum class RewardKind { bor, f1, constant_one };
enum class RelevanceMode { oracle, assume_one };
enum class Action { Stop, Continue };

[[nodiscard]] std::string_view to_string(RewardKind kind);
[[nodiscard]] std::string_view to_string(RelevanceMode mode);
/// Throws ConfigError on unknown names.
[[nodiscard]] RewardKind parse_reward_kind(std::string_view name);
[[nodiscard]] RelevanceMode parse_relevance_mode(std::string_view name);

struct EpisodeConfig {
    RewardKind reward_kind = RewardKind::bor;
    double step_cost = 0.01;
    double gamma = 0.95;
    /// Which R enters the BoR reward: |gold| (oracle) or 1.
    RelevanceMode relevance = RelevanceMode::oracle;

    void validate() const;
};

/// What the depth policy observes after examining the first `depth` candidates.
/// Scores are raw scorer output; normalisation belongs to the learner.
struct State {
    double top_score = 0.0;
    double gap_first_to_current = 0.0;
    /// top_score minus the lowest score examined; equals the gap under descending order.
    double spread = 0.0;
    std::int64_t depth = 1;
    std::int64_t registry_size = 1;
    metric::Bits ceiling;
    /// Lowest score in the whole candidate list. Constant within an episode.
    double score_floor = 0.0;
};

struct StepOutcome {
    std::optional<State> next_state;
    double reward = 0.0;
    bool done = false;
};

/// Terminal reward for presenting `depth` of `corpus_size` candidates.
/// `relevant_count` is the R used by the BoR reward; ignored by the other kinds.
[[nodiscard]] double terminal_reward(RewardKind kind, std::int64_t corpus_size,
                                     std::int64_t relevant_count, std::int64_t depth, bool found);

/// sum_t gamma^t * rewards[t]
[[nodiscard]] double episode_return(std::span<const double> rewards, double gamma);

/// The one-query STOP/CONTINUE depth MDP.
///
/// An episode starts with the rank-1 candidate already examined (depth 1).
/// CONTINUE costs `step_cost`; CONTINUE at depth N is treated as STOP.
class DepthEnv {
  public:
    /// Gold ids absent from `ranked` are ignored; with no gold present the episode
    /// can still be played but never finds anything. Throws DomainError if `gold`
    /// is empty or `ranked` has no entries.
    State reset(const RankedList& ranked, std::span<const std::string> gold,
                const EpisodeConfig& cfg);
    /// Throws UsageError when called without an active episode.
    StepOutcome step(Action action);

    [[nodiscard]] bool active() const { return active_; }
    [[nodiscard]] std::int64_t depth() const { return depth_; }
    [[nodiscard]] std::int64_t size() const { return static_cast<std::int64_t>(scores_.size()); }
    /// Best rank among gold candidates, 0 if none is present.
    [[nodiscard]] std::int64_t gold_rank() const { return gold_rank_; }
    /// Number of distinct gold ids present among the candidates.
    [[nodiscard]] std::int64_t relevant_present() const { return relevant_present_; }
    [[nodiscard]] bool found_within(std::int64_t depth) const {
        return gold_rank_ > 0 && gold_rank_ <= depth;
    }
    [[nodiscard]] State observe() const;

  private:
    std::vector<double> scores_;
    EpisodeConfig cfg_;
    std::int64_t gold_rank_ = 0;
    std::int64_t relevant_present_ = 0;
    std::int64_t depth_ = 0;
    double floor_ = 0.0;
    double prefix_min_ = 0.0;
    bool active_ = false;
};

}  // namespace bordepth
