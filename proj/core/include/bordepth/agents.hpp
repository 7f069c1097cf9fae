#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "bordepth/env.hpp"
#include "bordepth/features.hpp"
#include "bordepth/mlp.hpp"
#include "bordepth/trace.hpp"

namespace bordepth {

/// A ranked candidate list together with the ids that count as correct for it.
struct LabeledList {
    RankedList ranked;
    std::vector<std::string> gold;
};

struct ActionValues {
    double stop = 0.0;
    double cont = 0.0;

    friend bool operator==(const ActionValues&, const ActionValues&) = default;
};

/// Greedy choice over two action values. Ties go to STOP.
[[nodiscard]] inline Action greedy(const ActionValues& q) {
    return q.cont > q.stop ? Action::Continue : Action::Stop;
}

struct TabularPolicy {
    /// Binned continuous features: top, gap, spread, size, ceiling (indices into FeatureVector).
    static constexpr std::array<std::size_t, 5> kBinnedFeatures{0, 1, 2, 4, 5};

    FeatureScaler scaler;
    /// Interior edges per binned feature; bin = number of edges <= value.
    std::array<std::vector<double>, kBinnedFeatures.size()> bin_edges;
    /// Interior depth edges; depth bucket = number of edges <= depth.
    std::vector<std::int64_t> depth_edges;
    std::unordered_map<std::uint64_t, ActionValues> q_table;

    /// Five equal-width bins over [0,1]; depth exact up to 32, then doubling buckets.
    static TabularPolicy with_default_bins();

    [[nodiscard]] std::uint64_t key(const State& s) const;
    /// Zeros for states never visited.
    [[nodiscard]] ActionValues values(const State& s) const;
    /// Throws DomainError if edges are not strictly increasing or a key field would overflow.
    void validate() const;

    friend bool operator==(const TabularPolicy&, const TabularPolicy&) = default;
};

/// Q-network over the six features with two outputs: (STOP, CONTINUE).
struct NeuralPolicy {
    FeatureScaler scaler;
    Mlp network;

    [[nodiscard]] ActionValues values(const State& s) const;

    friend bool operator==(const NeuralPolicy&, const NeuralPolicy&) = default;
};

/// Present the top k of every list (capped at the list size).
struct FixedKPolicy {
    std::int64_t k = 1;

    friend bool operator==(const FixedKPolicy&, const FixedKPolicy&) = default;
};

using Policy = std::variant<TabularPolicy, NeuralPolicy, FixedKPolicy>;

[[nodiscard]] std::string_view policy_kind(const Policy& policy);

/// Greedy action. Always STOP at depth N.
[[nodiscard]] Action act(const Policy& policy, const State& state);

/// Plays one greedy episode and records its outcome.
[[nodiscard]] EpisodeTrace rollout(const Policy& policy, const RankedList& ranked,
                                   std::span<const std::string> gold, const EpisodeConfig& cfg);

enum class LearnerKind { tabular, neural };
[[nodiscard]] LearnerKind parse_learner_kind(std::string_view name);
[[nodiscard]] std::string_view to_string(LearnerKind kind);

struct Hyperparams {
    /// Passes over the training lists; one episode per list per pass.
    std::size_t passes = 30;
    /// Per-episode exploration probability, decayed linearly from start to end
    /// over the first `epsilon_decay_fraction` of all episodes. An exploring
    /// episode draws a target depth uniformly from 1..N and stops there.
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double epsilon_decay_fraction = 0.8;

    /// Tabular step size: max(alpha_min, 1 / visits(s, a)).
    double alpha_min = 0.05;

    std::vector<std::size_t> hidden_layers{32, 32};
    double learning_rate = 1e-3;
    std::size_t replay_capacity = 10'000;
    std::size_t batch_size = 64;
    std::size_t target_sync_interval = 250;
    /// Gradient updates begin once the buffer holds this many transitions.
    std::size_t warmup_transitions = 64;

    void validate() const;
};

struct TrainingEpoch {
    std::size_t pass = 0;
    double epsilon = 0.0;
    double mean_return = 0.0;
    double mean_k = 0.0;
    double found_rate = 0.0;
};

using TrainingLog = std::vector<TrainingEpoch>;

struct TrainResult {
    Policy policy;
    TrainingLog log;
};

/// Off-policy transition in feature space.
struct Transition {
    FeatureVector state{};
    Action action = Action::Stop;
    double reward = 0.0;
    FeatureVector next_state{};
    bool done = true;
};

/// Bounded FIFO of transitions; the oldest entry is evicted when full.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(const Transition& t);
    [[nodiscard]] std::size_t size() const { return items_.size(); }
    [[nodiscard]] std::size_t capacity() const { return capacity_; }
    [[nodiscard]] const Transition& operator[](std::size_t i) const { return items_[i]; }
    /// Uniform sample with replacement.
    [[nodiscard]] std::vector<Transition> sample(std::size_t count, std::mt19937_64& rng) const;

  private:
    std::size_t capacity_;
    std::deque<Transition> items_;
};

/// Mean over the batch of 0.5 * (Q(s)[a] - y)^2, y = r + gamma * max_a' Qtarget(s')[a'] (r if done).
/// Adds the gradient w.r.t. `online` parameters into `grad` when it is non-empty.
double td_loss(const Mlp& online, const Mlp& target, std::span<const Transition> batch,
               double gamma, std::span<double> grad);

[[nodiscard]] TrainResult train_tabular(std::span<const LabeledList> episodes,
                                        const EpisodeConfig& cfg, const Hyperparams& hp,
                                        std::uint64_t seed);
[[nodiscard]] TrainResult train_neural(std::span<const LabeledList> episodes,
                                       const EpisodeConfig& cfg, const Hyperparams& hp,
                                       std::uint64_t seed);
[[nodiscard]] TrainResult train(LearnerKind learner, std::span<const LabeledList> episodes,
                                const EpisodeConfig& cfg, const Hyperparams& hp,
                                std::uint64_t seed);

}  // namespace bordepth
