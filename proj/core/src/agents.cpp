#include "bordepth/agents.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "bordepth/errors.hpp"

namespace bordepth {

namespace {

constexpr unsigned kBinBits = 4;
constexpr unsigned kDepthBits = 16;

template <typename T>
bool strictly_increasing(const std::vector<T>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<T>()) == v.end();
}

double max_value(const ActionValues& q) { return std::max(q.stop, q.cont); }

/// Episode-level exploration: epsilon decays linearly over the first
/// `decay_fraction` of all training episodes, then holds at `end`.
class ExplorationSchedule {
  public:
    ExplorationSchedule(const Hyperparams& hp, std::size_t total_episodes)
        : start_(hp.epsilon_start), end_(hp.epsilon_end) {
        decay_episodes_ = std::max<double>(
            1.0, std::floor(hp.epsilon_decay_fraction * static_cast<double>(total_episodes)));
    }

    [[nodiscard]] double at(std::size_t episode) const {
        const double frac = std::min(1.0, static_cast<double>(episode) / decay_episodes_);
        return start_ + (end_ - start_) * frac;
    }

  private:
    double start_;
    double end_;
    double decay_episodes_ = 1.0;
};

FeatureScaler fit_scaler(std::span<const LabeledList> episodes) {
    std::vector<double> tops;
    tops.reserve(episodes.size());
    for (const auto& e : episodes) {
        tops.push_back(e.ranked.entries.front().score);
    }
    FeatureScaler scaler;
    scaler.fit(tops);
    return scaler;
}

void check_episodes(std::span<const LabeledList> episodes) {
    if (episodes.empty()) {
        throw DomainError("training needs at least one episode");
    }
    for (const auto& e : episodes) {
        if (e.ranked.empty()) {
            throw DomainError("training list '" + e.ranked.query_id + "' is empty");
        }
    }
}

/// Shared driver: runs passes x episodes with depth-sampled exploration and
/// hands every transition to `learn`. `greedy_action` picks the exploit action.
template <typename GreedyFn, typename LearnFn>
TrainingLog run_training(std::span<const LabeledList> episodes, const EpisodeConfig& cfg,
                         const Hyperparams& hp, std::mt19937_64& rng, GreedyFn&& greedy_action,
                         LearnFn&& learn) {
    std::vector<std::size_t> order(episodes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const ExplorationSchedule schedule(hp, hp.passes * episodes.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    TrainingLog log;
    DepthEnv env;
    std::vector<double> rewards;
    std::size_t episode_index = 0;
    for (std::size_t pass = 0; pass < hp.passes; ++pass) {
        std::shuffle(order.begin(), order.end(), rng);
        double return_sum = 0.0;
        double k_sum = 0.0;
        std::size_t found = 0;
        double epsilon = 0.0;
        for (const std::size_t idx : order) {
            const auto& ep = episodes[idx];
            epsilon = schedule.at(episode_index++);
            State s = env.reset(ep.ranked, ep.gold, cfg);
            std::int64_t target_depth = 0;
            if (unit(rng) < epsilon) {
                std::uniform_int_distribution<std::int64_t> pick(1, env.size());
                target_depth = pick(rng);
            }
            rewards.clear();
            while (true) {
                Action a = target_depth > 0
                               ? (s.depth < target_depth ? Action::Continue : Action::Stop)
                               : greedy_action(s);
                if (s.depth >= s.registry_size) {
                    a = Action::Stop;
                }
                const StepOutcome out = env.step(a);
                rewards.push_back(out.reward);
                learn(s, a, out);
                if (out.done) {
                    break;
                }
                s = *out.next_state;
            }
            return_sum += episode_return(rewards, cfg.gamma);
            k_sum += static_cast<double>(env.depth());
            found += env.found_within(env.depth()) ? 1 : 0;
        }
        const auto n = static_cast<double>(episodes.size());
        log.push_back({pass, epsilon, return_sum / n, k_sum / n, static_cast<double>(found) / n});
    }
    return log;
}

}  // namespace

TabularPolicy TabularPolicy::with_default_bins() {
    TabularPolicy p;
    for (auto& edges : p.bin_edges) {
        edges = {0.2, 0.4, 0.6, 0.8};
    }
    for (std::int64_t d = 2; d <= 33; ++d) {
        p.depth_edges.push_back(d);
    }
    for (std::int64_t d = 65; d <= (std::int64_t{1} << 40); d = 2 * d - 1) {
        p.depth_edges.push_back(d);
    }
    return p;
}

void TabularPolicy::validate() const {
    for (const auto& edges : bin_edges) {
        if (!strictly_increasing(edges) || edges.size() >= (1u << kBinBits)) {
            throw DomainError("tabular bin edges must be strictly increasing, at most 15 per feature");
        }
    }
    if (!strictly_increasing(depth_edges) || depth_edges.size() >= (1u << kDepthBits)) {
        throw DomainError("tabular depth edges must be strictly increasing");
    }
}

std::uint64_t TabularPolicy::key(const State& s) const {
    const FeatureVector f = extract_features(s, scaler);
    const auto depth_bucket = static_cast<std::uint64_t>(
        std::upper_bound(depth_edges.begin(), depth_edges.end(), s.depth) - depth_edges.begin());
    std::uint64_t key = depth_bucket;
    for (std::size_t j = 0; j < kBinnedFeatures.size(); ++j) {
        const auto& edges = bin_edges[j];
        const auto bin = static_cast<std::uint64_t>(
            std::upper_bound(edges.begin(), edges.end(), f[kBinnedFeatures[j]]) - edges.begin());
        key |= bin << (kDepthBits + kBinBits * j);
    }
    return key;
}

ActionValues TabularPolicy::values(const State& s) const {
    const auto it = q_table.find(key(s));
    return it == q_table.end() ? ActionValues{} : it->second;
}

ActionValues NeuralPolicy::values(const State& s) const {
    const FeatureVector f = extract_features(s, scaler);
    const auto out = network.forward(f);
    return {out[0], out[1]};
}

std::string_view policy_kind(const Policy& policy) {
    switch (policy.index()) {
        case 0: return "tabular";
        case 1: return "neural";
        default: return "fixed_k";
    }
}

Action act(const Policy& policy, const State& state) {
    if (state.depth >= state.registry_size) {
        return Action::Stop;
    }
    if (const auto* fixed = std::get_if<FixedKPolicy>(&policy)) {
        return state.depth < std::min(fixed->k, state.registry_size) ? Action::Continue
                                                                      : Action::Stop;
    }
    if (const auto* tab = std::get_if<TabularPolicy>(&policy)) {
        return greedy(tab->values(state));
    }
    return greedy(std::get<NeuralPolicy>(policy).values(state));
}

EpisodeTrace rollout(const Policy& policy, const RankedList& ranked,
                     std::span<const std::string> gold, const EpisodeConfig& cfg) {
    DepthEnv env;
    State s = env.reset(ranked, gold, cfg);
    std::vector<double> rewards;
    while (true) {
        const StepOutcome out = env.step(act(policy, s));
        rewards.push_back(out.reward);
        if (out.done) {
            break;
        }
        s = *out.next_state;
    }
    EpisodeTrace t;
    t.query_id = ranked.query_id;
    t.chosen_k = env.depth();
    t.found = env.found_within(env.depth());
    t.terminal_reward = rewards.back();
    t.episode_return = episode_return(rewards, cfg.gamma);
    t.gold_rank = env.gold_rank();
    t.relevant_count = std::max<std::int64_t>(env.relevant_present(), 1);
    t.candidate_count = env.size();
    return t;
}

LearnerKind parse_learner_kind(std::string_view name) {
    if (name == "tabular") return LearnerKind::tabular;
    if (name == "neural" || name == "dqn") return LearnerKind::neural;
    throw ConfigError("unknown learner '" + std::string(name) + "' (expected tabular or dqn)");
}

std::string_view to_string(LearnerKind kind) {
    return kind == LearnerKind::tabular ? "tabular" : "dqn";
}

void Hyperparams::validate() const {
    if (passes == 0) {
        throw ConfigError("passes must be >= 1");
    }
    const auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(epsilon_start) || !prob(epsilon_end) || !prob(epsilon_decay_fraction)) {
        throw ConfigError("epsilon schedule values must lie in [0, 1]");
    }
    if (!(alpha_min > 0.0 && alpha_min <= 1.0)) {
        throw ConfigError("alpha_min must lie in (0, 1]");
    }
    if (!(learning_rate > 0.0) || batch_size == 0 || replay_capacity < batch_size ||
        target_sync_interval == 0) {
        throw ConfigError(
            "neural settings need learning_rate > 0, batch_size >= 1, "
            "replay_capacity >= batch_size and target_sync_interval >= 1");
    }
    if (std::find(hidden_layers.begin(), hidden_layers.end(), std::size_t{0}) !=
        hidden_layers.end()) {
        throw ConfigError("hidden layer widths must be >= 1");
    }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) {
        throw DomainError("replay buffer capacity must be >= 1");
    }
}

void ReplayBuffer::push(const Transition& t) {
    if (items_.size() == capacity_) {
        items_.pop_front();
    }
    items_.push_back(t);
}

std::vector<Transition> ReplayBuffer::sample(std::size_t count, std::mt19937_64& rng) const {
    if (items_.empty()) {
        throw UsageError("cannot sample from an empty replay buffer");
    }
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    std::vector<Transition> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(items_[pick(rng)]);
    }
    return out;
}

double td_loss(const Mlp& online, const Mlp& target, std::span<const Transition> batch,
               double gamma, std::span<double> grad) {
    if (batch.empty()) {
        return 0.0;
    }
    const auto scale = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    std::array<double, 2> d_out{};
    for (const auto& t : batch) {
        const auto q = online.forward(t.state);
        double y = t.reward;
        if (!t.done) {
            const auto next = target.forward(t.next_state);
            y += gamma * std::max(next[0], next[1]);
        }
        const std::size_t a = t.action == Action::Stop ? 0 : 1;
        const double diff = q[a] - y;
        loss += 0.5 * diff * diff * scale;
        if (!grad.empty()) {
            d_out = {0.0, 0.0};
            d_out[a] = diff * scale;
            online.accumulate_gradient(t.state, d_out, grad);
        }
    }
    return loss;
}

TrainResult train_tabular(std::span<const LabeledList> episodes, const EpisodeConfig& cfg,
                          const Hyperparams& hp, std::uint64_t seed) {
    check_episodes(episodes);
    cfg.validate();
    hp.validate();
    TabularPolicy policy = TabularPolicy::with_default_bins();
    policy.scaler = fit_scaler(episodes);
    std::unordered_map<std::uint64_t, std::array<std::uint64_t, 2>> visits;
    std::mt19937_64 rng(seed);

    auto greedy_action = [&](const State& s) { return greedy(policy.values(s)); };
    auto learn = [&](const State& s, Action a, const StepOutcome& out) {
        double target = out.reward;
        if (!out.done) {
            target += cfg.gamma * max_value(policy.values(*out.next_state));
        }
        const std::uint64_t key = policy.key(s);
        auto& q = policy.q_table[key];
        const std::size_t ai = a == Action::Stop ? 0 : 1;
        const auto n = ++visits[key][ai];
        const double alpha = std::max(hp.alpha_min, 1.0 / static_cast<double>(n));
        double& value = ai == 0 ? q.stop : q.cont;
        value += alpha * (target - value);
    };
    TrainingLog log = run_training(episodes, cfg, hp, rng, greedy_action, learn);
    return {std::move(policy), std::move(log)};
}

TrainResult train_neural(std::span<const LabeledList> episodes, const EpisodeConfig& cfg,
                         const Hyperparams& hp, std::uint64_t seed) {
    check_episodes(episodes);
    cfg.validate();
    hp.validate();
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> layers{kFeatureCount};
    layers.insert(layers.end(), hp.hidden_layers.begin(), hp.hidden_layers.end());
    layers.push_back(2);

    NeuralPolicy policy{fit_scaler(episodes), Mlp(layers, rng())};
    Mlp target = policy.network;
    AdamOptimizer adam(policy.network.parameter_count(), hp.learning_rate);
    ReplayBuffer buffer(hp.replay_capacity);
    std::vector<double> grad(policy.network.parameter_count());
    std::size_t updates = 0;
    std::size_t steps = 0;

    auto greedy_action = [&](const State& s) {
        const ActionValues q = policy.values(s);
        if (!std::isfinite(q.stop) || !std::isfinite(q.cont)) {
            throw TrainingError(fmt::format(
                "Q-network produced a non-finite action value at depth {} after {} updates",
                s.depth, updates));
        }
        return greedy(q);
    };
    auto learn = [&](const State& s, Action a, const StepOutcome& out) {
        Transition t;
        t.state = extract_features(s, policy.scaler);
        t.action = a;
        t.reward = out.reward;
        t.done = out.done;
        if (!out.done) {
            t.next_state = extract_features(*out.next_state, policy.scaler);
        }
        buffer.push(t);
        ++steps;
        if (buffer.size() < std::max(hp.warmup_transitions, hp.batch_size)) {
            return;
        }
        const auto batch = buffer.sample(hp.batch_size, rng);
        std::fill(grad.begin(), grad.end(), 0.0);
        const double loss = td_loss(policy.network, target, batch, cfg.gamma, grad);
        if (!std::isfinite(loss)) {
            throw TrainingError(fmt::format(
                "temporal-difference loss became non-finite at step {} (update {})", steps,
                updates));
        }
        adam.step(policy.network.parameters(), grad);
        if (++updates % hp.target_sync_interval == 0) {
            target = policy.network;
        }
    };
    TrainingLog log = run_training(episodes, cfg, hp, rng, greedy_action, learn);
    return {std::move(policy), std::move(log)};
}

TrainResult train(LearnerKind learner, std::span<const LabeledList> episodes,
                  const EpisodeConfig& cfg, const Hyperparams& hp, std::uint64_t seed) {
    return learner == LearnerKind::tabular ? train_tabular(episodes, cfg, hp, seed)
                                           : train_neural(episodes, cfg, hp, seed);
}

}  // namespace bordepth
