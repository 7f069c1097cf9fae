#include "bordepth/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "bordepth/errors.hpp"

namespace bordepth {

namespace {

constexpr std::array<Bucket, 4> kWide{{
    {"easy", 1, 1},
    {"medium", 2, 5},
    {"hard", 6, 20},
    {"very_hard", 21, kOpenEnd},
}};

constexpr std::array<Bucket, 4> kNarrow{{
    {"easy", 1, 1},
    {"medium", 2, 3},
    {"hard", 4, 10},
    {"very_hard", 11, kOpenEnd},
}};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

BucketScheme parse_bucket_scheme(std::string_view name) {
    if (name == "wide") return BucketScheme::wide;
    if (name == "narrow") return BucketScheme::narrow;
    throw ConfigError(fmt::format("unknown bucket scheme '{}' (wide or narrow)", name));
}

std::string_view to_string(BucketScheme scheme) {
    return scheme == BucketScheme::wide ? "wide" : "narrow";
}

std::span<const Bucket> buckets(BucketScheme scheme) {
    return scheme == BucketScheme::wide ? std::span<const Bucket>(kWide)
                                        : std::span<const Bucket>(kNarrow);
}

const Bucket& bucketize(const EpisodeTrace& trace, BucketScheme scheme) {
    const auto all = buckets(scheme);
    if (trace.gold_rank < 1) {
        return all.back();
    }
    for (const auto& b : all) {
        if (trace.gold_rank >= b.first_rank && trace.gold_rank <= b.last_rank) {
            return b;
        }
    }
    return all.back();
}

FillMode parse_fill_mode(std::string_view name) {
    if (name == "random") return FillMode::random;
    if (name == "none") return FillMode::none;
    throw ConfigError(fmt::format("unknown candidate fill '{}' (random or none)", name));
}

std::string_view to_string(FillMode mode) { return mode == FillMode::random ? "random" : "none"; }

std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return splitmix64(h ^ splitmix64(base));
}

CandidateSet build_candidate_set(const Query& query, std::span<const Tool> registry,
                                 const ScoreVector& scores, const CandidateSpec& spec,
                                 std::uint64_t seed) {
    const auto registry_size = static_cast<std::int64_t>(registry.size());
    const std::int64_t n = spec.size == 0 ? registry_size : spec.size;
    if (n < 1 || n > registry_size) {
        throw ConfigError(fmt::format("candidate set size {} does not fit a registry of {}", n,
                                      registry_size));
    }
    if (spec.hard_count < 0) {
        throw ConfigError("hard distractor count must be >= 0");
    }
    std::vector<std::string> gold;
    std::unordered_set<std::string_view> gold_set;
    for (const auto& g : query.gold_ids) {
        if (gold_set.insert(g).second) {
            gold.push_back(g);
        }
    }
    const auto gold_count = static_cast<std::int64_t>(gold.size());
    CandidateSet set{query.id, {}};
    if (n == registry_size) {
        for (const auto& t : registry) {
            set.members.push_back(t.id);
        }
        return set;
    }
    if (gold_count + spec.hard_count > n) {
        throw ConfigError(fmt::format(
            "query '{}': {} gold + {} hard distractors exceed candidate set size {}", query.id,
            gold_count, spec.hard_count, n));
    }

    std::unordered_map<std::string_view, double> score_of;
    for (const auto& e : scores.entries) {
        score_of.emplace(e.tool_id, e.score);
    }
    ScoreVector distractors{query.id, {}};
    for (const auto& t : registry) {
        if (gold_set.contains(t.id)) {
            continue;
        }
        const auto it = score_of.find(t.id);
        if (it == score_of.end()) {
            throw DataError(fmt::format("query '{}' has no score for tool '{}'", query.id, t.id));
        }
        distractors.entries.push_back({t.id, it->second});
    }
    const RankedList by_score = rank(std::move(distractors));

    set.members = gold;
    const std::int64_t slots = n - gold_count;
    const std::int64_t hard = spec.fill == FillMode::none ? slots : spec.hard_count;
    for (std::int64_t i = 0; i < hard; ++i) {
        set.members.push_back(by_score.entries[static_cast<std::size_t>(i)].tool_id);
    }
    if (spec.fill == FillMode::random && slots > hard) {
        std::vector<std::string> pool;
        for (std::size_t i = static_cast<std::size_t>(hard); i < by_score.size(); ++i) {
            pool.push_back(by_score.entries[i].tool_id);
        }
        std::mt19937_64 rng(derive_seed(seed, query.id));
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(static_cast<std::size_t>(slots - hard));
        set.members.insert(set.members.end(), std::make_move_iterator(pool.begin()),
                           std::make_move_iterator(pool.end()));
    }
    return set;
}

ScoreVector restrict_scores(const ScoreVector& scores, const CandidateSet& set) {
    std::unordered_map<std::string_view, double> score_of;
    for (const auto& e : scores.entries) {
        score_of.emplace(e.tool_id, e.score);
    }
    ScoreVector out{scores.query_id, {}};
    out.entries.reserve(set.members.size());
    for (const auto& m : set.members) {
        const auto it = score_of.find(m);
        if (it == score_of.end()) {
            throw DataError(fmt::format("query '{}' has no score for candidate '{}'",
                                        scores.query_id, m));
        }
        out.entries.push_back({m, it->second});
    }
    return out;
}

std::pair<std::vector<Query>, std::vector<Query>> split(const std::vector<Query>& queries,
                                                        double train_fraction,
                                                        std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train fraction must lie strictly between 0 and 1");
    }
    const std::size_t n = queries.size();
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    if (n >= 2) {
        n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<char> in_train(n, 0);
    for (std::size_t i = 0; i < n_train; ++i) {
        in_train[order[i]] = 1;
    }
    std::pair<std::vector<Query>, std::vector<Query>> out;
    for (std::size_t i = 0; i < n; ++i) {
        (in_train[i] ? out.first : out.second).push_back(queries[i]);
    }
    return out;
}

MethodSpec parse_method(std::string_view token) {
    MethodSpec m;
    std::string_view digits;
    if (token.starts_with("fixed:")) {
        digits = token.substr(6);
    } else if (token.starts_with("fk")) {
        digits = token.substr(2);
    }
    if (!digits.empty()) {
        std::int64_t k = 0;
        const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), k);
        if (res.ec != std::errc() || res.ptr != digits.data() + digits.size() || k < 1) {
            throw ConfigError(fmt::format("bad fixed-K method '{}'", token));
        }
        m.learned = false;
        m.fixed_k = k;
        m.name = fmt::format("fk{}", k);
        return m;
    }
    m.reward = parse_reward_kind(token);
    m.name = std::string(to_string(m.reward));
    return m;
}

PreparedData prepare_data(const Benchmark& benchmark, const ScoreMap& scores,
                          const ExperimentSpec& spec) {
    auto [train_q, test_q] = split(benchmark.queries, spec.train_fraction, spec.data_seed);
    const std::uint64_t candidate_seed = derive_seed(spec.data_seed, "candidates");
    PreparedData data;
    auto build = [&](const std::vector<Query>& qs, std::vector<LabeledList>& out) {
        out.reserve(qs.size());
        for (const auto& q : qs) {
            const auto it = scores.find(q.id);
            if (it == scores.end()) {
                throw DataError(fmt::format("no scores for query '{}'", q.id));
            }
            const auto set =
                build_candidate_set(q, benchmark.registry, it->second, spec.candidates,
                                    candidate_seed);
            data.candidate_n = set.size();
            out.push_back({rank(restrict_scores(it->second, set)), q.gold_ids});
        }
    };
    build(train_q, data.train);
    build(test_q, data.test);
    return data;
}

EpisodeConfig evaluation_config(const ExperimentSpec& spec) {
    EpisodeConfig cfg = spec.env;
    cfg.reward_kind = RewardKind::bor;
    cfg.relevance = spec.eval_relevance;
    return cfg;
}

std::vector<EpisodeTrace> evaluate(const Policy& policy, std::span<const LabeledList> lists,
                                   const EpisodeConfig& cfg) {
    std::vector<EpisodeTrace> traces;
    traces.reserve(lists.size());
    for (const auto& l : lists) {
        traces.push_back(rollout(policy, l.ranked, l.gold, cfg));
    }
    return traces;
}

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        for (std::size_t w = 0; w < std::min(jobs, count); ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        const std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

TrainedPolicies train_methods(const PreparedData& data, const ExperimentSpec& spec) {
    std::vector<std::pair<const MethodSpec*, std::uint64_t>> cells;
    for (const auto& m : spec.methods) {
        if (m.learned) {
            for (const auto seed : spec.seeds) {
                cells.emplace_back(&m, seed);
            }
        }
    }
    if (!cells.empty() && data.train.empty()) {
        throw DataError("training split is empty");
    }
    std::vector<std::optional<TrainResult>> results(cells.size());
    parallel_for(cells.size(), spec.jobs, [&](std::size_t i) {
        EpisodeConfig cfg = spec.env;
        cfg.reward_kind = cells[i].first->reward;
        results[i] = train(spec.learner, data.train, cfg, spec.hp, cells[i].second);
    });
    TrainedPolicies out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out.emplace(PolicyKey{cells[i].first->name, cells[i].second}, std::move(*results[i]));
    }
    return out;
}

ExperimentResult evaluate_methods(const PreparedData& data, const ExperimentSpec& spec,
                                  const PolicyStore& learned) {
    if (data.test.empty()) {
        throw DataError("test split is empty");
    }
    if (spec.methods.empty() || spec.seeds.empty()) {
        throw ConfigError("an experiment needs at least one method and one seed");
    }
    const EpisodeConfig eval_cfg = evaluation_config(spec);
    ExperimentResult result;
    for (const auto& m : spec.methods) {
        result.runs.push_back({m, spec.seeds, std::vector<std::vector<EpisodeTrace>>(spec.seeds.size())});
    }
    const std::size_t per_method = spec.seeds.size();
    parallel_for(spec.methods.size() * per_method, spec.jobs, [&](std::size_t cell) {
        auto& run = result.runs[cell / per_method];
        const std::uint64_t seed = spec.seeds[cell % per_method];
        if (!run.method.learned) {
            run.traces[cell % per_method] =
                evaluate(FixedKPolicy{run.method.fixed_k}, data.test, eval_cfg);
            return;
        }
        const auto it = learned.find(PolicyKey{run.method.name, seed});
        if (it == learned.end()) {
            throw DataError(fmt::format("no trained policy for method '{}' seed {}",
                                        run.method.name, seed));
        }
        run.traces[cell % per_method] = evaluate(it->second, data.test, eval_cfg);
    });
    std::vector<MethodTraces> traces;
    for (const auto& run : result.runs) {
        traces.push_back({run.method.name, !run.method.learned, run.seeds, run.traces});
    }
    result.report = summarize(spec.condition, traces, spec.buckets, data.candidate_n);
    return result;
}

ExperimentResult run_experiment(const Benchmark& benchmark, const ScoreMap& scores,
                                const ExperimentSpec& spec) {
    const PreparedData data = prepare_data(benchmark, scores, spec);
    TrainedPolicies trained = train_methods(data, spec);
    PolicyStore store;
    for (auto& [key, result] : trained) {
        store.emplace(key, std::move(result.policy));
    }
    return evaluate_methods(data, spec, store);
}

}  // namespace bordepth
