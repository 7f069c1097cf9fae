#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bordepth/agents.hpp"
#include "bordepth/buckets.hpp"
#include "bordepth/dataset.hpp"
#include "bordepth/report.hpp"

namespace bordepth {

enum class FillMode { random, none };

[[nodiscard]] FillMode parse_fill_mode(std::string_view name);
[[nodiscard]] std::string_view to_string(FillMode mode);

/// size = 0 means "the whole registry".
/// fill = random: gold + top `hard_count` non-gold tools by score + uniform sample of the rest.
/// fill = none:   gold + the top (size - |gold|) non-gold tools; hard_count only has to fit.
struct CandidateSpec {
    std::int64_t size = 0;
    std::int64_t hard_count = 24;
    FillMode fill = FillMode::random;
};

struct CandidateSet {
    std::string query_id;
    std::vector<std::string> members;

    [[nodiscard]] std::int64_t size() const { return static_cast<std::int64_t>(members.size()); }
};

/// Throws ConfigError when the candidate spec cannot be met for this registry and query.
[[nodiscard]] CandidateSet build_candidate_set(const Query& query, std::span<const Tool> registry,
                                               const ScoreVector& scores,
                                               const CandidateSpec& spec, std::uint64_t seed);

/// Scores of the candidate members only, ready to be re-ranked within the set.
[[nodiscard]] ScoreVector restrict_scores(const ScoreVector& scores, const CandidateSet& set);

/// Deterministic disjoint split; train gets round(fraction * n) queries, clamped to
/// [1, n-1] when n >= 2. Both halves keep the input order.
[[nodiscard]] std::pair<std::vector<Query>, std::vector<Query>> split(
    const std::vector<Query>& queries, double train_fraction, std::uint64_t seed);

/// A row in an experiment: a learner trained with some reward, or a Fixed-K baseline.
struct MethodSpec {
    std::string name;
    bool learned = true;
    RewardKind reward = RewardKind::bor;
    std::int64_t fixed_k = 0;
};

/// "bor", "f1", "constant_one", or "fk<k>" (also "fixed:<k>").
[[nodiscard]] MethodSpec parse_method(std::string_view token);

struct ExperimentSpec {
    std::string condition = "default";
    CandidateSpec candidates;
    double train_fraction = 0.7;
    /// Drives the split and random candidate fill; fixed across training seeds.
    std::uint64_t data_seed = 0;
    /// Training environment; each learned method overrides reward_kind.
    EpisodeConfig env;
    /// R used by the reward reported at evaluation.
    RelevanceMode eval_relevance = RelevanceMode::assume_one;
    LearnerKind learner = LearnerKind::tabular;
    Hyperparams hp;
    std::vector<MethodSpec> methods;
    std::vector<std::uint64_t> seeds{1};
    BucketScheme buckets = BucketScheme::wide;
    /// Worker threads for (method x seed) cells.
    std::size_t jobs = 1;
};

/// Candidate lists built and ranked within each candidate set.
struct PreparedData {
    std::vector<LabeledList> train;
    std::vector<LabeledList> test;
    std::int64_t candidate_n = 0;
};

[[nodiscard]] PreparedData prepare_data(const Benchmark& benchmark, const ScoreMap& scores,
                                        const ExperimentSpec& spec);

/// Evaluation environment: BoR terminal reward in bits for every method so rows compare.
[[nodiscard]] EpisodeConfig evaluation_config(const ExperimentSpec& spec);

struct MethodRun {
    MethodSpec method;
    std::vector<std::uint64_t> seeds;
    std::vector<std::vector<EpisodeTrace>> traces;
};

struct ExperimentResult {
    std::vector<MethodRun> runs;
    EvalReport report;
};

/// (method name, seed)
using PolicyKey = std::pair<std::string, std::uint64_t>;
using TrainedPolicies = std::map<PolicyKey, TrainResult>;
using PolicyStore = std::map<PolicyKey, Policy>;

/// Trains every learned method for every seed on the training split.
[[nodiscard]] TrainedPolicies train_methods(const PreparedData& data, const ExperimentSpec& spec);

/// Evaluates every method on the test split. Learned methods are looked up in
/// `learned` and a missing (method, seed) entry is a DataError.
[[nodiscard]] ExperimentResult evaluate_methods(const PreparedData& data,
                                                const ExperimentSpec& spec,
                                                const PolicyStore& learned);

/// prepare_data + train_methods + evaluate_methods.
[[nodiscard]] ExperimentResult run_experiment(const Benchmark& benchmark, const ScoreMap& scores,
                                              const ExperimentSpec& spec);

/// Greedy evaluation of a fixed policy on prepared lists.
[[nodiscard]] std::vector<EpisodeTrace> evaluate(const Policy& policy,
                                                 std::span<const LabeledList> lists,
                                                 const EpisodeConfig& cfg);

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. The first exception is rethrown.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

/// Stable 64-bit seed derived from a base seed and a label.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

}  // namespace bordepth
