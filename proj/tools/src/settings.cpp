#include "bordepth_cli/settings.hpp"

#include <array>
#include <charconv>

#include <fmt/format.h>

#include "bordepth/errors.hpp"

namespace bordepth::cli {

namespace {

constexpr std::array<std::string_view, 44> kKnownKeys{
    "synth.preset",        "synth.seed",         "synth.candidates",
    "synth.queries",       "synth.found_at_1",   "synth.rank_tail",
    "synth.score_noise",   "synth.confidence_coupling", "synth.clarity_jitter",
    "data.dir",            "data.tools",         "data.queries",
    "data.scores",         "scorer",             "bm25.k1",
    "bm25.b",              "condition",          "candidates.size",
    "candidates.hard",     "candidates.fill",    "split.train_fraction",
    "split.seed",          "env.step_cost",      "env.gamma",
    "train.relevance",     "eval.relevance",     "learner",
    "train.passes",        "train.epsilon_start", "train.epsilon_end",
    "train.epsilon_decay", "train.alpha_min",    "dqn.hidden",
    "dqn.learning_rate",   "dqn.replay_capacity", "dqn.batch_size",
    "dqn.target_sync",     "dqn.warmup",         "methods",
    "seeds",               "buckets",            "jobs",
    "eval.policy_dir",     "eval.shortlists",
};

constexpr std::array<std::string_view, 5> kPathKeys{"data.dir", "data.tools", "data.queries",
                                                    "data.scores", "eval.policy_dir"};

std::uint64_t parse_u64(std::string_view key, const std::string& text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw ConfigError(fmt::format("{}: '{}' is not an unsigned integer", key, text));
    }
    return v;
}

}  // namespace

Settings parse_settings(const Config& c) {
    c.check_keys(kKnownKeys);
    Settings s;

    auto& d = s.data;
    d.preset = c.get_string("synth.preset", "strong");
    d.synth = synthetic_preset(d.preset);
    d.synth_seed = c.get_uint("synth.seed", d.synth_seed);
    d.synth.candidates = c.get_int("synth.candidates", d.synth.candidates);
    d.synth.num_queries = c.get_uint("synth.queries", d.synth.num_queries);
    d.synth.found_at_1 = c.get_double("synth.found_at_1", d.synth.found_at_1);
    d.synth.rank_tail = c.get_double("synth.rank_tail", d.synth.rank_tail);
    d.synth.score_noise = c.get_double("synth.score_noise", d.synth.score_noise);
    d.synth.confidence_coupling =
        c.get_double("synth.confidence_coupling", d.synth.confidence_coupling);
    d.synth.clarity_jitter = c.get_double("synth.clarity_jitter", d.synth.clarity_jitter);
    d.synth.validate();

    if (const auto dir = c.get_path("data.dir"); !dir.empty()) {
        d.tools = dir / "tools.jsonl";
        d.queries = dir / "queries.jsonl";
        if (std::filesystem::exists(dir / "scores.jsonl")) {
            d.scores = dir / "scores.jsonl";
        }
    }
    if (c.has("data.tools")) d.tools = c.get_path("data.tools");
    if (c.has("data.queries")) d.queries = c.get_path("data.queries");
    if (c.has("data.scores")) d.scores = c.get_path("data.scores");
    if (d.tools.empty() != d.queries.empty()) {
        throw ConfigError("data.tools and data.queries must be given together");
    }
    d.scorer = c.get_string("scorer", "auto");
    if (d.scorer != "auto" && d.scorer != "file" && d.scorer != "bm25") {
        throw ConfigError(fmt::format("scorer must be auto, file or bm25, not '{}'", d.scorer));
    }
    if (d.scorer == "file" && d.from_files() && d.scores.empty()) {
        throw ConfigError("scorer = file needs data.scores");
    }
    d.bm25.k1 = c.get_double("bm25.k1", d.bm25.k1);
    d.bm25.b = c.get_double("bm25.b", d.bm25.b);

    auto& e = s.experiment;
    e.condition = c.get_string("condition", e.condition);
    e.candidates.size = c.get_int("candidates.size", e.candidates.size);
    e.candidates.hard_count = c.get_int("candidates.hard", e.candidates.hard_count);
    e.candidates.fill = parse_fill_mode(c.get_string("candidates.fill", "random"));
    e.train_fraction = c.get_double("split.train_fraction", e.train_fraction);
    e.data_seed = c.get_uint("split.seed", e.data_seed);
    e.env.step_cost = c.get_double("env.step_cost", e.env.step_cost);
    e.env.gamma = c.get_double("env.gamma", e.env.gamma);
    e.env.relevance = parse_relevance_mode(c.get_string("train.relevance", "oracle"));
    e.env.validate();
    e.eval_relevance = parse_relevance_mode(c.get_string("eval.relevance", "assume_one"));
    e.learner = parse_learner_kind(c.get_string("learner", "tabular"));

    auto& hp = e.hp;
    hp.passes = c.get_uint("train.passes", hp.passes);
    hp.epsilon_start = c.get_double("train.epsilon_start", hp.epsilon_start);
    hp.epsilon_end = c.get_double("train.epsilon_end", hp.epsilon_end);
    hp.epsilon_decay_fraction = c.get_double("train.epsilon_decay", hp.epsilon_decay_fraction);
    hp.alpha_min = c.get_double("train.alpha_min", hp.alpha_min);
    if (c.has("dqn.hidden")) {
        hp.hidden_layers.clear();
        for (const auto& w : c.get_list("dqn.hidden", {})) {
            hp.hidden_layers.push_back(parse_u64("dqn.hidden", w));
        }
    }
    hp.learning_rate = c.get_double("dqn.learning_rate", hp.learning_rate);
    hp.replay_capacity = c.get_uint("dqn.replay_capacity", hp.replay_capacity);
    hp.batch_size = c.get_uint("dqn.batch_size", hp.batch_size);
    hp.target_sync_interval = c.get_uint("dqn.target_sync", hp.target_sync_interval);
    hp.warmup_transitions = c.get_uint("dqn.warmup", hp.warmup_transitions);
    hp.validate();

    e.methods.clear();
    for (const auto& m : c.get_list("methods", {"bor", "f1", "fk1", "fk5"})) {
        e.methods.push_back(parse_method(m));
    }
    for (std::size_t i = 0; i < e.methods.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (e.methods[i].name == e.methods[j].name) {
                throw ConfigError(fmt::format("method '{}' listed twice", e.methods[i].name));
            }
        }
    }
    e.seeds.clear();
    for (const auto& seed : c.get_list("seeds", {"1", "2", "3"})) {
        e.seeds.push_back(parse_u64("seeds", seed));
    }
    if (e.methods.empty() || e.seeds.empty()) {
        throw ConfigError("methods and seeds must not be empty");
    }
    e.buckets = parse_bucket_scheme(c.get_string("buckets", "wide"));
    e.jobs = c.get_uint("jobs", 1);
    if (e.jobs == 0) {
        throw ConfigError("jobs must be >= 1");
    }

    s.policy_dir = c.get_path("eval.policy_dir");
    s.shortlists = c.get_bool("eval.shortlists", false);
    return s;
}

std::pair<Benchmark, ScoreMap> load_data(const DataSettings& d) {
    Benchmark b;
    if (d.from_files()) {
        const bool want_file = d.scorer != "bm25" && !d.scores.empty();
        b = load_benchmark(d.tools, d.queries,
                           want_file ? std::optional(d.scores) : std::nullopt);
    } else {
        b = generate_synthetic(d.synth, d.synth_seed);
        if (d.scorer == "bm25") {
            b.scores.reset();
        }
    }
    ScoreMap scores = b.scores ? *b.scores : bm25_scores(b, d.bm25);
    return {std::move(b), std::move(scores)};
}

Config manifest_config(const Config& config) {
    Config m = config;
    for (const auto key : kPathKeys) {
        if (m.has(key)) {
            const auto p = config.get_path(key);
            m.set(std::string(key), p.empty() ? std::string()
                                              : std::filesystem::absolute(p).lexically_normal().string());
        }
    }
    if (!m.has("seeds")) m.set("seeds", "1,2,3");
    if (!m.has("split.seed")) m.set("split.seed", "0");
    if (!m.has("synth.seed") && !m.has("data.dir") && !m.has("data.tools")) {
        m.set("synth.seed", "7");
    }
    return m;
}

}  // namespace bordepth::cli
