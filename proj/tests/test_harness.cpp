#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>

#include "bordepth/errors.hpp"
#include "bordepth/harness.hpp"
#include "bordepth/synthetic.hpp"

using namespace bordepth;

namespace {

Benchmark small_benchmark() {
    Benchmark b;
    for (int i = 0; i < 40; ++i) {
        b.registry.push_back({"t" + std::to_string(10 + i), "", "", {}});
    }
    ScoreMap scores;
    for (int q = 0; q < 3; ++q) {
        Query query{"q" + std::to_string(q), "", {"t" + std::to_string(10 + q), "t49"}};
        ScoreVector v{query.id, {}};
        for (int i = 0; i < 40; ++i) {
            v.entries.push_back({b.registry[static_cast<std::size_t>(i)].id, 0.01 * ((i * 7 + q) % 40)});
        }
        scores.emplace(query.id, v);
        b.queries.push_back(query);
    }
    b.scores = scores;
    return b;
}

std::string summary_bytes(const EvalReport& r) {
    std::ostringstream out;
    const std::vector<EvalReport> rs{r};
    write_summary_csv(out, rs);
    write_seeds_csv(out, rs);
    write_buckets_csv(out, rs);
    return out.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("candidate set of the whole registry") {
    const auto b = small_benchmark();
    const auto set = build_candidate_set(b.queries[0], b.registry, b.scores->at("q0"), {}, 1);
    CHECK(set.size() == 40);
}

TEST_CASE("random fill keeps gold and hard distractors") {
    const auto b = small_benchmark();
    const auto& q = b.queries[1];
    const auto& scores = b.scores->at(q.id);
    const CandidateSpec spec{20, 5, FillMode::random};
    const auto set = build_candidate_set(q, b.registry, scores, spec, 9);
    REQUIRE(set.size() == 20);
    const std::set<std::string> members(set.members.begin(), set.members.end());
    CHECK(members.size() == 20);
    for (const auto& g : q.gold_ids) {
        CHECK(members.contains(g));
    }
    ScoreVector distractors{q.id, {}};
    for (const auto& e : scores.entries) {
        if (std::find(q.gold_ids.begin(), q.gold_ids.end(), e.tool_id) == q.gold_ids.end()) {
            distractors.entries.push_back(e);
        }
    }
    const auto ranked = rank(distractors);
    for (int i = 0; i < 5; ++i) {
        CHECK(members.contains(ranked.entries[static_cast<std::size_t>(i)].tool_id));
    }
    const auto again = build_candidate_set(q, b.registry, scores, spec, 9);
    CHECK(again.members == set.members);
    const auto other = build_candidate_set(q, b.registry, scores, spec, 10);
    CHECK(other.members != set.members);
}

TEST_CASE("fill none takes the top distractors") {
    const auto b = small_benchmark();
    const auto& q = b.queries[2];
    const auto set = build_candidate_set(q, b.registry, b.scores->at(q.id), {10, 0, FillMode::none}, 1);
    REQUIRE(set.size() == 10);
    const auto restricted = restrict_scores(b.scores->at(q.id), set);
    double worst_member = 1e9;
    for (const auto& e : restricted.entries) {
        if (std::find(q.gold_ids.begin(), q.gold_ids.end(), e.tool_id) == q.gold_ids.end()) {
            worst_member = std::min(worst_member, e.score);
        }
    }
    const std::set<std::string> members(set.members.begin(), set.members.end());
    for (const auto& e : b.scores->at(q.id).entries) {
        if (!members.contains(e.tool_id)) {
            CHECK(e.score <= worst_member);
        }
    }
}

TEST_CASE("infeasible candidate specs") {
    const auto b = small_benchmark();
    const auto& q = b.queries[0];
    const auto& s = b.scores->at(q.id);
    CHECK_THROWS_AS((void)build_candidate_set(q, b.registry, s, {41, 0, FillMode::random}, 1), ConfigError);
    CHECK_THROWS_AS((void)build_candidate_set(q, b.registry, s, {5, 4, FillMode::random}, 1), ConfigError);
    CHECK_THROWS_AS((void)build_candidate_set(q, b.registry, s, {1, 0, FillMode::random}, 1), ConfigError);
}

TEST_CASE("split") {
    std::vector<Query> qs;
    for (int i = 0; i < 10; ++i) {
        qs.push_back({"q" + std::to_string(i), "", {"x"}});
    }
    const auto [train, test] = split(qs, 0.7, 4);
    CHECK(train.size() == 7);
    CHECK(test.size() == 3);
    std::set<std::string> all;
    for (const auto& q : train) all.insert(q.id);
    for (const auto& q : test) all.insert(q.id);
    CHECK(all.size() == 10);
    CHECK(std::is_sorted(train.begin(), train.end(), [](auto& a, auto& b) { return a.id < b.id; }));
    const auto again = split(qs, 0.7, 4);
    CHECK(again.first.size() == 7);
    CHECK(again.first[0].id == train[0].id);
    CHECK(split(qs, 0.01, 1).first.size() == 1);
    CHECK(split(qs, 0.99, 1).second.size() == 1);
    CHECK_THROWS_AS((void)split(qs, 1.0, 1), ConfigError);
}

TEST_CASE("method names") {
    CHECK(parse_method("bor").learned);
    CHECK(parse_method("f1").reward == RewardKind::f1);
    const auto fk = parse_method("fk5");
    CHECK_FALSE(fk.learned);
    CHECK(fk.fixed_k == 5);
    CHECK(parse_method("fixed:12").name == "fk12");
    CHECK_THROWS_AS((void)parse_method("fk0"), ConfigError);
    CHECK_THROWS_AS((void)parse_method("fkx"), ConfigError);
    CHECK_THROWS_AS((void)parse_method("magic"), ConfigError);
}

TEST_CASE("buckets") {
    EpisodeTrace t;
    const auto label = [&](std::int64_t r, BucketScheme s) {
        t.gold_rank = r;
        return std::string(bucketize(t, s).label);
    };
    CHECK(label(1, BucketScheme::wide) == "easy");
    CHECK(label(2, BucketScheme::wide) == "medium");
    CHECK(label(5, BucketScheme::wide) == "medium");
    CHECK(label(6, BucketScheme::wide) == "hard");
    CHECK(label(20, BucketScheme::wide) == "hard");
    CHECK(label(21, BucketScheme::wide) == "very_hard");
    CHECK(label(0, BucketScheme::wide) == "very_hard");
    CHECK(label(3, BucketScheme::narrow) == "medium");
    CHECK(label(4, BucketScheme::narrow) == "hard");
    CHECK(label(11, BucketScheme::narrow) == "very_hard");
    CHECK(buckets(BucketScheme::narrow).size() == 4);
    CHECK_THROWS_AS((void)parse_bucket_scheme("fine"), ConfigError);
}

TEST_CASE("parallel_for") {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(100, 4, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) {
        CHECK(h.load() == 1);
    }
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                     if (i == 7) throw DataError("boom");
                                 }),
                    DataError);
}

TEST_CASE("derive_seed") {
    CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
    CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
    CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
}

TEST_CASE("experiment on the tiny preset") {
    auto spec = synthetic_preset("tiny");
    spec.num_queries = 120;
    const auto b = generate_synthetic(spec, 2);
    ExperimentSpec e;
    e.hp.passes = 15;
    for (const auto* m : {"bor", "f1", "fk1", "fk3"}) {
        e.methods.push_back(parse_method(m));
    }
    e.seeds = {1, 2};
    const auto data = prepare_data(b, *b.scores, e);
    CHECK(data.train.size() == 84);
    CHECK(data.test.size() == 36);
    CHECK(data.candidate_n == 10);

    const auto result = run_experiment(b, *b.scores, e);
    REQUIRE(result.report.methods.size() == 4);

    std::size_t at1 = 0;
    for (const auto& l : data.test) {
        at1 += l.ranked.rank_of(l.gold.front()) == 1 ? 1 : 0;
    }
    CHECK(result.report.method("fk1").found_pct == 100.0 * static_cast<double>(at1) / 36.0);

    for (const auto& m : result.report.methods) {
        std::size_t n = 0;
        for (const auto& bk : result.report.buckets) {
            n += bk.method == m.method ? bk.n : 0;
        }
        CHECK(n == 36);
    }

    e.jobs = 3;
    const auto threaded = run_experiment(b, *b.scores, e);
    CHECK(summary_bytes(threaded.report) == summary_bytes(result.report));
}

TEST_CASE("evaluate_methods needs every learned policy") {
    const auto b = generate_synthetic(synthetic_preset("tiny"), 2);
    ExperimentSpec e;
    e.methods = {parse_method("bor")};
    const auto data = prepare_data(b, *b.scores, e);
    CHECK_THROWS_AS((void)evaluate_methods(data, e, {}), DataError);
    PolicyStore store;
    store.emplace(PolicyKey{"bor", 1}, FixedKPolicy{2});
    const auto r = evaluate_methods(data, e, store);
    CHECK(r.report.method("bor").mean_k == 2.0);
}

TEST_CASE("missing scores are a data error") {
    auto b = small_benchmark();
    ScoreMap partial = *b.scores;
    partial.erase("q1");
    ExperimentSpec e;
    e.methods = {parse_method("fk1")};
    CHECK_THROWS_AS((void)prepare_data(b, partial, e), DataError);
}

}
