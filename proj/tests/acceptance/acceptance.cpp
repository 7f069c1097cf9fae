// One line per primary acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bordepth/harness.hpp"
#include "bordepth/metric.hpp"
#include "bordepth/synthetic.hpp"
#include "bordepth_cli/commands.hpp"
#include "combinatorics.hpp"
#include "toy_mdp.hpp"

using namespace bordepth;
namespace fs = std::filesystem;

namespace {

// Tolerances and thresholds, fixed.
constexpr double kExactRelTol = 1e-12;
constexpr double kMonteCarloSigmas = 3.0;
constexpr std::size_t kMonteCarloDraws = 1'000'000;
constexpr double kMetricSeconds = 60.0;
constexpr double kConstantTol = 1e-3;
constexpr double kDoublingTol = 1e-9;
constexpr int kToyInstances = 100;
constexpr double kToyMatchRate = 0.95;
constexpr double kToySeconds = 300.0;
constexpr double kStrongMaxK = 10.0;
constexpr double kFoundMarginPts = 5.0;
constexpr double kWeakKRatio = 3.0;
constexpr double kHardEasyKRatio = 1.5;
constexpr double kF1BucketBand = 1.0;
constexpr std::int64_t kBigN = 8'841'823;

// Synthetic data and split seeds, same defaults as the command-line tool.
constexpr std::uint64_t kSynthSeed = 7;
constexpr std::uint64_t kSplitSeed = 0;
const std::vector<std::uint64_t> kSeeds{1, 2, 3};

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentSpec experiment(std::vector<std::string> methods) {
    ExperimentSpec e;
    e.data_seed = kSplitSeed;
    e.seeds = kSeeds;
    for (const auto& m : methods) {
        e.methods.push_back(parse_method(m));
    }
    return e;
}

EvalReport run_preset(const std::string& preset, std::vector<std::string> methods) {
    const auto b = generate_synthetic(synthetic_preset(preset), kSynthSeed);
    auto e = experiment(std::move(methods));
    e.condition = preset;
    return run_experiment(b, *b.scores, e).report;
}

Outcome metric_exactness() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_exact = 0.0;
    for (std::int64_t n = 1; n <= 30; ++n) {
        for (std::int64_t r = 1; r <= std::min<std::int64_t>(5, n); ++r) {
            for (std::int64_t k = 1; k <= n; ++k) {
                const double want = oracle::p_rand(n, r, k);
                worst_exact = std::max(worst_exact, std::abs(metric::p_rand({n, r, k}) - want) / want);
            }
        }
    }

    const std::vector<metric::SelectionContext> mc_cases{
        {30, 1, 1}, {30, 1, 15}, {30, 2, 3}, {30, 5, 4}, {25, 3, 10}, {10, 5, 2}, {20, 4, 1}, {17, 2, 8}};
    double worst_sigma = 0.0;
    std::uint64_t seed = 1;
    for (const auto& c : mc_cases) {
        const auto est = oracle::monte_carlo_p_rand(c.corpus_size, c.relevant_count, c.depth,
                                                    kMonteCarloDraws, seed++);
        worst_sigma = std::max(worst_sigma, std::abs(est.p - metric::p_rand(c)) / est.standard_error);
    }

    double worst_shortcut = 0.0;
    for (std::int64_t n = 1; n <= 10'000; ++n) {
        for (std::int64_t k = 1; k <= n; ++k) {
            const double a = metric::p_rand({n, 1, k});
            const double b = metric::p_rand_log_space({n, 1, k});
            worst_shortcut = std::max(worst_shortcut, std::abs(a - b) / b);
        }
    }
    const double secs = seconds_since(t0);
    const bool pass = worst_exact <= kExactRelTol && worst_sigma <= kMonteCarloSigmas &&
                      worst_shortcut <= kExactRelTol && secs < kMetricSeconds;
    return {pass, fmt::format("exact rel err {:.2e}, Monte Carlo worst {:.2f} SE over {} cases, "
                              "R=1 shortcut rel err {:.2e}, {:.1f}s",
                              worst_exact, worst_sigma, mc_cases.size(), worst_shortcut, secs)};
}

Outcome reference_constants() {
    const double k3 = metric::bor_max({500, 1, 3}).value();
    const double k100 = metric::bor_max({500, 1, 100}).value();
    const double ceiling = metric::bor_opt(100, 50).value();
    bool iff = true;
    for (const double p_obs : {1.0, 0.5, 0.37, 0.01}) {
        iff = iff && metric::bor(p_obs, p_obs / 1024.0).value() == 10.0;
        iff = iff && std::abs(metric::bor(p_obs, p_obs / 1023.0).value() - 10.0) > 1e-4;
        iff = iff && std::abs(metric::bor(p_obs, p_obs / 1025.0).value() - 10.0) > 1e-4;
    }
    const bool pass = std::abs(k3 - 7.381) <= kConstantTol && std::abs(k100 - 2.322) <= kConstantTol &&
                      std::abs(ceiling - 1.0) <= kConstantTol && iff;
    return {pass, fmt::format("bor_max(500,1,3)={:.4f} bor_max(500,1,100)={:.4f} bor_opt(100,50)={:.4f} "
                              "BoR=10 iff ratio 1024: {}",
                              k3, k100, ceiling, iff ? "yes" : "no")};
}

Outcome doubling_rule() {
    std::size_t exact = 0;
    std::size_t total = 0;
    for (const std::int64_t n : std::array<std::int64_t, 4>{64, 100, 1000, kBigN}) {
        for (const double p_obs : {0.9, 0.42}) {
            for (std::int64_t k = 1; 2 * k <= n && k <= 4096; k *= 2) {
                const auto a = metric::bor(p_obs, metric::p_rand({n, 1, k}));
                const auto b = metric::bor(p_obs, metric::p_rand({n, 1, 2 * k}));
                exact += (b - a).value() == -1.0 ? 1 : 0;
                ++total;
            }
        }
    }
    double worst = 0.0;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10'000; ++i) {
        const std::int64_t n = std::uniform_int_distribution<std::int64_t>(2, 1'000'000)(rng);
        std::uniform_int_distribution<std::int64_t> pick(1, n);
        const std::int64_t k1 = pick(rng);
        const std::int64_t k2 = pick(rng);
        const double delta = (metric::bor(0.7, metric::p_rand({n, 1, k2})) -
                              metric::bor(0.7, metric::p_rand({n, 1, k1}))).value();
        worst = std::max(worst, std::abs(delta + std::log2(static_cast<double>(k2) / static_cast<double>(k1))));
        worst = std::max(worst, std::abs(delta - metric::doubling_delta(k1, k2).value()));
    }
    return {exact == total && worst <= kDoublingTol,
            fmt::format("K->2K exactly -1 bit in {}/{} cases, K1->K2 worst deviation {:.1e}", exact, total, worst)};
}

Outcome toy_optimality() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    int matched = 0;
    for (int inst = 0; inst < kToyInstances; ++inst) {
        const std::int64_t n = std::uniform_int_distribution<std::int64_t>(2, 32)(rng);
        oracle::Toy toy;
        toy.n = n;
        toy.reward = static_cast<oracle::Reward>(std::uniform_int_distribution<int>(0, 2)(rng));
        toy.step_cost = std::array{0.0, 0.01, 0.05}[std::uniform_int_distribution<int>(0, 2)(rng)];
        toy.gamma = std::array{0.9, 0.95, 1.0}[std::uniform_int_distribution<int>(0, 2)(rng)];
        const int r = std::uniform_real_distribution<double>(0, 1)(rng) < 0.1
                          ? 0
                          : std::uniform_int_distribution<int>(1, static_cast<int>(std::min<std::int64_t>(3, n)))(rng);
        std::vector<std::int64_t> ranks(static_cast<std::size_t>(n));
        std::iota(ranks.begin(), ranks.end(), 1);
        std::shuffle(ranks.begin(), ranks.end(), rng);
        toy.gold_ranks.assign(ranks.begin(), ranks.begin() + r);

        std::vector<double> scores(static_cast<std::size_t>(n));
        for (auto& s : scores) s = std::uniform_real_distribution<double>(0, 1)(rng);
        std::sort(scores.begin(), scores.end(), std::greater<>());
        LabeledList list;
        list.ranked.query_id = fmt::format("toy{}", inst);
        for (std::int64_t i = 0; i < n; ++i) {
            list.ranked.entries.push_back({fmt::format("t{:02}", i), scores[static_cast<std::size_t>(i)]});
        }
        for (const auto g : toy.gold_ranks) {
            list.gold.push_back(fmt::format("t{:02}", g - 1));
        }
        if (list.gold.empty()) {
            list.gold.push_back("not-in-list");
        }

        EpisodeConfig cfg;
        cfg.reward_kind = std::array{RewardKind::bor, RewardKind::f1, RewardKind::constant_one}[static_cast<int>(toy.reward)];
        cfg.step_cost = toy.step_cost;
        cfg.gamma = toy.gamma;
        cfg.relevance = RelevanceMode::oracle;
        Hyperparams hp;
        hp.passes = 3000;
        const std::vector<LabeledList> episodes{list};
        const auto trained = train_tabular(episodes, cfg, hp, static_cast<std::uint64_t>(inst) + 1);
        const auto trace = rollout(trained.policy, list.ranked, list.gold, cfg);

        const auto returns = oracle::returns_by_depth(toy);
        const double best = *std::max_element(returns.begin(), returns.end());
        matched += returns[static_cast<std::size_t>(trace.chosen_k - 1)] >= best - 1e-9 ? 1 : 0;
    }
    const double secs = seconds_since(t0);
    const double rate = matched / static_cast<double>(kToyInstances);
    return {rate >= kToyMatchRate && secs < kToySeconds,
            fmt::format("{}/{} greedy depths attain the enumerated optimum, {:.1f}s", matched, kToyInstances, secs)};
}

Outcome self_pruning() {
    const auto strong = run_preset("strong", {"bor", "fk1"});
    const auto weak = run_preset("weak", {"bor"});
    const auto& s = strong.method("bor");
    const double margin = s.found_pct - strong.method("fk1").found_pct;
    const double ratio = weak.method("bor").mean_k / s.mean_k;
    return {s.mean_k < kStrongMaxK && margin >= kFoundMarginPts && ratio >= kWeakKRatio,
            fmt::format("strong: K={:.2f} found {:.1f}% vs FixedK(1) {:.1f}% (+{:.1f}); weak: K={:.2f} ({:.1f}x)",
                        s.mean_k, s.found_pct, strong.method("fk1").found_pct, margin,
                        weak.method("bor").mean_k, ratio)};
}

Outcome difficulty_adaptation() {
    const auto r = run_preset("mixed", {"bor", "f1"});
    std::vector<double> bor_k;
    std::string bor_text, f1_text;
    bool monotone = true;
    double f1_dev = 0.0;
    const double f1_mean = r.method("f1").mean_k;
    for (const auto& b : buckets(BucketScheme::wide)) {
        const auto& bb = r.bucket("bor", b.label);
        const auto& fb = r.bucket("f1", b.label);
        if (!bb.mean_k || !fb.mean_k) {
            return {false, fmt::format("bucket {} is empty", b.label)};
        }
        if (!bor_k.empty() && *bb.mean_k < bor_k.back()) {
            monotone = false;
        }
        bor_k.push_back(*bb.mean_k);
        f1_dev = std::max(f1_dev, std::abs(*fb.mean_k - f1_mean));
        bor_text += fmt::format(" {:.2f}", *bb.mean_k);
        f1_text += fmt::format(" {:.2f}", *fb.mean_k);
    }
    const double ratio = bor_k.back() / bor_k.front();
    return {monotone && ratio >= kHardEasyKRatio && f1_dev <= kF1BucketBand,
            fmt::format("bor bucket K{} (very_hard/easy {:.2f}x); f1 bucket K{} vs mean {:.2f} (max dev {:.2f})",
                        bor_text, ratio, f1_text, f1_mean, f1_dev)};
}

Outcome f1_values() {
    bool ok = true;
    const std::vector<std::pair<std::int64_t, double>> want{{1, 1.0}, {4, 0.4}, {9, 0.2}};
    EpisodeConfig cfg;
    cfg.reward_kind = RewardKind::f1;
    RankedList list{"q", {}};
    for (int i = 0; i < 20; ++i) {
        list.entries.push_back({fmt::format("t{:02}", i), 1.0 - 0.01 * i});
    }
    const std::vector<std::string> gold{"t00"};
    for (const auto& [k, v] : want) {
        ok = ok && terminal_reward(RewardKind::f1, 20, 1, k, true) == v;
        ok = ok && rollout(FixedKPolicy{k}, list, gold, cfg).terminal_reward == v;
    }
    cfg.reward_kind = RewardKind::constant_one;
    for (std::int64_t k = 1; k <= 20; ++k) {
        ok = ok && terminal_reward(RewardKind::constant_one, 20, 1, k, true) == 1.0;
        ok = ok && rollout(FixedKPolicy{k}, list, gold, cfg).terminal_reward == 1.0;
    }
    return {ok, ok ? "F1 at K=1,4,9 is 1.0, 0.4, 0.2 exactly; constant_one is 1 at every depth"
                   : "terminal reward mismatch"};
}

Outcome fixed_k_oracle() {
    const auto b = generate_synthetic(synthetic_preset("mixed"), kSynthSeed);
    std::vector<std::string> methods;
    const auto n = static_cast<std::int64_t>(b.registry.size());
    for (std::int64_t k = 1; k <= n; ++k) {
        methods.push_back(fmt::format("fk{}", k));
    }
    auto e = experiment(methods);
    e.seeds = {1};
    const auto data = prepare_data(b, *b.scores, e);
    const auto report = evaluate_methods(data, e, {}).report;

    // Gold rank straight from the raw scores: count tools ordered ahead of the gold.
    std::vector<std::int64_t> gold_rank;
    for (const auto& l : data.test) {
        const auto& raw = b.scores->at(l.ranked.query_id).entries;
        std::int64_t best = n + 1;
        for (const auto& g : l.gold) {
            const auto it = std::find_if(raw.begin(), raw.end(), [&](auto& e) { return e.tool_id == g; });
            std::int64_t ahead = 0;
            for (const auto& o : raw) {
                ahead += (o.score > it->score || (o.score == it->score && o.tool_id < it->tool_id)) ? 1 : 0;
            }
            best = std::min(best, ahead + 1);
        }
        gold_rank.push_back(best);
    }
    std::int64_t mismatches = 0;
    for (std::int64_t k = 1; k <= n; ++k) {
        const auto hits = std::count_if(gold_rank.begin(), gold_rank.end(), [&](auto r) { return r <= k; });
        const double want = 100.0 * static_cast<double>(hits) / static_cast<double>(gold_rank.size());
        mismatches += report.method(fmt::format("fk{}", k)).found_pct == want ? 0 : 1;
    }
    return {mismatches == 0, fmt::format("{} of {} depths disagree with rank counts on {} test queries",
                                         mismatches, n, gold_rank.size())};
}

Outcome big_n() {
    const std::vector<std::int64_t> rs{1, 2, 3, 5, 10, 20, 50, 100, 200, 500};
    std::size_t evaluated = 0;
    bool finite = true;
    bool monotone = true;
    std::vector<double> prev_r(1000, 0.0);
    for (const auto r : rs) {
        double prev_p = 0.0;
        double prev_miss = 0.0;
        for (std::int64_t k = 1; k <= 1000; ++k) {
            const metric::SelectionContext c{kBigN, r, k};
            const double p = metric::p_rand(c);
            const double miss = metric::log_miss_probability(c);
            const auto bits = metric::bor_max(c);
            finite = finite && std::isfinite(p) && p > 0.0 && p <= 1.0 && std::isfinite(miss) && bits.is_finite();
            monotone = monotone && p >= prev_p && (k == 1 || miss < prev_miss);
            monotone = monotone && p >= prev_r[static_cast<std::size_t>(k - 1)];
            prev_r[static_cast<std::size_t>(k - 1)] = p;
            prev_p = p;
            prev_miss = miss;
            ++evaluated;
        }
    }
    double prev_opt = std::numeric_limits<double>::infinity();
    for (std::int64_t k = 1; k <= 1000; ++k) {
        const auto o = metric::bor_opt(kBigN, k);
        finite = finite && o.is_finite();
        monotone = monotone && o.value() < prev_opt;
        prev_opt = o.value();
    }
    return {finite && monotone,
            fmt::format("{} (R,K) pairs at N={}: finite {}, monotone in K and R {}; bor_opt(N,1)={:.3f} bits",
                        evaluated, kBigN, finite ? "yes" : "no", monotone ? "yes" : "no",
                        metric::bor_opt(kBigN, 1).value())};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"bordepth"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    if (code != 0) {
        std::cerr << err.str();
    }
    return code;
}

Outcome reproducibility() {
    const fs::path root = fs::temp_directory_path() / "bordepth_acceptance_repro";
    fs::remove_all(root);
    fs::create_directories(root);
    {
        std::ofstream cfg(root / "grid.cfg");
        cfg << "synth.preset = mixed\nsynth.queries = 400\nseeds = 1, 2\n"
               "candidates.hard = 5\nsweep.candidates.size = 20 ; 50\nsweep.learner = tabular ; dqn\ntrain.passes = 10\n";
    }
    const auto a = root / "a";
    const auto b = root / "b";
    const auto c = root / "c";
    if (run_cli({"sweep", "-c", (root / "grid.cfg").string(), "-o", a.string(), "-j", "2"}) != 0 ||
        run_cli({"sweep", "-c", (root / "grid.cfg").string(), "-o", b.string(), "-j", "1"}) != 0 ||
        run_cli({"sweep", "-c", (a / "manifest.cfg").string(), "-o", c.string()}) != 0) {
        return {false, "sweep run failed"};
    }
    std::size_t identical = 0;
    std::size_t files = 0;
    std::vector<fs::path> csvs;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (entry.path().extension() == ".csv") {
            csvs.push_back(fs::relative(entry.path(), a));
        }
    }
    for (const auto& rel : csvs) {
        const auto bytes = slurp(a / rel);
        ++files;
        identical += (bytes == slurp(b / rel) && bytes == slurp(c / rel) && !bytes.empty()) ? 1 : 0;
    }
    fs::remove_all(root);
    return {files > 0 && identical == files,
            fmt::format("{}/{} CSVs byte-identical across three runs (2 jobs, 1 job, rerun from manifest)",
                        identical, files)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"metric exactness", metric_exactness},
        {"reference constants", reference_constants},
        {"doubling rule", doubling_rule},
        {"toy MDP optimality", toy_optimality},
        {"self-pruning", self_pruning},
        {"difficulty adaptation", difficulty_adaptation},
        {"F1 reward values", f1_values},
        {"FixedK oracle", fixed_k_oracle},
        {"big-N safety", big_n},
        {"reproducibility", reproducibility},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, fmt::format("threw: {}", e.what())};
        }
        failed += o.pass ? 0 : 1;
        std::cout << fmt::format("[{}] {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail) << std::flush;
    }
    std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
