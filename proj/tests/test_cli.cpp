#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bordepth_cli/commands.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "bordepth");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = bordepth::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("bordepth_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t lines(const fs::path& p) {
    const auto s = slurp(p);
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("synth, score, train, eval") {
    const auto root = scratch("pipeline");
    const std::string data = (root / "data").string();
    auto r = cli({"synth", "-s", "synth.preset=tiny", "-o", data});
    REQUIRE(r.code == 0);
    CHECK(lines(root / "data" / "tools.jsonl") == 10);
    CHECK(lines(root / "data" / "queries.jsonl") == 50);
    CHECK(lines(root / "data" / "scores.jsonl") == 50);
    CHECK(fs::exists(root / "data" / "manifest.cfg"));

    r = cli({"score", "-s", "data.dir=" + data, "-o", (root / "bm25").string()});
    REQUIRE(r.code == 0);
    CHECK(lines(root / "bm25" / "scores.jsonl") == 50);

    r = cli({"train", "-s", "data.dir=" + data, "-s", "train.passes=5", "-s", "seeds=4",
             "-o", (root / "train").string()});
    REQUIRE(r.code == 0);
    CHECK(fs::exists(root / "train" / "policies" / "bor-seed4.policy"));
    CHECK(fs::exists(root / "train" / "policies" / "fk5.policy"));
    CHECK(lines(root / "train" / "train_log.csv") == 1 + 2 * 5);
    const auto first_policy = slurp(root / "train" / "policies" / "bor-seed4.policy");

    // same seed, same bytes
    r = cli({"train", "-s", "data.dir=" + data, "-s", "train.passes=5", "-s", "seeds=4",
             "-o", (root / "train2").string()});
    REQUIRE(r.code == 0);
    CHECK(slurp(root / "train2" / "policies" / "bor-seed4.policy") == first_policy);

    r = cli({"eval", "-s", "data.dir=" + data, "-s", "seeds=4", "-s",
             "eval.policy_dir=" + (root / "train" / "policies").string(), "-s",
             "eval.shortlists=true", "-o", (root / "eval").string()});
    REQUIRE(r.code == 0);
    for (const auto* f : {"summary.csv", "seeds.csv", "buckets.csv", "per_rq.csv", "plot_data.csv",
                          "summary.txt", "shortlists.jsonl", "manifest.cfg"}) {
        CHECK(fs::exists(root / "eval" / f));
    }
    CHECK(lines(root / "eval" / "summary.csv") == 5);
    CHECK(slurp(root / "eval" / "manifest.cfg").find("seeds = 4") != std::string::npos);
    fs::remove_all(root);
}

TEST_CASE("single-cell sweep equals eval") {
    const auto root = scratch("single");
    const std::vector<std::string> common{"-s", "synth.preset=tiny", "-s", "train.passes=5",
                                          "-s", "seeds=1,2"};
    auto args = common;
    args.insert(args.begin(), "eval");
    args.insert(args.end(), {"-o", (root / "eval").string()});
    REQUIRE(cli(args).code == 0);
    args[0] = "sweep";
    args.back() = (root / "sweep").string();
    REQUIRE(cli(args).code == 0);
    for (const auto* f : {"summary.csv", "seeds.csv", "buckets.csv", "per_rq.csv"}) {
        CHECK(slurp(root / "eval" / f) == slurp(root / "sweep" / f));
    }
    fs::remove_all(root);
}

TEST_CASE("sweep isolates failing cells") {
    const auto root = scratch("failing");
    const auto r = cli({"sweep", "-s", "synth.preset=tiny", "-s", "train.passes=3", "-s",
                        "seeds=1", "-s", "candidates.hard=2", "-s", "sweep.candidates.size=5;50", "-o", root.string()});
    CHECK(r.code == 4);
    CHECK(fs::exists(root / "failures.txt"));
    CHECK(slurp(root / "failures.txt").find("candidates.size=50") != std::string::npos);
    CHECK(lines(root / "summary.csv") == 1 + 4);
    fs::remove_all(root);
}

TEST_CASE("exit codes") {
    CHECK(cli({}).code == 1);
    CHECK(cli({"frobnicate"}).code == 1);
    CHECK(cli({"eval", "-s", "no_such_key=1"}).code == 1);
    CHECK(cli({"eval", "-s", "env.gamma=7"}).code == 1);
    CHECK(cli({"eval", "-s", "data.dir=/definitely/not/here"}).code == 2);
    CHECK(cli({"eval", "-s", "synth.preset=tiny", "-s", "seeds=1", "-s", "train.passes=40",
               "-s", "learner=dqn", "-s", "dqn.learning_rate=1e250", "-s", "dqn.warmup=1",
               "-s", "dqn.batch_size=2", "-o", scratch("diverge").string()})
              .code == 3);
    CHECK(cli({"--help"}).code == 0);
}

}
