#include "bordepth_cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "bordepth/errors.hpp"
#include "bordepth/policy_io.hpp"
#include "bordepth_cli/settings.hpp"

namespace bordepth::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kVersion = "0.3.0";

void prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw DataError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    }
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError(fmt::format("cannot write '{}'", path.string()));
    }
    return out;
}

void write_manifest(const Config& config, const fs::path& out, std::string_view command) {
    auto f = open_output(out / "manifest.cfg");
    f << "# bordepth " << kVersion << ' ' << command << '\n';
    manifest_config(config).write(f);
}

fs::path policy_path(const fs::path& dir, const MethodSpec& m, std::uint64_t seed) {
    return m.learned ? dir / fmt::format("{}-seed{}.policy", m.name, seed)
                     : dir / fmt::format("{}.policy", m.name);
}

void write_train_log(std::ostream& out, const TrainedPolicies& trained) {
    out << "method,seed,pass,epsilon,mean_return,mean_k,found_rate\n";
    for (const auto& [key, result] : trained) {
        for (const auto& e : result.log) {
            out << fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f}\n", key.first, key.second,
                               e.pass, e.epsilon, e.mean_return, e.mean_k, e.found_rate);
        }
    }
}

void write_shortlists(std::ostream& out, const PreparedData& data, const ExperimentResult& r) {
    for (const auto& run : r.runs) {
        for (std::size_t s = 0; s < run.seeds.size(); ++s) {
            for (std::size_t q = 0; q < data.test.size(); ++q) {
                const auto& trace = run.traces[s][q];
                const auto& ranked = data.test[q].ranked;
                nlohmann::ordered_json rec;
                rec["method"] = run.method.name;
                rec["seed"] = run.seeds[s];
                rec["query_id"] = trace.query_id;
                rec["k"] = trace.chosen_k;
                auto tools = nlohmann::ordered_json::array();
                for (std::int64_t i = 0; i < trace.chosen_k; ++i) {
                    tools.push_back(ranked.entries[static_cast<std::size_t>(i)].tool_id);
                }
                rec["tools"] = std::move(tools);
                out << rec.dump() << '\n';
            }
        }
    }
}

PreparedData prepare(const Settings& s) {
    const auto [benchmark, scores] = load_data(s.data);
    return prepare_data(benchmark, scores, s.experiment);
}

PolicyStore load_store(const Settings& s) {
    PolicyStore store;
    for (const auto& m : s.experiment.methods) {
        if (!m.learned) {
            continue;
        }
        for (const auto seed : s.experiment.seeds) {
            store.emplace(PolicyKey{m.name, seed}, load_policy(policy_path(s.policy_dir, m, seed)));
        }
    }
    return store;
}

/// Trains (or loads) and evaluates; shared by eval and every sweep cell.
EvalReport run_eval(const Settings& s, const fs::path& out, std::ostream& log) {
    const PreparedData data = prepare(s);
    PolicyStore store;
    if (!s.policy_dir.empty()) {
        store = load_store(s);
    } else {
        for (auto& [key, result] : train_methods(data, s.experiment)) {
            store.emplace(key, std::move(result.policy));
        }
    }
    const ExperimentResult result = evaluate_methods(data, s.experiment, store);
    prepare_dir(out);
    emit_csv(result.report, out);
    const std::string text = render_text(result.report);
    open_output(out / "summary.txt") << text;
    if (s.shortlists) {
        auto f = open_output(out / "shortlists.jsonl");
        write_shortlists(f, data, result);
    }
    log << text;
    return result.report;
}

std::string cell_dir_name(std::size_t index, std::string_view name) {
    std::string safe;
    for (const char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '.' || c == '-' || c == '_';
        safe += ok ? c : (c == '=' ? '-' : '_');
    }
    return fmt::format("{:03}_{}", index, safe);
}

}  // namespace

int exit_code(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const UsageError*>(&e)) {
        return 1;
    }
    if (dynamic_cast<const TrainingError*>(&e)) {
        return 3;
    }
    return 2;
}

void synth(const Config& config, const fs::path& out, std::ostream& log) {
    const Settings s = parse_settings(config);
    const Benchmark b = generate_synthetic(s.data.synth, s.data.synth_seed);
    prepare_dir(out);
    save_benchmark(out, b);
    write_manifest(config, out, "synth");
    log << fmt::format("synth: {} tools, {} queries -> {}\n", b.registry.size(), b.queries.size(),
                       out.string());
}

void score(const Config& config, const fs::path& out, std::ostream& log) {
    const Settings s = parse_settings(config);
    if (!s.data.from_files()) {
        throw ConfigError("score needs data.dir or data.tools + data.queries");
    }
    const Benchmark b = load_benchmark(s.data.tools, s.data.queries);
    prepare_dir(out);
    save_scores(out / "scores.jsonl", bm25_scores(b, s.data.bm25));
    write_manifest(config, out, "score");
    log << fmt::format("score: BM25 over {} tools for {} queries -> {}\n", b.registry.size(),
                       b.queries.size(), (out / "scores.jsonl").string());
}

void train(const Config& config, const fs::path& out, std::ostream& log) {
    const Settings s = parse_settings(config);
    const PreparedData data = prepare(s);
    const TrainedPolicies trained = train_methods(data, s.experiment);
    const fs::path dir = out / "policies";
    prepare_dir(dir);
    for (const auto& m : s.experiment.methods) {
        if (!m.learned) {
            save_policy(policy_path(dir, m, 0), FixedKPolicy{m.fixed_k});
        }
    }
    for (const auto& [key, result] : trained) {
        save_policy(dir / fmt::format("{}-seed{}.policy", key.first, key.second), result.policy);
    }
    {
        auto f = open_output(out / "train_log.csv");
        write_train_log(f, trained);
    }
    write_manifest(config, out, "train");
    log << fmt::format("train: {} policies on {} training lists (N={}) -> {}\n", trained.size(),
                       data.train.size(), data.candidate_n, dir.string());
}

void eval(const Config& config, const fs::path& out, std::ostream& log) {
    const Settings s = parse_settings(config);
    run_eval(s, out, log);
    write_manifest(config, out, "eval");
}

std::size_t sweep(const Config& config, const fs::path& out, std::ostream& log) {
    const auto cells = expand_sweep(config);
    // Parse every cell up front so a typo fails before any training.
    std::vector<Settings> settings;
    for (const auto& cell : cells) {
        settings.push_back(parse_settings(cell.config));
        if (cell.name != "default") {
            auto& condition = settings.back().experiment.condition;
            condition = config.has("condition") ? fmt::format("{}[{}]", condition, cell.name)
                                                : cell.name;
        }
    }
    const std::size_t jobs = settings.front().experiment.jobs;
    if (cells.size() > 1) {
        for (auto& s : settings) {
            s.experiment.jobs = 1;
        }
    }
    prepare_dir(out);
    std::vector<std::optional<EvalReport>> reports(cells.size());
    std::vector<std::string> failures(cells.size());
    parallel_for(cells.size(), cells.size() > 1 ? jobs : 1, [&](std::size_t i) {
        const fs::path dir = out / "cells" / cell_dir_name(i, cells[i].name);
        std::ostringstream discard;
        try {
            reports[i] = run_eval(settings[i], dir, discard);
            cells[i].config.save(dir / "cell.cfg");
        } catch (const std::exception& e) {
            failures[i] = fmt::format("exit {}: {}", exit_code(e), e.what());
        }
    });

    std::vector<EvalReport> ok;
    std::size_t failed = 0;
    std::string failure_text;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (reports[i]) {
            ok.push_back(std::move(*reports[i]));
            log << fmt::format("cell {} ok\n", cells[i].name);
        } else {
            ++failed;
            failure_text += fmt::format("{}\t{}\n", cells[i].name, failures[i]);
            log << fmt::format("cell {} FAILED: {}\n", cells[i].name, failures[i]);
        }
    }
    if (!ok.empty()) {
        emit_csv(ok, out);
        std::string text;
        for (const auto& r : ok) {
            text += render_text(r) + "\n";
        }
        open_output(out / "summary.txt") << text;
    }
    if (failed > 0) {
        open_output(out / "failures.txt") << failure_text;
    } else {
        std::error_code ec;
        fs::remove(out / "failures.txt", ec);
    }
    write_manifest(config, out, "sweep");
    log << fmt::format("sweep: {} of {} cells ok -> {}\n", ok.size(), cells.size(), out.string());
    return failed;
}

}  // namespace bordepth::cli
