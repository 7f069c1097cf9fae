#include "bordepth/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "bordepth/errors.hpp"

namespace bordepth {

namespace {

template <typename Fn>
void for_each_record(std::istream& in, std::string_view source, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const auto record = nlohmann::json::parse(line);
            if (!record.is_object()) {
                throw DataError("record is not a JSON object");
            }
            fn(record);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(fmt::format("{}:{}: {}", source, line_no, e.what()));
        } catch (const DataError& e) {
            throw DataError(fmt::format("{}:{}: {}", source, line_no, e.what()));
        }
    }
}

std::vector<std::string> string_list(const nlohmann::json& record, const char* field) {
    if (!record.contains(field)) {
        return {};
    }
    const auto& v = record.at(field);
    if (!v.is_array()) {
        throw DataError(fmt::format("'{}' must be an array of strings", field));
    }
    return v.get<std::vector<std::string>>();
}

std::string optional_string(const nlohmann::json& record, const char* field) {
    return record.contains(field) ? record.at(field).get<std::string>() : std::string();
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError(fmt::format("cannot open {}", path.string()));
    }
    return in;
}

}  // namespace

void Benchmark::validate() const {
    if (registry.empty()) {
        throw DataError("benchmark registry is empty");
    }
    std::unordered_set<std::string_view> tool_ids;
    for (const auto& t : registry) {
        if (t.id.empty()) {
            throw DataError("tool with empty id");
        }
        if (!tool_ids.insert(t.id).second) {
            throw DataError(fmt::format("duplicate tool id '{}'", t.id));
        }
    }
    std::unordered_set<std::string_view> query_ids;
    for (const auto& q : queries) {
        if (!query_ids.insert(q.id).second) {
            throw DataError(fmt::format("duplicate query id '{}'", q.id));
        }
        if (q.gold_ids.empty()) {
            throw DataError(fmt::format("query '{}' has no gold tools", q.id));
        }
        for (const auto& g : q.gold_ids) {
            if (!tool_ids.contains(g)) {
                throw DataError(fmt::format("query '{}' names unknown gold tool '{}'", q.id, g));
            }
        }
    }
    if (scores) {
        for (const auto& q : queries) {
            if (!scores->contains(q.id)) {
                throw DataError(fmt::format("score file has no record for query '{}'", q.id));
            }
        }
    }
}

std::vector<Tool> read_tools(std::istream& in, std::string_view source) {
    std::vector<Tool> tools;
    for_each_record(in, source, [&](const nlohmann::json& r) {
        if (!r.contains("id") || !r.at("id").is_string()) {
            throw DataError("tool record needs a string 'id'");
        }
        Tool t;
        t.id = r.at("id").get<std::string>();
        t.name = optional_string(r, "name");
        t.description = optional_string(r, "description");
        t.parameter_names = string_list(r, "parameters");
        tools.push_back(std::move(t));
    });
    return tools;
}

std::vector<Query> read_queries(std::istream& in, std::string_view source) {
    std::vector<Query> queries;
    for_each_record(in, source, [&](const nlohmann::json& r) {
        if (!r.contains("query_id") || !r.at("query_id").is_string()) {
            throw DataError("query record needs a string 'query_id'");
        }
        Query q;
        q.id = r.at("query_id").get<std::string>();
        q.text = optional_string(r, "text");
        q.gold_ids = string_list(r, "gold_ids");
        queries.push_back(std::move(q));
    });
    return queries;
}

void write_tools(std::ostream& out, const std::vector<Tool>& tools) {
    for (const auto& t : tools) {
        nlohmann::ordered_json r;
        r["id"] = t.id;
        r["name"] = t.name;
        r["description"] = t.description;
        r["parameters"] = t.parameter_names;
        out << r.dump() << '\n';
    }
}

void write_queries(std::ostream& out, const std::vector<Query>& queries) {
    for (const auto& q : queries) {
        nlohmann::ordered_json r;
        r["query_id"] = q.id;
        r["text"] = q.text;
        r["gold_ids"] = q.gold_ids;
        out << r.dump() << '\n';
    }
}

Benchmark load_benchmark(const std::filesystem::path& tools, const std::filesystem::path& queries,
                         const std::optional<std::filesystem::path>& scores) {
    Benchmark b;
    {
        auto in = open_input(tools);
        b.registry = read_tools(in, tools.string());
    }
    {
        auto in = open_input(queries);
        b.queries = read_queries(in, queries.string());
    }
    b.validate();
    if (scores) {
        b.scores = load_scores(*scores, b.registry);
        b.validate();
    }
    return b;
}

void save_benchmark(const std::filesystem::path& dir, const Benchmark& benchmark) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DataError(fmt::format("cannot write {}", (dir / name).string()));
        }
        return out;
    };
    {
        auto out = open("tools.jsonl");
        write_tools(out, benchmark.registry);
    }
    {
        auto out = open("queries.jsonl");
        write_queries(out, benchmark.queries);
    }
    if (benchmark.scores) {
        save_scores(dir / "scores.jsonl", *benchmark.scores);
    }
}

ScoreMap bm25_scores(const Benchmark& benchmark, Bm25Params params) {
    const auto index = Bm25Index::build(benchmark.registry, params);
    ScoreMap scores;
    for (const auto& q : benchmark.queries) {
        scores.emplace(q.id, index.score(q.text, q.id));
    }
    return scores;
}

}  // namespace bordepth
