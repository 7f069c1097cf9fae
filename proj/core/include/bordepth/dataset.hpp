#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bordepth/scorer.hpp"

namespace bordepth {

struct Query {
    std::string id;
    std::string text;
    std::vector<std::string> gold_ids;
};

struct Benchmark {
    std::vector<Tool> registry;
    std::vector<Query> queries;
    /// Scores over the full registry, when supplied with the data.
    std::optional<ScoreMap> scores;

    /// Unique tool and query ids, non-empty gold sets referring to registry tools.
    /// Throws DataError.
    void validate() const;
};

// tools.jsonl:   {"id": str, "name": str, "description": str, "parameters": [str, ...]}
// queries.jsonl: {"query_id": str, "text": str, "gold_ids": [str, ...]}

[[nodiscard]] std::vector<Tool> read_tools(std::istream& in, std::string_view source = "<tools>");
[[nodiscard]] std::vector<Query> read_queries(std::istream& in,
                                              std::string_view source = "<queries>");
void write_tools(std::ostream& out, const std::vector<Tool>& tools);
void write_queries(std::ostream& out, const std::vector<Query>& queries);

/// Loads and validates; `scores` is optional.
[[nodiscard]] Benchmark load_benchmark(const std::filesystem::path& tools,
                                       const std::filesystem::path& queries,
                                       const std::optional<std::filesystem::path>& scores = {});
/// Writes tools.jsonl, queries.jsonl and, when present, scores.jsonl into `dir`.
void save_benchmark(const std::filesystem::path& dir, const Benchmark& benchmark);

/// BM25 scores of every query against the full registry.
[[nodiscard]] ScoreMap bm25_scores(const Benchmark& benchmark, Bm25Params params = {});

}  // namespace bordepth
