#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bordepth {

struct Tool {
    std::string id;
    std::string name;
    std::string description;
    std::vector<std::string> parameter_names;
};

struct ScoreEntry {
    std::string tool_id;
    double score = 0.0;

    friend bool operator==(const ScoreEntry&, const ScoreEntry&) = default;
};

/// One score per candidate tool for a single query, in no particular order.
struct ScoreVector {
    std::string query_id;
    std::vector<ScoreEntry> entries;
};

/// Candidates in presentation order: score descending, ties by ascending tool id.
struct RankedList {
    std::string query_id;
    std::vector<ScoreEntry> entries;

    [[nodiscard]] std::size_t size() const { return entries.size(); }
    [[nodiscard]] bool empty() const { return entries.empty(); }
    /// 1-based rank of `tool_id`, or nullopt if it is not a candidate.
    [[nodiscard]] std::optional<std::int64_t> rank_of(std::string_view tool_id) const;
};

/// query_id -> scores over the full registry.
using ScoreMap = std::map<std::string, ScoreVector, std::less<>>;

[[nodiscard]] RankedList rank(ScoreVector v);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// Okapi BM25 over tool name + description + parameter names.
///
/// idf(t) = ln(1 + (M - df + 0.5) / (df + 0.5)), which stays positive for terms
/// that occur in more than half of the registry. Query terms are summed per
/// occurrence. The index is immutable once built.
class Bm25Index {
  public:
    static Bm25Index build(std::span<const Tool> registry, Bm25Params params = {});

    [[nodiscard]] ScoreVector score(std::string_view query_text,
                                    std::string_view query_id = {}) const;

    [[nodiscard]] std::size_t document_count() const { return tool_ids_.size(); }
    [[nodiscard]] double average_length() const { return average_length_; }
    [[nodiscard]] std::size_t document_length(std::size_t doc) const { return lengths_.at(doc); }
    [[nodiscard]] std::size_t document_frequency(std::string_view term) const;
    [[nodiscard]] const Bm25Params& params() const { return params_; }

    /// The token stream indexed for one tool.
    [[nodiscard]] static std::vector<std::string> document_tokens(const Tool& tool);

  private:
    struct Posting {
        std::uint32_t doc;
        std::uint32_t tf;
    };

    Bm25Params params_;
    std::vector<std::string> tool_ids_;
    std::vector<std::uint32_t> lengths_;
    double average_length_ = 0.0;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
};

// Score files: one JSON object per line, {"query_id": str, "scores": {tool_id: number, ...}}.

/// Parses a score file. Every record must cover exactly the registry's tool ids.
/// Throws DataError naming `source` and the 1-based line of the offending record.
[[nodiscard]] ScoreMap read_scores(std::istream& in, std::span<const Tool> registry,
                                   std::string_view source = "<stream>");
[[nodiscard]] ScoreMap load_scores(const std::filesystem::path& path,
                                   std::span<const Tool> registry);

/// Writes records in map order with entries in vector order, shortest round-trip decimals.
void write_scores(std::ostream& out, const ScoreMap& scores);
void save_scores(const std::filesystem::path& path, const ScoreMap& scores);

}  // namespace bordepth
