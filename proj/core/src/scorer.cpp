#include "bordepth/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "bordepth/errors.hpp"
#include "bordepth/text.hpp"

namespace bordepth {

std::optional<std::int64_t> RankedList::rank_of(std::string_view tool_id) const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].tool_id == tool_id) {
            return static_cast<std::int64_t>(i) + 1;
        }
    }
    return std::nullopt;
}

RankedList rank(ScoreVector v) {
    std::sort(v.entries.begin(), v.entries.end(), [](const ScoreEntry& a, const ScoreEntry& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.tool_id < b.tool_id;
    });
    return RankedList{std::move(v.query_id), std::move(v.entries)};
}

std::vector<std::string> Bm25Index::document_tokens(const Tool& tool) {
    auto tokens = tokenize(tool.name);
    auto append = [&tokens](std::string_view text) {
        auto more = tokenize(text);
        tokens.insert(tokens.end(), std::make_move_iterator(more.begin()),
                      std::make_move_iterator(more.end()));
    };
    append(tool.description);
    for (const auto& p : tool.parameter_names) {
        append(p);
    }
    return tokens;
}

Bm25Index Bm25Index::build(std::span<const Tool> registry, Bm25Params params) {
    if (registry.empty()) {
        throw DomainError("cannot build a BM25 index over an empty registry");
    }
    if (!(params.k1 >= 0.0) || !(params.b >= 0.0 && params.b <= 1.0)) {
        throw DomainError("BM25 parameters need k1 >= 0 and 0 <= b <= 1");
    }
    Bm25Index index;
    index.params_ = params;
    index.tool_ids_.reserve(registry.size());
    index.lengths_.reserve(registry.size());
    std::uint64_t total_length = 0;
    for (std::size_t doc = 0; doc < registry.size(); ++doc) {
        const auto tokens = document_tokens(registry[doc]);
        std::unordered_map<std::string, std::uint32_t> counts;
        for (const auto& t : tokens) {
            ++counts[t];
        }
        for (auto& [term, tf] : counts) {
            index.postings_[term].push_back({static_cast<std::uint32_t>(doc), tf});
        }
        index.tool_ids_.push_back(registry[doc].id);
        index.lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_length += tokens.size();
    }
    index.average_length_ =
        static_cast<double>(total_length) / static_cast<double>(registry.size());
    return index;
}

std::size_t Bm25Index::document_frequency(std::string_view term) const {
    const auto it = postings_.find(std::string(term));
    return it == postings_.end() ? 0 : it->second.size();
}

ScoreVector Bm25Index::score(std::string_view query_text, std::string_view query_id) const {
    std::vector<double> totals(tool_ids_.size(), 0.0);
    const auto m = static_cast<double>(tool_ids_.size());
    for (const auto& term : tokenize(query_text)) {
        const auto it = postings_.find(term);
        if (it == postings_.end()) {
            continue;
        }
        const auto df = static_cast<double>(it->second.size());
        const double idf = std::log1p((m - df + 0.5) / (df + 0.5));
        for (const auto& p : it->second) {
            const double tf = p.tf;
            // A posting implies a non-empty document, so average_length_ > 0 here.
            const double norm = 1.0 - params_.b + params_.b * lengths_[p.doc] / average_length_;
            totals[p.doc] += idf * tf * (params_.k1 + 1.0) / (tf + params_.k1 * norm);
        }
    }
    ScoreVector out{std::string(query_id), {}};
    out.entries.reserve(tool_ids_.size());
    for (std::size_t doc = 0; doc < tool_ids_.size(); ++doc) {
        out.entries.push_back({tool_ids_[doc], totals[doc]});
    }
    return out;
}

ScoreMap read_scores(std::istream& in, std::span<const Tool> registry, std::string_view source) {
    std::unordered_map<std::string_view, std::size_t> position;
    for (std::size_t i = 0; i < registry.size(); ++i) {
        position.emplace(registry[i].id, i);
    }
    ScoreMap result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        auto fail = [&](const std::string& what) {
            return DataError(fmt::format("{}:{}: {}", source, line_no, what));
        };
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw fail(std::string("malformed JSON: ") + e.what());
        }
        if (!record.is_object() || !record.contains("query_id") ||
            !record["query_id"].is_string() || !record.contains("scores") ||
            !record["scores"].is_object()) {
            throw fail("expected {\"query_id\": string, \"scores\": object}");
        }
        const auto query_id = record["query_id"].get<std::string>();
        if (result.contains(query_id)) {
            throw fail(fmt::format("duplicate query_id '{}'", query_id));
        }
        std::vector<std::optional<double>> values(registry.size());
        for (const auto& [tool_id, value] : record["scores"].items()) {
            const auto pos = position.find(tool_id);
            if (pos == position.end()) {
                throw fail(fmt::format("query '{}' references unknown tool id '{}'", query_id,
                                       tool_id));
            }
            if (!value.is_number()) {
                throw fail(fmt::format("query '{}': score for '{}' is not a number", query_id,
                                       tool_id));
            }
            const double v = value.get<double>();
            if (!std::isfinite(v)) {
                throw fail(fmt::format("query '{}': non-finite score for '{}'", query_id,
                                       tool_id));
            }
            values[pos->second] = v;
        }
        ScoreVector vec{query_id, {}};
        vec.entries.reserve(registry.size());
        for (std::size_t i = 0; i < registry.size(); ++i) {
            if (!values[i]) {
                throw fail(fmt::format("query '{}' is missing a score for tool '{}'", query_id,
                                       registry[i].id));
            }
            vec.entries.push_back({registry[i].id, *values[i]});
        }
        result.emplace(query_id, std::move(vec));
    }
    return result;
}

ScoreMap load_scores(const std::filesystem::path& path, std::span<const Tool> registry) {
    std::ifstream in(path);
    if (!in) {
        throw DataError(fmt::format("cannot open score file {}", path.string()));
    }
    return read_scores(in, registry, path.string());
}

void write_scores(std::ostream& out, const ScoreMap& scores) {
    for (const auto& [query_id, vec] : scores) {
        nlohmann::ordered_json record;
        record["query_id"] = query_id;
        auto& obj = record["scores"] = nlohmann::ordered_json::object();
        for (const auto& e : vec.entries) {
            if (!std::isfinite(e.score)) {
                throw DataError(fmt::format("query '{}': refusing to write non-finite score for '{}'",
                                            query_id, e.tool_id));
            }
            obj[e.tool_id] = e.score;
        }
        out << record.dump() << '\n';
    }
}

void save_scores(const std::filesystem::path& path, const ScoreMap& scores) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError(fmt::format("cannot write score file {}", path.string()));
    }
    write_scores(out, scores);
    if (!out) {
        throw DataError(fmt::format("write failed for {}", path.string()));
    }
}

}  // namespace bordepth
