#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bordepth/buckets.hpp"
#include "bordepth/metric.hpp"
#include "bordepth/trace.hpp"

namespace bordepth {

/// Test-set traces of one method, one vector per training seed.
struct MethodTraces {
    std::string method;
    /// No seed variance (Fixed-K); across-seed deviations are omitted.
    bool deterministic = false;
    std::vector<std::uint64_t> seeds;
    std::vector<std::vector<EpisodeTrace>> per_seed;
};

struct SeedRow {
    std::string method;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    double found_pct = 0.0;
    double mean_k = 0.0;
    double k_std = 0.0;
    std::optional<double> reward_bits;
    metric::Bits aggregate_bor;
};

struct MethodRow {
    std::string method;
    bool deterministic = false;
    std::size_t seeds = 0;
    std::size_t n = 0;
    double found_pct = 0.0;
    std::optional<double> found_pct_std;
    double mean_k = 0.0;
    std::optional<double> mean_k_std;
    /// Mean over seeds of the within-seed standard deviation of K across queries.
    double k_std_within = 0.0;
    /// Mean terminal reward over found episodes, pooled over seeds.
    std::optional<double> reward_bits;
    /// metric::aggregate_bor over the traces of all seeds.
    metric::Bits aggregate_bor;
};

struct BucketRow {
    std::string method;
    std::string bucket;
    std::int64_t first_rank = 0;
    std::int64_t last_rank = 0;
    /// Queries per seed in this bucket.
    std::size_t n = 0;
    std::optional<double> found_pct;
    std::optional<double> found_pct_std;
    std::optional<double> mean_k;
    std::optional<double> mean_k_std;
};

struct RelevanceRow {
    std::string method;
    std::string group;
    std::size_t n = 0;
    std::optional<double> found_pct;
    std::optional<double> mean_k;
};

struct EvalReport {
    std::string condition;
    std::int64_t candidate_n = 0;
    BucketScheme scheme = BucketScheme::wide;
    std::vector<MethodRow> methods;
    std::vector<SeedRow> seeds;
    std::vector<BucketRow> buckets;
    std::vector<RelevanceRow> per_rq;

    [[nodiscard]] const MethodRow& method(std::string_view name) const;
    [[nodiscard]] const BucketRow& bucket(std::string_view method, std::string_view bucket) const;
};

/// Mean and population standard deviation across seeds (a single seed has std 0).
/// Every seed's trace vector must be non-empty and the same length.
[[nodiscard]] EvalReport summarize(std::string condition, std::span<const MethodTraces> methods,
                                   BucketScheme scheme, std::int64_t candidate_n);

// CSV schemas (header line first, comma separated, reals with 6 decimals, empty = not applicable):
//   summary.csv   condition,method,seeds,n,found_pct,found_pct_std,mean_k,mean_k_std,k_std_within,reward_bits,aggregate_bor
//   seeds.csv     condition,method,seed,n,found_pct,mean_k,k_std,reward_bits,aggregate_bor
//   buckets.csv   condition,method,bucket,first_rank,last_rank,n,found_pct,found_pct_std,mean_k,mean_k_std
//   per_rq.csv    condition,method,rq_group,n,found_pct,mean_k
//   plot_data.csv condition,method,bucket,mean_k,found_pct
// aggregate_bor is written as "-inf" when no query was found. Text fields containing
// commas or quotes are quoted RFC 4180 style.
void write_summary_csv(std::ostream& out, std::span<const EvalReport> reports);
void write_seeds_csv(std::ostream& out, std::span<const EvalReport> reports);
void write_buckets_csv(std::ostream& out, std::span<const EvalReport> reports);
void write_per_rq_csv(std::ostream& out, std::span<const EvalReport> reports);
void write_plot_csv(std::ostream& out, std::span<const EvalReport> reports);

/// Writes the five CSV files into `out_dir` (created if needed), overwriting.
void emit_csv(std::span<const EvalReport> reports, const std::filesystem::path& out_dir);
void emit_csv(const EvalReport& report, const std::filesystem::path& out_dir);

/// Fixed-width table: found% and K to one decimal, "mean ± std" where seeds vary.
[[nodiscard]] std::string render_text(const EvalReport& report);

}  // namespace bordepth
