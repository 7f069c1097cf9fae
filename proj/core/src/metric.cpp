#include "bordepth/metric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bordepth/errors.hpp"

namespace bordepth::metric {

namespace {

// Above this many factors the product form is slower than it is useful: the
// miss probability is already below exp(-min(R,K)^2 / N), i.e. 0 in double
// precision for any N this library is meant for.
constexpr std::int64_t kMaxProductTerms = std::int64_t{1} << 17;

void require_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError(std::string(name) + " must lie in [0, 1], got " + std::to_string(p));
    }
}

// log2 on a fixed absolute grid of 2^-42 bits. The mantissa part is rounded
// to the grid and the binary exponent added back, which is exact (at most
// 11 integer + 42 fraction bits), so log2_grid(x / 2) == log2_grid(x) - 1
// holds bit for bit.
constexpr double kGrid = 0x1p42;

double log2_grid(double x) {
    int e = 0;
    const double m = std::frexp(x, &e);
    return static_cast<double>(e) + std::nearbyint(std::log2(m) * kGrid) / kGrid;
}

}  // namespace

void SelectionContext::validate() const {
    if (corpus_size < 1) {
        throw DomainError("corpus size N must be >= 1, got " + std::to_string(corpus_size));
    }
    if (relevant_count < 1 || relevant_count > corpus_size) {
        throw DomainError("relevant count R must satisfy 1 <= R <= N (R=" +
                          std::to_string(relevant_count) + ", N=" + std::to_string(corpus_size) +
                          ")");
    }
    if (depth < 1 || depth > corpus_size) {
        throw DomainError("depth K must satisfy 1 <= K <= N (K=" + std::to_string(depth) +
                          ", N=" + std::to_string(corpus_size) + ")");
    }
}

double log_miss_probability_lgamma(const SelectionContext& ctx) {
    ctx.validate();
    const auto n = static_cast<double>(ctx.corpus_size);
    const auto r = static_cast<double>(ctx.relevant_count);
    const auto k = static_cast<double>(ctx.depth);
    if (ctx.depth > ctx.corpus_size - ctx.relevant_count) {
        return -std::numeric_limits<double>::infinity();
    }
    // C(N-R, K) / C(N, K) = (N-R)! (N-K)! / ((N-R-K)! N!)
    return std::lgamma(n - r + 1.0) + std::lgamma(n - k + 1.0) - std::lgamma(n - r - k + 1.0) -
           std::lgamma(n + 1.0);
}

double log_miss_probability(const SelectionContext& ctx) {
    ctx.validate();
    const std::int64_t n = ctx.corpus_size;
    const std::int64_t r = ctx.relevant_count;
    const std::int64_t k = ctx.depth;
    if (k > n - r) {
        return -std::numeric_limits<double>::infinity();
    }
    // C(N-R,K)/C(N,K) = prod_{j<K} (1 - R/(N-j)) = prod_{i<R} (1 - K/(N-i)).
    // Iterate over the shorter product; log1p keeps each factor exact near 1.
    const std::int64_t terms = std::min(r, k);
    if (terms > kMaxProductTerms) {
        return log_miss_probability_lgamma(ctx);
    }
    const auto other = static_cast<double>(terms == r ? k : r);
    double acc = 0.0;
    for (std::int64_t i = 0; i < terms; ++i) {
        acc += std::log1p(-other / static_cast<double>(n - i));
    }
    return acc;
}

double p_rand_log_space(const SelectionContext& ctx) {
    return -std::expm1(log_miss_probability(ctx));
}

double p_rand(const SelectionContext& ctx) {
    ctx.validate();
    if (ctx.relevant_count == 1) {
        return static_cast<double>(ctx.depth) / static_cast<double>(ctx.corpus_size);
    }
    return p_rand_log_space(ctx);
}

Bits bor(double p_obs, double p_rand) {
    if (!(p_rand > 0.0 && p_rand <= 1.0)) {
        throw DomainError("p_rand must lie in (0, 1], got " + std::to_string(p_rand));
    }
    require_probability(p_obs, "p_obs");
    if (p_obs == 0.0) {
        return Bits::negative_infinity();
    }
    return Bits(log2_grid(p_obs / p_rand));
}

Bits bor_max(const SelectionContext& ctx) {
    return Bits(-log2_grid(p_rand(ctx)));
}

Bits bor_opt(std::int64_t corpus_size, std::int64_t depth) {
    return bor_max(SelectionContext{corpus_size, 1, depth});
}

Bits doubling_delta(std::int64_t k1, std::int64_t k2) {
    if (k1 < 1 || k2 < 1) {
        throw DomainError("doubling_delta requires depths >= 1");
    }
    return Bits(-log2_grid(static_cast<double>(k2) / static_cast<double>(k1)));
}

Bits aggregate_bor(std::span<const EpisodeTrace> traces, std::int64_t corpus_size) {
    if (traces.empty()) {
        throw DomainError("aggregate_bor needs at least one trace");
    }
    double p_rand_sum = 0.0;
    std::size_t found = 0;
    for (const auto& t : traces) {
        p_rand_sum += p_rand(SelectionContext{corpus_size, t.relevant_count, t.chosen_k});
        found += t.found ? 1 : 0;
    }
    const auto count = static_cast<double>(traces.size());
    return bor(static_cast<double>(found) / count, p_rand_sum / count);
}

}  // namespace bordepth::metric
