#pragma once

// Bits-over-Random arithmetic for "select K of N" tasks.
//
// All probabilities are computed in log space; nothing here ever forms a
// binomial coefficient, so N in the tens of millions is fine.

#include <cstdint>
#include <limits>
#include <span>

#include "bordepth/trace.hpp"

namespace bordepth::metric {

/// N candidates, R of them relevant, K presented. Requires 1 <= R <= N and 1 <= K <= N.
struct SelectionContext {
    std::int64_t corpus_size = 0;
    std::int64_t relevant_count = 0;
    std::int64_t depth = 0;

    /// Throws DomainError when the invariants do not hold.
    void validate() const;
};

/// Selectivity in bits (log base 2). Negative infinity marks "observed success was zero".
class Bits {
  public:
    constexpr Bits() = default;
    constexpr explicit Bits(double v) : value_(v) {}

    static constexpr Bits negative_infinity() {
        return Bits(-std::numeric_limits<double>::infinity());
    }

    [[nodiscard]] constexpr double value() const { return value_; }
    [[nodiscard]] constexpr bool is_finite() const {
        return value_ > -std::numeric_limits<double>::infinity() &&
               value_ < std::numeric_limits<double>::infinity();
    }
    [[nodiscard]] constexpr bool is_negative_infinity() const {
        return value_ == -std::numeric_limits<double>::infinity();
    }

    friend constexpr auto operator<=>(Bits, Bits) = default;
    friend constexpr Bits operator-(Bits a, Bits b) { return Bits(a.value_ - b.value_); }

  private:
    double value_ = 0.0;
};

/// log C(N-R, K) - log C(N, K), the log probability that a uniform K-subset misses every relevant item.
/// Returns -inf when K > N - R.
[[nodiscard]] double log_miss_probability(const SelectionContext& ctx);

/// Same quantity through the log-gamma function. Loses absolute precision
/// around 1e-16 * lgamma(N); kept for very large min(R, K) and for cross-checks.
[[nodiscard]] double log_miss_probability_lgamma(const SelectionContext& ctx);

/// Probability that a uniformly random K-subset contains at least one relevant item.
/// Exactly K/N when R = 1.
[[nodiscard]] double p_rand(const SelectionContext& ctx);

/// p_rand without the R = 1 shortcut, always through the log-space product.
[[nodiscard]] double p_rand_log_space(const SelectionContext& ctx);

/// log2(p_obs / p_rand), rounded to a 2^-42 bit grid so that halving the ratio
/// subtracts exactly one bit. p_obs = 0 yields Bits::negative_infinity().
[[nodiscard]] Bits bor(double p_obs, double p_rand);

/// Best achievable BoR at this depth, -log2(p_rand(ctx)).
[[nodiscard]] Bits bor_max(const SelectionContext& ctx);

/// Optimistic ceiling log2(N/K), i.e. bor_max with R forced to 1.
[[nodiscard]] Bits bor_opt(std::int64_t corpus_size, std::int64_t depth);

/// Plateau approximation of the BoR change when depth moves from k1 to k2: -log2(k2/k1).
[[nodiscard]] Bits doubling_delta(std::int64_t k1, std::int64_t k2);

/// Test-set BoR under per-query depth: log2(P_obs / mean_q p_rand(N, R_q, K_q)).
/// P_obs is the fraction of traces with found = true.
[[nodiscard]] Bits aggregate_bor(std::span<const EpisodeTrace> traces, std::int64_t corpus_size);

}  // namespace bordepth::metric
