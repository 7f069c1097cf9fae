#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

#include "bordepth/trace.hpp"

namespace bordepth {

enum class BucketScheme { wide, narrow };

[[nodiscard]] BucketScheme parse_bucket_scheme(std::string_view name);
[[nodiscard]] std::string_view to_string(BucketScheme scheme);

/// Inclusive gold-rank range.
struct Bucket {
    std::string_view label;
    std::int64_t first_rank;
    std::int64_t last_rank;
};

inline constexpr std::int64_t kOpenEnd = std::numeric_limits<std::int64_t>::max();

/// wide: 1 / 2-5 / 6-20 / 21+     narrow: 1 / 2-3 / 4-10 / 11+
[[nodiscard]] std::span<const Bucket> buckets(BucketScheme scheme);

/// Bucket of the trace's best gold rank. A trace without gold in its list falls in the last bucket.
[[nodiscard]] const Bucket& bucketize(const EpisodeTrace& trace, BucketScheme scheme);

}  // namespace bordepth
