#pragma once

#include <filesystem>
#include <iosfwd>

#include "bordepth/agents.hpp"

namespace bordepth {

// Policy files start with one ASCII line: "bordepth-policy <version> <kind>".
//
// fixed_k   text:   "k <int>"
// tabular   text:   "scaler <top_min> <top_max>"
//                   "edges <name> <e1> ..."      one line per binned feature (top gap spread size ceiling)
//                   "depth_edges <d1> ..."
//                   "entries <count>"
//                   "<key> <q_stop> <q_continue>" one line per entry, ascending key
// neural    binary, little-endian, after the header line:
//                   u32 layer_count, u64 layer_sizes[layer_count],
//                   f64 top_min, f64 top_max,
//                   u64 parameter_count, f64 parameters[parameter_count]
// Reals in text sections use shortest round-trip decimals, so every format is lossless.

inline constexpr int kPolicyFormatVersion = 1;

void write_policy(std::ostream& out, const Policy& policy);
/// Throws DataError on a malformed, truncated or unknown-version file.
[[nodiscard]] Policy read_policy(std::istream& in);

void save_policy(const std::filesystem::path& path, const Policy& policy);
[[nodiscard]] Policy load_policy(const std::filesystem::path& path);

}  // namespace bordepth
