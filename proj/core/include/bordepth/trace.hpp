#pragma once

#include <cstdint>
#include <string>

namespace bordepth {

/// Outcome of one evaluated query: what depth was chosen and whether a gold tool was shown.
struct EpisodeTrace {
    std::string query_id;
    std::int64_t chosen_k = 0;
    bool found = false;
    double terminal_reward = 0.0;
    double episode_return = 0.0;
    /// 1-based rank of the best-ranked gold tool in the candidate list; 0 if no gold is present.
    std::int64_t gold_rank = 0;
    std::int64_t relevant_count = 1;
    std::int64_t candidate_count = 0;
};

}  // namespace bordepth
