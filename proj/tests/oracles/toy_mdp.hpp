#pragma once

// Exhaustive evaluation of every stop depth on a deterministic one-list episode.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "combinatorics.hpp"

namespace oracle {

enum class Reward { bor, f1, constant_one };

struct Toy {
    std::int64_t n = 1;
    /// 1-based ranks of the relevant items in the list; may be empty.
    std::vector<std::int64_t> gold_ranks;
    Reward reward = Reward::bor;
    double step_cost = 0.01;
    double gamma = 0.95;
};

inline double terminal(const Toy& toy, std::int64_t k) {
    bool found = false;
    for (const auto g : toy.gold_ranks) {
        found = found || g <= k;
    }
    if (!found) {
        return 0.0;
    }
    switch (toy.reward) {
        case Reward::bor: {
            const auto r = static_cast<std::int64_t>(toy.gold_ranks.size());
            return -std::log2(p_rand(toy.n, r, k));
        }
        case Reward::f1:
            return 2.0 / static_cast<double>(k + 1);
        case Reward::constant_one:
            return 1.0;
    }
    return 0.0;
}

/// Discounted return of "continue until depth k, then stop", for k = 1..N (index k-1).
inline std::vector<double> returns_by_depth(const Toy& toy) {
    std::vector<double> out;
    for (std::int64_t k = 1; k <= toy.n; ++k) {
        double ret = 0.0;
        double discount = 1.0;
        for (std::int64_t t = 1; t < k; ++t) {
            ret -= discount * toy.step_cost;
            discount *= toy.gamma;
        }
        out.push_back(ret + discount * terminal(toy, k));
    }
    return out;
}

}  // namespace oracle
