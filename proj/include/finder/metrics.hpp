#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "finder/world.hpp"

namespace finder {

/// One benchmark episode record. `found_steps` is indexed by original target
/// position; -1 marks a target never found.
struct EpisodeResult {
    uint64_t world_seed = 0;
    std::string policy;
    bool success = false;
    int path_len = 0;     // p_i: executed forward moves, in cells
    int optimal_len = 0;  // l_i: optimal open tour over all targets
    int steps = 0;        // actions executed, including the final stop
    std::vector<int> found_steps;
    std::string fail_reason;    // empty on success
    long long score_reads = 0;  // unified-map consultations (instrumentation)

    friend bool operator==(const EpisodeResult&, const EpisodeResult&) = default;
};

namespace detail {

/// Pairwise grid distances for {start, targets...} over free cells.
/// Index 0 is the start; index 1+j is target j. Throws when disconnected.
inline std::vector<std::vector<int>> tour_distance_matrix(const GridWorld& world, Cell start,
                                                          std::span<const Cell> goals) {
    std::vector<Cell> nodes{start};
    nodes.insert(nodes.end(), goals.begin(), goals.end());
    std::vector<std::vector<int>> dist(nodes.size(), std::vector<int>(nodes.size(), 0));
    for (size_t i = 0; i < nodes.size(); ++i) {
        Grid<int> field = free_distance_field(world, nodes[i]);
        for (size_t j = 0; j < nodes.size(); ++j) {
            int d = field.at(nodes[j]);
            if (d < 0)
                throw WorldError("optimal tour: target unreachable from " + std::to_string(nodes[i].x) +
                                 "," + std::to_string(nodes[i].y));
            dist[i][j] = d;
        }
    }
    return dist;
}

}  // namespace detail

/// Exact optimal open-tour length from `start` visiting every target cell
/// (order free, no return leg), by Held-Karp over exact BFS distances.
/// K <= 8 keeps this a few thousand states.
inline int optimal_multi_target_length(const GridWorld& world, Cell start, std::span<const Cell> goals) {
    if (goals.empty()) throw WorldError("optimal tour: no targets");
    if (goals.size() > 8) throw WorldError("optimal tour: K > 8 unsupported");
    auto dist = detail::tour_distance_matrix(world, start, goals);
    const int k = static_cast<int>(goals.size());
    const int full = 1 << k;
    const int inf = std::numeric_limits<int>::max() / 2;
    // dp[mask][last]: cheapest walk from start covering `mask`, ending at target `last`.
    std::vector<std::vector<int>> dp(full, std::vector<int>(k, inf));
    for (int j = 0; j < k; ++j) dp[1 << j][j] = dist[0][1 + j];
    for (int mask = 1; mask < full; ++mask)
        for (int last = 0; last < k; ++last) {
            if (!(mask & (1 << last)) || dp[mask][last] >= inf) continue;
            for (int next = 0; next < k; ++next) {
                if (mask & (1 << next)) continue;
                int cand = dp[mask][last] + dist[1 + last][1 + next];
                int& slot = dp[mask | (1 << next)][next];
                slot = std::min(slot, cand);
            }
        }
    int best = inf;
    for (int j = 0; j < k; ++j) best = std::min(best, dp[full - 1][j]);
    return best;
}

inline int optimal_multi_target_length(const GridWorld& world, Cell start) {
    std::vector<Cell> goals;
    for (size_t j = 0; j < world.targets.size(); ++j) goals.push_back(world.target_cell(static_cast<int>(j)));
    return optimal_multi_target_length(world, start, goals);
}

/// Visiting order (indices into `goals`) achieving the optimal open tour.
/// Ties resolve toward the lexicographically smallest order.
inline std::vector<int> optimal_tour_order(const GridWorld& world, Cell start, std::span<const Cell> goals) {
    if (goals.empty()) return {};
    auto dist = detail::tour_distance_matrix(world, start, goals);
    const int k = static_cast<int>(goals.size());
    std::vector<int> perm(k), best_perm;
    for (int i = 0; i < k; ++i) perm[i] = i;
    int best = std::numeric_limits<int>::max();
    do {
        int len = dist[0][1 + perm[0]];
        for (int i = 1; i < k; ++i) len += dist[1 + perm[i - 1]][1 + perm[i]];
        if (len < best) {
            best = len;
            best_perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best_perm;
}

/// Multi-object success weighted by normalized inverse path length:
///   MSPL = (1/N) sum_i S_i * l_i / max(p_i, l_i).
/// A zero-length optimal tour (spawn on the only target) contributes S_i.
inline double mspl(std::span<const EpisodeResult> results) {
    if (results.empty()) throw std::invalid_argument("mspl: empty result list");
    double acc = 0.0;
    for (const EpisodeResult& r : results) {
        if (!r.success) continue;
        double denom = static_cast<double>(std::max(r.path_len, r.optimal_len));
        acc += denom > 0.0 ? r.optimal_len / denom : 1.0;
    }
    return acc / static_cast<double>(results.size());
}

inline double success_rate(std::span<const EpisodeResult> results) {
    if (results.empty()) throw std::invalid_argument("success_rate: empty result list");
    double n = 0.0;
    for (const EpisodeResult& r : results) n += r.success ? 1.0 : 0.0;
    return n / static_cast<double>(results.size());
}

/// Per-episode SPL term, the quantity Wilcoxon pairs are built from.
inline double spl_term(const EpisodeResult& r) {
    if (!r.success) return 0.0;
    double denom = static_cast<double>(std::max(r.path_len, r.optimal_len));
    return denom > 0.0 ? r.optimal_len / denom : 1.0;
}

}  // namespace finder
