#pragma once

#include <algorithm>
#include <vector>

#include "finder/mapping.hpp"

namespace finder {

/// Midpoint of one maximal boundary segment between explored-free and
/// unknown space.
struct Frontier {
    Cell cell;
    double score = 0.0;   // filled by the caller from the unified map
    int segment_len = 0;

    friend bool operator==(const Frontier&, const Frontier&) = default;
};

namespace detail {

inline bool is_frontier_cell(const OccupancyMap& map, Cell c) {
    if (!map.known_free(c)) return false;
    for (Cell d : kNeighbors4) {
        Cell n = offset(c, d);
        if (map.cells.in_bounds(n) && map.at(n) == CellKnowledge::Unknown) return true;
    }
    return false;
}

/// Canonical traversal order of one 8-connected boundary segment: start at
/// the (y,x)-smallest endpoint (a cell with at most one segment neighbor),
/// or the (y,x)-smallest cell when the segment has no endpoint, then walk
/// depth-first preferring the (y,x)-smallest unvisited neighbor. For the
/// common chain-shaped segment this is exactly the walk from one end to the
/// other.
inline std::vector<Cell> order_segment(const std::vector<Cell>& segment, const Grid<uint8_t>& member) {
    auto neighbors_in = [&](Cell c) {
        std::vector<Cell> out;
        for (Cell d : kNeighbors8) {
            Cell n = offset(c, d);
            if (member.in_bounds(n) && member.at(n)) out.push_back(n);
        }
        return out;
    };
    std::vector<Cell> sorted = segment;
    std::sort(sorted.begin(), sorted.end());
    Cell start = sorted.front();
    for (Cell c : sorted) {
        if (neighbors_in(c).size() <= 1) {
            start = c;
            break;
        }
    }
    std::vector<Cell> order;
    Grid<uint8_t> visited(member.width(), member.height(), 0);
    std::vector<Cell> stack{start};
    while (!stack.empty()) {
        Cell c = stack.back();
        stack.pop_back();
        if (visited.at(c)) continue;
        visited.at(c) = 1;
        order.push_back(c);
        auto ns = neighbors_in(c);
        std::sort(ns.begin(), ns.end());
        // Push in reverse so the smallest neighbor is expanded first.
        for (auto it = ns.rbegin(); it != ns.rend(); ++it)
            if (!visited.at(*it)) stack.push_back(*it);
    }
    return order;
}

}  // namespace detail

/// All frontier midpoints of the current occupancy belief: free cells
/// 4-adjacent to unknown space, grouped into 8-connected segments, one
/// midpoint per segment (even length picks the lower index). Deterministic
/// output order by (y, x).
inline std::vector<Frontier> extract_frontiers(const OccupancyMap& map) {
    const int w = map.width(), h = map.height();
    Grid<uint8_t> member(w, h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (detail::is_frontier_cell(map, Cell{x, y})) member.at(x, y) = 1;

    Grid<uint8_t> assigned(w, h, 0);
    std::vector<Frontier> out;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Cell seed{x, y};
            if (!member.at(seed) || assigned.at(seed)) continue;
            // Flood the 8-connected segment.
            std::vector<Cell> segment;
            std::vector<Cell> stack{seed};
            assigned.at(seed) = 1;
            while (!stack.empty()) {
                Cell c = stack.back();
                stack.pop_back();
                segment.push_back(c);
                for (Cell d : kNeighbors8) {
                    Cell n = offset(c, d);
                    if (member.in_bounds(n) && member.at(n) && !assigned.at(n)) {
                        assigned.at(n) = 1;
                        stack.push_back(n);
                    }
                }
            }
            std::vector<Cell> order = detail::order_segment(segment, member);
            Frontier f;
            f.cell = order[(order.size() - 1) / 2];
            f.segment_len = static_cast<int>(order.size());
            out.push_back(f);
        }
    }
    std::sort(out.begin(), out.end(), [](const Frontier& a, const Frontier& b) { return a.cell < b.cell; });
    return out;
}

}  // namespace finder
