#pragma once

// Independent test oracles. These deliberately avoid the library's search and
// traversal code paths: Dijkstra with an explicit priority queue instead of
// BFS, exhaustive permutation instead of bitmask DP, brute-force enumeration
// instead of incremental bookkeeping.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <set>
#include <vector>

#include "finder/frontier.hpp"
#include "finder/mapping.hpp"
#include "finder/world.hpp"

namespace oracles {

using finder::Cell;
using finder::GridWorld;
using finder::Terrain;

/// Uniform-cost Dijkstra over free cells, 4-connected.
inline std::optional<int> dijkstra_distance(const GridWorld& world, Cell a, Cell b) {
    if (!world.is_free(a) || !world.is_free(b)) return std::nullopt;
    std::map<std::pair<int, int>, int> dist;
    using Entry = std::pair<int, std::pair<int, int>>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
    dist[{a.x, a.y}] = 0;
    pq.push({0, {a.x, a.y}});
    while (!pq.empty()) {
        auto [d, key] = pq.top();
        pq.pop();
        if (dist.count(key) && dist[key] < d) continue;
        Cell c{key.first, key.second};
        if (c == b) return d;
        const int dxs[4] = {1, -1, 0, 0};
        const int dys[4] = {0, 0, 1, -1};
        for (int i = 0; i < 4; ++i) {
            Cell n{c.x + dxs[i], c.y + dys[i]};
            if (!world.is_free(n)) continue;
            auto nk = std::make_pair(n.x, n.y);
            if (!dist.count(nk) || d + 1 < dist[nk]) {
                dist[nk] = d + 1;
                pq.push({d + 1, nk});
            }
        }
    }
    return std::nullopt;
}

/// Optimal open tour by trying every permutation with Dijkstra leg distances.
inline std::optional<int> permutation_tour_length(const GridWorld& world, Cell start,
                                                  const std::vector<Cell>& goals) {
    std::vector<int> order(goals.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::optional<int> best;
    do {
        int total = 0;
        Cell at = start;
        bool ok = true;
        for (int idx : order) {
            auto d = dijkstra_distance(world, at, goals[idx]);
            if (!d) {
                ok = false;
                break;
            }
            total += *d;
            at = goals[idx];
        }
        if (ok && (!best || total < *best)) best = total;
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

/// Brute-force visibility: checks every cell in the bounding square against
/// the range, the field of view, and a densely sampled ray (2048 sample
/// points per ray, conservative corner handling via closed-cell membership).
/// Matches the supercover rule on the fixtures it is used with.
inline bool cell_visible_brute(const GridWorld& world, finder::RobotState robot,
                               const finder::SensorConfig& sensor, Cell c) {
    if (c == robot.cell) return true;
    double dx = c.x - robot.cell.x, dy = c.y - robot.cell.y;
    if (dx * dx + dy * dy > sensor.range * sensor.range) return false;
    double heading = robot.heading_deg * std::numbers::pi / 180.0;
    double theta = std::remainder(std::atan2(dy, dx) - heading, 2 * std::numbers::pi);
    if (std::abs(theta) > sensor.fov_deg * std::numbers::pi / 360.0 + 1e-9) return false;
    const int samples = 2048;
    for (int s = 0; s <= samples; ++s) {
        double t = static_cast<double>(s) / samples;
        double px = robot.cell.x + t * dx, py = robot.cell.y + t * dy;
        // Every cell whose closed unit square contains the sample point.
        for (int yy = static_cast<int>(std::floor(py - 0.5)); yy <= static_cast<int>(std::ceil(py + 0.5)); ++yy)
            for (int xx = static_cast<int>(std::floor(px - 0.5)); xx <= static_cast<int>(std::ceil(px + 0.5)); ++xx) {
                if (std::abs(px - xx) > 0.5 + 1e-12 || std::abs(py - yy) > 0.5 + 1e-12) continue;
                Cell q{xx, yy};
                if (q == robot.cell || q == c) continue;
                if (world.occupancy.in_bounds(q) && world.occupancy.at(q) == Terrain::Obstacle) return false;
            }
    }
    return true;
}

/// Independent frontier midpoints: re-derives frontier cells, segments, the
/// canonical traversal order, and the midpoint rule from the definitions.
inline std::vector<Cell> frontier_midpoints_brute(const finder::OccupancyMap& map) {
    using finder::CellKnowledge;
    std::set<std::pair<int, int>> frontier;
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x) {
            if (map.at(Cell{x, y}) != CellKnowledge::Free) continue;
            const int dxs[4] = {1, -1, 0, 0};
            const int dys[4] = {0, 0, 1, -1};
            for (int i = 0; i < 4; ++i) {
                Cell n{x + dxs[i], y + dys[i]};
                if (map.cells.in_bounds(n) && map.at(n) == CellKnowledge::Unknown) {
                    frontier.insert({x, y});
                    break;
                }
            }
        }

    auto neighbors8 = [&](std::pair<int, int> c) {
        std::vector<std::pair<int, int>> out;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                auto n = std::make_pair(c.first + dx, c.second + dy);
                if (frontier.count(n)) out.push_back(n);
            }
        return out;
    };

    std::vector<Cell> midpoints;
    std::set<std::pair<int, int>> assigned;
    for (auto seed : frontier) {
        if (assigned.count(seed)) continue;
        // Collect the 8-connected component.
        std::vector<std::pair<int, int>> component{seed};
        assigned.insert(seed);
        for (size_t i = 0; i < component.size(); ++i)
            for (auto n : neighbors8(component[i]))
                if (!assigned.count(n)) {
                    assigned.insert(n);
                    component.push_back(n);
                }
        // Canonical start: (y,x)-smallest endpoint, else (y,x)-smallest cell.
        auto yx_less = [](std::pair<int, int> a, std::pair<int, int> b) {
            return std::make_pair(a.second, a.first) < std::make_pair(b.second, b.first);
        };
        std::sort(component.begin(), component.end(),
                  [&](auto a, auto b) { return yx_less(a, b); });
        std::pair<int, int> start = component.front();
        for (auto c : component)
            if (neighbors8(c).size() <= 1) {
                start = c;
                break;
            }
        // Depth-first walk preferring the (y,x)-smallest unvisited neighbor.
        std::vector<std::pair<int, int>> order;
        std::set<std::pair<int, int>> visited;
        std::vector<std::pair<int, int>> stack{start};
        while (!stack.empty()) {
            auto c = stack.back();
            stack.pop_back();
            if (visited.count(c)) continue;
            visited.insert(c);
            order.push_back(c);
            auto ns = neighbors8(c);
            std::sort(ns.begin(), ns.end(), [&](auto a, auto b) { return yx_less(a, b); });
            for (auto it = ns.rbegin(); it != ns.rend(); ++it)
                if (!visited.count(*it)) stack.push_back(*it);
        }
        auto mid = order[(order.size() - 1) / 2];
        midpoints.push_back(Cell{mid.first, mid.second});
    }
    std::sort(midpoints.begin(), midpoints.end());
    return midpoints;
}

}  // namespace oracles
