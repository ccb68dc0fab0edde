#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "finder/mapping.hpp"

namespace finder {

/// A* over {Free, Unknown} cells, 4-connected. Stepping into an unknown cell
/// costs `unknown_cost` (>= 1; the default 1.0 is optimistic, treating
/// unexplored space as free). Among minimum-length routes the planner picks
/// one with the fewest heading changes, seeded by `heading_deg` when given:
/// turning burns whole actions, and staircase paths would spend more of the
/// step budget rotating than moving. Returns the cell sequence from `from`
/// to `to` inclusive, or nullopt when the goal is sealed off by known
/// obstacles.
inline std::optional<std::vector<Cell>> plan_path(const OccupancyMap& map, Cell from, Cell to,
                                                  double unknown_cost = 1.0, int heading_deg = -1,
                                                  int turn_deg = 30) {
    if (!map.traversable(from) || !map.traversable(to)) return std::nullopt;
    if (from == to) return std::vector<Cell>{from};
    const int w = map.width(), h = map.height();
    const double inf = std::numeric_limits<double>::infinity();
    // Length dominates lexicographically; turn increments are tie-break
    // weight. kLen must exceed any possible turn-cost sum.
    const double kLen = 1 << 20;

    // Direction index = index into kNeighbors4; bearing = 90 * dir_bearing.
    auto bearing_of = [](int dir) {
        switch (dir) {
            case 0: return 0;    // east
            case 1: return 90;   // +y
            case 2: return 180;  // west
            default: return 270;
        }
    };
    auto turn_increments = [&](int from_deg, int to_deg) {
        int diff = std::abs(from_deg - to_deg) % 360;
        if (diff > 180) diff = 360 - diff;
        return (diff + turn_deg / 2) / turn_deg;  // whole turn actions, rounded
    };

    std::vector<double> g(static_cast<size_t>(w) * h * 4, inf);
    std::vector<int> parent(static_cast<size_t>(w) * h * 4, -1);
    auto idx = [&](Cell c, int dir) { return (static_cast<size_t>(c.y) * w + c.x) * 4 + dir; };
    auto heuristic = [&](Cell c) {
        return kLen * static_cast<double>(std::abs(c.x - to.x) + std::abs(c.y - to.y));
    };
    struct Node {
        double f;
        int y, x, dir;
        bool operator>(const Node& o) const {
            if (f != o.f) return f > o.f;
            if (y != o.y) return y > o.y;
            if (x != o.x) return x > o.x;
            return dir > o.dir;
        }
    };
    std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
    for (int dir = 0; dir < 4; ++dir) {
        double align = heading_deg >= 0 ? turn_increments(heading_deg, bearing_of(dir)) : 0.0;
        g[idx(from, dir)] = align;
        open.push(Node{align + heuristic(from), from.y, from.x, dir});
    }
    int goal_dir = -1;
    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        Cell c{node.x, node.y};
        if (node.f > g[idx(c, node.dir)] + heuristic(c)) continue;  // stale entry
        if (c == to) {
            goal_dir = node.dir;
            break;
        }
        for (int nd = 0; nd < 4; ++nd) {
            Cell n = offset(c, kNeighbors4[nd]);
            if (!map.traversable(n)) continue;
            double step_cost = kLen * (map.at(n) == CellKnowledge::Unknown ? unknown_cost : 1.0) +
                               turn_increments(bearing_of(node.dir), bearing_of(nd));
            double cand = g[idx(c, node.dir)] + step_cost;
            if (cand < g[idx(n, nd)]) {
                g[idx(n, nd)] = cand;
                parent[idx(n, nd)] = static_cast<int>(idx(c, node.dir));
                open.push(Node{cand + heuristic(n), n.y, n.x, nd});
            }
        }
    }
    if (goal_dir < 0) return std::nullopt;
    std::vector<Cell> path;
    size_t cur = idx(to, goal_dir);
    for (;;) {
        Cell c{static_cast<int>(cur / 4) % w, static_cast<int>(cur / 4 / w)};
        path.push_back(c);
        if (c == from) break;
        cur = static_cast<size_t>(parent[cur]);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

/// Single-source traversal costs over {Free, Unknown} from one cell, the
/// metric used for frontier tie-breaks and nearest-goal decisions. Infinity
/// marks unreachable cells.
inline Grid<double> traversal_distances(const OccupancyMap& map, Cell from, double unknown_cost = 1.0) {
    const int w = map.width(), h = map.height();
    const double inf = std::numeric_limits<double>::infinity();
    Grid<double> dist(w, h, inf);
    if (!map.traversable(from)) return dist;
    struct Node {
        double d;
        int y, x;
        bool operator>(const Node& o) const {
            if (d != o.d) return d > o.d;
            if (y != o.y) return y > o.y;
            return x > o.x;
        }
    };
    std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
    dist.at(from) = 0.0;
    open.push(Node{0.0, from.y, from.x});
    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        Cell c{node.x, node.y};
        if (node.d > dist.at(c)) continue;
        for (Cell d : kNeighbors4) {
            Cell n = offset(c, d);
            if (!map.traversable(n)) continue;
            double step_cost = map.at(n) == CellKnowledge::Unknown ? unknown_cost : 1.0;
            double cand = node.d + step_cost;
            if (cand < dist.at(n)) {
                dist.at(n) = cand;
                open.push(Node{cand, n.y, n.x});
            }
        }
    }
    return dist;
}

/// Single-source cost-to-reach in robot actions: forwards plus turn actions,
/// Dijkstra over (cell, direction) states seeded by the robot's heading.
/// This is the metric goal selection ranks by; plain cell counts undervalue
/// goals behind the robot by up to six turn actions.
inline Grid<double> traversal_action_costs(const OccupancyMap& map, Cell from, int heading_deg,
                                           int turn_deg = 30, double unknown_cost = 1.0) {
    const int w = map.width(), h = map.height();
    const double inf = std::numeric_limits<double>::infinity();
    Grid<double> out(w, h, inf);
    if (!map.traversable(from)) return out;
    auto bearing_of = [](int dir) { return dir == 0 ? 0 : dir == 1 ? 90 : dir == 2 ? 180 : 270; };
    auto turn_actions = [&](int a, int b) {
        int diff = std::abs(a - b) % 360;
        if (diff > 180) diff = 360 - diff;
        return (diff + turn_deg / 2) / turn_deg;
    };
    std::vector<double> dist(static_cast<size_t>(w) * h * 4, inf);
    auto idx = [&](Cell c, int dir) { return (static_cast<size_t>(c.y) * w + c.x) * 4 + dir; };
    struct Node {
        double d;
        int y, x, dir;
        bool operator>(const Node& o) const {
            if (d != o.d) return d > o.d;
            if (y != o.y) return y > o.y;
            if (x != o.x) return x > o.x;
            return dir > o.dir;
        }
    };
    std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
    for (int dir = 0; dir < 4; ++dir) {
        double align = turn_actions(heading_deg, bearing_of(dir));
        dist[idx(from, dir)] = align;
        open.push(Node{align, from.y, from.x, dir});
    }
    out.at(from) = 0.0;
    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        Cell c{node.x, node.y};
        if (node.d > dist[idx(c, node.dir)]) continue;
        for (int nd = 0; nd < 4; ++nd) {
            Cell n = offset(c, kNeighbors4[nd]);
            if (!map.traversable(n)) continue;
            double step = (map.at(n) == CellKnowledge::Unknown ? unknown_cost : 1.0) +
                          turn_actions(bearing_of(node.dir), bearing_of(nd));
            double cand = node.d + step;
            if (cand < dist[idx(n, nd)]) {
                dist[idx(n, nd)] = cand;
                out.at(n) = std::min(out.at(n), cand);
                open.push(Node{cand, n.y, n.x, nd});
            }
        }
    }
    return out;
}

/// BFS distance over known-free cells only, capped at `limit` (used for the
/// epsilon found check, which must not speculate through unknown space).
inline std::optional<int> known_free_distance(const OccupancyMap& map, Cell from, Cell to, int limit) {
    if (!map.known_free(from) || !map.known_free(to)) return std::nullopt;
    if (from == to) return 0;
    Grid<int> dist(map.width(), map.height(), -1);
    std::queue<Cell> q;
    dist.at(from) = 0;
    q.push(from);
    while (!q.empty()) {
        Cell c = q.front();
        q.pop();
        if (dist.at(c) >= limit) continue;
        for (Cell d : kNeighbors4) {
            Cell n = offset(c, d);
            if (!map.known_free(n) || dist.at(n) >= 0) continue;
            dist.at(n) = dist.at(c) + 1;
            if (n == to) return dist.at(n);
            q.push(n);
        }
    }
    return std::nullopt;
}

}  // namespace finder
