#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finder/frontier.hpp"
#include "finder/mapping.hpp"
#include "finder/metrics.hpp"
#include "finder/pathing.hpp"
#include "finder/rng.hpp"
#include "finder/scoremap.hpp"
#include "finder/similarity.hpp"
#include "finder/world.hpp"

namespace finder {

enum class PolicyKind { Full, NoSto, NoOto, GreedyFrontier, RandomWalk, Oracle };

inline const char* policy_name(PolicyKind k) {
    switch (k) {
        case PolicyKind::Full: return "full";
        case PolicyKind::NoSto: return "no_sto";
        case PolicyKind::NoOto: return "no_oto";
        case PolicyKind::GreedyFrontier: return "greedy_frontier";
        case PolicyKind::RandomWalk: return "random_walk";
        case PolicyKind::Oracle: return "oracle";
    }
    return "?";
}

inline std::optional<PolicyKind> parse_policy(std::string_view name) {
    for (PolicyKind k : {PolicyKind::Full, PolicyKind::NoSto, PolicyKind::NoOto,
                         PolicyKind::GreedyFrontier, PolicyKind::RandomWalk, PolicyKind::Oracle})
        if (name == policy_name(k)) return k;
    return std::nullopt;
}

struct PolicyConfig {
    PolicyKind kind = PolicyKind::Full;
    double epsilon = 2.0;  // found threshold, cells of path distance
    int budget = 500;      // max actions per episode
    SensorConfig sensor;
    MotionConfig motion;
    double unknown_cost = 1.0;  // A* penalty for unknown cells
    // Boundary segments shorter than this are only chased once nothing
    // longer remains; sliver frontiers behind wall corners otherwise dominate
    // goal selection and stall exploration.
    int min_frontier_segment = 3;
    // Unified-score contrasts below this are treated as ties (resolved by
    // path distance). Set to 0 for a strict argmax.
    double score_tie_epsilon = 0.15;
};

/// Current navigation goal: a frontier midpoint, or a detected target's cell
/// (which always preempts frontiers).
struct Goal {
    enum class Type { Frontier, TargetWaypoint };
    Type type = Type::Frontier;
    Cell cell;
    int target_id = -1;

    friend bool operator==(const Goal&, const Goal&) = default;
};

/// View of the planner's belief after one step's map updates, for map dumps
/// and instrumentation. Score fields are null for policies that never build
/// them.
struct StepSnapshot {
    int step = 0;
    const RobotState* robot = nullptr;
    const OccupancyMap* occ = nullptr;
    const SemanticMap* sem = nullptr;
    const ScoreStack* sto = nullptr;
    const ScoreStack* oto = nullptr;
    const UnifiedMap* unified = nullptr;
    const struct SearchState* search = nullptr;
};
using StepCallback = std::function<void(const StepSnapshot&)>;

/// Mutable per-episode planner state.
struct SearchState {
    std::vector<int> remaining;                        // original target indices, in order
    std::vector<int> found_steps;                      // -1 until found
    std::vector<std::optional<Cell>> known_target_cell;  // last detected cell per target
    std::optional<Goal> goal;
    std::vector<Cell> path;  // path[0] is the robot's cell while valid
    int step_count = 0;
    int travelled = 0;
};

/// Turn toward the next path cell's bearing, or move forward when already
/// aligned within half a turn increment. Stop when the path is complete.
inline Action next_action(const RobotState& robot, std::span<const Cell> path, const MotionConfig& motion) {
    if (path.size() < 2) return Action::Stop;
    Cell d{path[1].x - robot.cell.x, path[1].y - robot.cell.y};
    int bearing = -1;
    for (int i = 0; i < 8; ++i)
        if (kHeadingDirs[i] == d) bearing = 45 * i;
    if (bearing < 0) return Action::Stop;  // path is stale, caller replans
    int diff = (bearing - robot.heading_deg) % 360;
    if (diff < 0) diff += 360;
    if (diff > 180) diff -= 360;  // now in (-180, 180]
    if (std::abs(diff) * 2 <= motion.turn_deg) return Action::Forward;
    return diff > 0 ? Action::TurnLeft : Action::TurnRight;
}

/// Highest-scoring reachable frontier; scores within `tie_epsilon` of the
/// maximum count as tied and break toward the smaller path distance from the
/// robot, then (y, x). Unreachable frontiers are discarded. The tolerance
/// matters: score contrasts below it are observation-angle noise, and
/// chasing them across the map costs more than it informs.
inline std::optional<Frontier> select_frontier(std::vector<Frontier>& frontiers, const UnifiedMap& unified,
                                               const Grid<double>& dist_from_robot,
                                               long long* score_reads = nullptr,
                                               double tie_epsilon = 0.0) {
    double best_score = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (Frontier& f : frontiers) {
        f.score = unified.at(f.cell);
        if (score_reads) ++*score_reads;
        if (dist_from_robot.at(f.cell) == std::numeric_limits<double>::infinity()) continue;
        any = true;
        best_score = std::max(best_score, f.score);
    }
    if (!any) return std::nullopt;
    const Frontier* best = nullptr;
    for (const Frontier& f : frontiers) {
        double d = dist_from_robot.at(f.cell);
        if (d == std::numeric_limits<double>::infinity()) continue;
        if (f.score < best_score - tie_epsilon) continue;
        if (!best) {
            best = &f;
            continue;
        }
        double bd = dist_from_robot.at(best->cell);
        if (d < bd || (d == bd && f.cell < best->cell)) best = &f;
    }
    return *best;
}

/// Nearest reachable frontier by path distance (score maps ignored).
inline std::optional<Frontier> select_nearest_frontier(const std::vector<Frontier>& frontiers,
                                                       const Grid<double>& dist_from_robot) {
    const Frontier* best = nullptr;
    for (const Frontier& f : frontiers) {
        double d = dist_from_robot.at(f.cell);
        if (d == std::numeric_limits<double>::infinity()) continue;
        if (!best || d < dist_from_robot.at(best->cell) ||
            (d == dist_from_robot.at(best->cell) && f.cell < best->cell))
            best = &f;
    }
    if (!best) return std::nullopt;
    return *best;
}

namespace detail {

inline constexpr uint64_t kSpawnStream = 11;
inline constexpr uint64_t kActionStreamBase = 100;

struct EpisodeRunner {
    const GridWorld& world;
    const SimilarityTable& table;
    const PolicyConfig& cfg;
    RobotState robot;
    uint64_t seed;

    OccupancyMap occ;
    SemanticMap sem;
    ScoreStack sto;
    SearchState state;
    EpisodeResult result;
    Rng action_rng;
    StepCallback on_step;

    EpisodeRunner(const GridWorld& w, const SimilarityTable& t, const PolicyConfig& c, RobotState spawn,
                  uint64_t episode_seed, uint64_t world_seed)
        : world(w),
          table(t),
          cfg(c),
          robot(spawn),
          seed(episode_seed),
          occ(w.width, w.height),
          sem(w.width, w.height, w.class_count),
          action_rng(derive_seed(episode_seed, kActionStreamBase + static_cast<uint64_t>(c.kind))) {
        const int k = world.target_count();
        for (int j = 0; j < k; ++j) state.remaining.push_back(j);
        state.found_steps.assign(k, -1);
        state.known_target_cell.assign(k, std::nullopt);
        sto = make_score_stack(ScoreKind::SceneToObject, world.width, world.height, state.remaining);
        result.world_seed = world_seed;
        result.policy = policy_name(cfg.kind);
        result.found_steps.assign(k, -1);
        result.optimal_len = optimal_multi_target_length(world, spawn.cell);
    }

    bool uses_scores() const {
        return cfg.kind == PolicyKind::Full || cfg.kind == PolicyKind::NoSto || cfg.kind == PolicyKind::NoOto;
    }

    static bool detail_is_frontier(const OccupancyMap& map, Cell c) {
        return detail::is_frontier_cell(map, c);
    }

    void remember_detections(const Observation& obs) {
        for (const Detection& d : obs.detections)
            if (d.is_target) state.known_target_cell[d.target_index] = d.cell;
    }

    /// Marks every remaining target within epsilon path distance as found and
    /// drops its score channels.
    void found_checks(const OccupancyMap& found_map, int step_idx) {
        const int limit = static_cast<int>(cfg.epsilon);
        for (auto it = state.remaining.begin(); it != state.remaining.end();) {
            int t = *it;
            bool found = false;
            if (state.known_target_cell[t]) {
                auto d = known_free_distance(found_map, robot.cell, *state.known_target_cell[t], limit);
                found = d.has_value() && static_cast<double>(*d) <= cfg.epsilon;
            }
            if (found) {
                state.found_steps[t] = step_idx;
                result.found_steps[t] = step_idx;
                if (sto.channel_of(t) >= 0) drop_target_channel(sto, t);
                it = state.remaining.erase(it);
                if (state.goal && state.goal->type == Goal::Type::TargetWaypoint && state.goal->target_id == t)
                    state.goal.reset();
            } else {
                ++it;
            }
        }
    }

    void invalidate_path() { state.path.clear(); }

    Action turn_toward_unknown_neighbor() const {
        for (int i = 0; i < 4; ++i) {
            Cell n = offset(robot.cell, kNeighbors4[i]);
            if (!occ.cells.in_bounds(n) || occ.at(n) != CellKnowledge::Unknown) continue;
            int bearing = 0;
            for (int k = 0; k < 8; ++k)
                if (kHeadingDirs[k] == kNeighbors4[i]) bearing = 45 * k;
            int diff = (bearing - robot.heading_deg) % 360;
            if (diff < 0) diff += 360;
            if (diff > 180) diff -= 360;
            return diff >= 0 ? Action::TurnLeft : Action::TurnRight;
        }
        return Action::TurnLeft;
    }

    bool path_valid(const Goal& goal) const {
        if (state.path.size() < 2) return false;
        if (!(state.path.front() == robot.cell)) return false;
        if (!(state.path.back() == goal.cell)) return false;
        for (const Cell& c : state.path)
            if (occ.at(c) == CellKnowledge::Obstacle) return false;
        return true;
    }

    void advance_path_after_move() {
        if (state.path.size() >= 2 && state.path[1] == robot.cell)
            state.path.erase(state.path.begin());
    }

    void execute(Action a) {
        StepResult sr = step(world, robot, a, cfg.motion);
        if (a == Action::Forward) {
            if (sr.blocked) {
                // Contact tells the robot the cell ahead is an obstacle even
                // if the sensor never swept it.
                Cell ahead = offset(robot.cell, forward_direction(robot.heading_deg));
                if (occ.cells.in_bounds(ahead)) occ.cells.at(ahead) = CellKnowledge::Obstacle;
                invalidate_path();
            } else {
                robot = sr.robot;
                ++state.travelled;
                advance_path_after_move();
            }
        } else {
            robot = sr.robot;
        }
        ++state.step_count;
    }

    void finish(bool success, const std::string& reason) {
        result.success = success;
        result.fail_reason = reason;
        result.steps = state.step_count;
        result.path_len = state.travelled;
    }

    EpisodeResult run() {
        bind_similarity(table, world);
        switch (cfg.kind) {
            case PolicyKind::RandomWalk: run_random_walk(); break;
            case PolicyKind::Oracle: run_oracle(); break;
            default: run_planner(); break;
        }
        return result;
    }

    void run_planner() {
        for (int step_idx = 0; step_idx < cfg.budget; ++step_idx) {
            Observation obs = observe(world, robot, cfg.sensor);
            update_occupancy(occ, obs);
            update_semantic(sem, obs);
            remember_detections(obs);
            found_checks(occ, step_idx);
            if (state.remaining.empty()) {
                execute(Action::Stop);
                finish(true, "");
                return;
            }

            UnifiedMap unified;
            ScoreStack oto;
            if (uses_scores()) {
                ConfidenceMap cone = cone_mask(obs, cfg.sensor, world.width, world.height);
                std::vector<double> scores;
                scores.reserve(sto.target_ids.size());
                for (int t : sto.target_ids) scores.push_back(scene_score(obs, t, table));
                sto_update(sto, cone, scores);
                oto = oto_compute(sem, table, sto.target_ids, world.width, world.height);
                switch (cfg.kind) {
                    case PolicyKind::Full: unified = fuse(sto, oto); break;
                    case PolicyKind::NoSto: unified = sum_normalized(oto, world.width, world.height); break;
                    case PolicyKind::NoOto: unified = sum_normalized(sto, world.width, world.height); break;
                    default: break;
                }
            }
            if (on_step) {
                StepSnapshot snap;
                snap.step = step_idx;
                snap.robot = &robot;
                snap.occ = &occ;
                snap.sem = &sem;
                snap.search = &state;
                if (uses_scores()) {
                    snap.sto = &sto;
                    snap.oto = &oto;
                    snap.unified = &unified;
                }
                on_step(snap);
            }

            Grid<double> dist =
                traversal_action_costs(occ, robot.cell, robot.heading_deg, cfg.motion.turn_deg, cfg.unknown_cost);

            // Detected-target waypoints preempt frontier goals; pursue the
            // nearest by path distance first.
            std::optional<Goal> goal;
            {
                int best_t = -1;
                double best_d = std::numeric_limits<double>::infinity();
                for (int t : state.remaining) {
                    if (!state.known_target_cell[t]) continue;
                    double d = dist.at(*state.known_target_cell[t]);
                    if (d < best_d) {
                        best_d = d;
                        best_t = t;
                    }
                }
                if (best_t >= 0) {
                    if (best_d == std::numeric_limits<double>::infinity()) {
                        finish(false, "target_unreachable");
                        return;
                    }
                    goal = Goal{Goal::Type::TargetWaypoint, *state.known_target_cell[best_t], best_t};
                }
            }
            if (!goal) {
                // A committed frontier goal is held until it stops being a
                // frontier (its unknown side got observed) or its path dies;
                // re-selecting every step makes the goal chase the moving
                // view boundary and the robot dither in place.
                bool keep = state.goal && state.goal->type == Goal::Type::Frontier &&
                            detail_is_frontier(occ, state.goal->cell) &&
                            dist.at(state.goal->cell) != std::numeric_limits<double>::infinity();
                if (keep) {
                    goal = *state.goal;
                } else {
                    std::vector<Frontier> frontiers = extract_frontiers(occ);
                    std::vector<Frontier> major;
                    for (const Frontier& f : frontiers)
                        if (f.segment_len >= cfg.min_frontier_segment) major.push_back(f);
                    std::vector<Frontier>& pool = major.empty() ? frontiers : major;
                    std::optional<Frontier> pick;
                    if (cfg.kind == PolicyKind::GreedyFrontier)
                        pick = select_nearest_frontier(pool, dist);
                    else
                        pick = select_frontier(pool, unified, dist, &result.score_reads, cfg.score_tie_epsilon);
                    if (!pick && !major.empty())  // every major frontier unreachable
                        pick = cfg.kind == PolicyKind::GreedyFrontier
                                   ? select_nearest_frontier(frontiers, dist)
                                   : select_frontier(frontiers, unified, dist, &result.score_reads, cfg.score_tie_epsilon);
                    if (!pick) {
                        finish(false, "no_frontiers");
                        return;
                    }
                    goal = Goal{Goal::Type::Frontier, pick->cell, -1};
                }
            }

            if (goal->cell == robot.cell) {
                // Standing on the goal: its unknown neighbor is outside the
                // current view. Rotate the shorter way toward it.
                state.goal = goal;
                invalidate_path();
                execute(turn_toward_unknown_neighbor());
                continue;
            }
            if (!state.goal || !(*state.goal == *goal) || !path_valid(*goal)) {
                auto planned = plan_path(occ, robot.cell, goal->cell, cfg.unknown_cost, robot.heading_deg, cfg.motion.turn_deg);
                if (!planned) {
                    // Reachability was pre-checked through the same metric, so
                    // this only fires on a stale goal; drop it and retry next
                    // step rather than looping on it.
                    state.goal.reset();
                    invalidate_path();
                    execute(Action::Stop);
                    continue;
                }
                state.path = std::move(*planned);
                state.goal = goal;
            }
            execute(next_action(robot, state.path, cfg.motion));
        }
        finish(false, "budget_exceeded");
    }

    void run_random_walk() {
        for (int step_idx = 0; step_idx < cfg.budget; ++step_idx) {
            Observation obs = observe(world, robot, cfg.sensor);
            update_occupancy(occ, obs);
            update_semantic(sem, obs);
            remember_detections(obs);
            found_checks(occ, step_idx);
            if (on_step) {
                StepSnapshot snap;
                snap.step = step_idx;
                snap.robot = &robot;
                snap.occ = &occ;
                snap.sem = &sem;
                snap.search = &state;
                on_step(snap);
            }
            if (state.remaining.empty()) {
                execute(Action::Stop);
                finish(true, "");
                return;
            }
            switch (action_rng.uniform_int(0, 2)) {
                case 0: execute(Action::Forward); break;
                case 1: execute(Action::TurnLeft); break;
                default: execute(Action::TurnRight); break;
            }
        }
        finish(false, "budget_exceeded");
    }

    /// Upper bound: full ground-truth access, follows the optimal open tour.
    void run_oracle() {
        // The oracle's belief is the ground truth itself.
        for (int y = 0; y < world.height; ++y)
            for (int x = 0; x < world.width; ++x)
                occ.cells.at(x, y) = world.occupancy.at(x, y) == Terrain::Free ? CellKnowledge::Free
                                                                               : CellKnowledge::Obstacle;
        std::vector<Cell> goals;
        for (size_t j = 0; j < world.targets.size(); ++j)
            goals.push_back(world.target_cell(static_cast<int>(j)));
        std::vector<int> order = optimal_tour_order(world, robot.cell, goals);
        for (size_t j = 0; j < goals.size(); ++j)
            state.known_target_cell[j] = goals[j];

        size_t next_stop = 0;
        for (int step_idx = 0; step_idx < cfg.budget; ++step_idx) {
            found_checks(occ, step_idx);
            if (state.remaining.empty()) {
                execute(Action::Stop);
                finish(true, "");
                return;
            }
            while (next_stop < order.size() &&
                   std::find(state.remaining.begin(), state.remaining.end(), order[next_stop]) ==
                       state.remaining.end())
                ++next_stop;
            if (next_stop >= order.size()) {  // all tour stops consumed yet targets remain
                finish(false, "target_unreachable");
                return;
            }
            Goal goal{Goal::Type::TargetWaypoint, goals[order[next_stop]], order[next_stop]};
            if (!state.goal || !(*state.goal == goal) || !path_valid(goal)) {
                auto planned = plan_path(occ, robot.cell, goal.cell, cfg.unknown_cost, robot.heading_deg, cfg.motion.turn_deg);
                if (!planned) {
                    finish(false, "target_unreachable");
                    return;
                }
                state.path = std::move(*planned);
                state.goal = goal;
            }
            execute(next_action(robot, state.path, cfg.motion));
        }
        finish(false, "budget_exceeded");
    }
};

}  // namespace detail

/// Spawn cell drawn uniformly from the cells that can reach every target,
/// with a random heading on the turn lattice.
inline RobotState sample_spawn(const GridWorld& world, const MotionConfig& motion, uint64_t seed) {
    std::vector<Cell> cells = valid_spawn_cells(world);
    if (cells.empty()) throw WorldError("no valid spawn cells");
    Rng rng(seed);
    RobotState robot;
    robot.cell = cells[rng.uniform_int(0, static_cast<int>(cells.size()) - 1)];
    int positions = 360 / motion.turn_deg;
    robot.heading_deg = motion.turn_deg * rng.uniform_int(0, positions - 1);
    return robot;
}

/// Runs one full episode from an explicit spawn. Deterministic in
/// (world, config, spawn, seed).
inline EpisodeResult run_episode(const GridWorld& world, const SimilarityTable& table,
                                 const PolicyConfig& cfg, RobotState spawn, uint64_t seed,
                                 uint64_t world_seed = 0, StepCallback on_step = nullptr) {
    if (cfg.budget < 1) throw std::invalid_argument("run_episode: budget must be >= 1");
    if (360 % cfg.motion.turn_deg != 0) throw std::invalid_argument("run_episode: turn_deg must divide 360");
    if (!world.is_free(spawn.cell)) throw WorldError("run_episode: spawn cell not free");
    detail::EpisodeRunner runner(world, table, cfg, spawn, seed, world_seed);
    runner.on_step = std::move(on_step);
    return runner.run();
}

/// Runs one episode with the spawn sampled from the episode seed, so every
/// policy sees the identical spawn for a given seed (paired benchmarking).
inline EpisodeResult run_episode(const GridWorld& world, const SimilarityTable& table,
                                 const PolicyConfig& cfg, uint64_t seed, uint64_t world_seed = 0,
                                 StepCallback on_step = nullptr) {
    RobotState spawn = sample_spawn(world, cfg.motion, derive_seed(seed, detail::kSpawnStream));
    return run_episode(world, table, cfg, spawn, seed, world_seed, std::move(on_step));
}

}  // namespace finder
