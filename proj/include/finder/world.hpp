#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "finder/grid.hpp"

namespace finder {

enum class Terrain : uint8_t { Free, Obstacle };

enum class Action : uint8_t { Forward, TurnLeft, TurnRight, Stop };

inline const char* action_name(Action a) {
    switch (a) {
        case Action::Forward: return "forward";
        case Action::TurnLeft: return "turn_left";
        case Action::TurnRight: return "turn_right";
        case Action::Stop: return "stop";
    }
    return "?";
}

struct SceneObject {
    int class_id = 0;
    Cell cell;

    friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct WorldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Static 2D environment. Immutable after construction/validation; safe to
/// share across concurrent episode workers.
struct GridWorld {
    int width = 0;
    int height = 0;
    int room_types = 0;   // R: room-class ids are 0..R-1 (0 is the corridor type)
    int class_count = 0;  // L: scene-object class ids are 0..L-1
    double resolution = 0.25;  // meters per cell, display metadata only
    Grid<Terrain> occupancy;
    Grid<uint8_t> room_label;
    std::vector<SceneObject> scene_objects;
    std::vector<int> targets;  // ordered indices into scene_objects, size K

    int target_count() const { return static_cast<int>(targets.size()); }
    bool is_free(Cell c) const { return occupancy.in_bounds(c) && occupancy.at(c) == Terrain::Free; }
    const SceneObject& target_object(int j) const { return scene_objects[targets[j]]; }
    Cell target_cell(int j) const { return target_object(j).cell; }
    int target_class(int j) const { return target_object(j).class_id; }

    friend bool operator==(const GridWorld&, const GridWorld&) = default;
};

struct RobotState {
    Cell cell;
    int heading_deg = 0;  // [0, 360), multiple of the turn increment; 0 points +x

    friend bool operator==(const RobotState&, const RobotState&) = default;
};

struct SensorConfig {
    double range = 10.0;   // cells
    double fov_deg = 79.0; // full field of view
};

struct MotionConfig {
    int turn_deg = 30;  // must divide 360
};

struct VisibleCell {
    Cell cell;
    double off_axis = 0.0;  // radians, signed; |off_axis| <= fov/2
    bool occluding = false; // cell is an obstacle face terminating its ray
};

struct Detection {
    int object_index = -1;  // index into GridWorld::scene_objects
    int class_id = 0;
    Cell cell;
    bool is_target = false;
    int target_index = -1;  // position in GridWorld::targets, -1 for non-targets
};

struct Observation {
    std::vector<VisibleCell> visible;
    std::vector<Detection> detections;
    std::vector<int> room_histogram;  // size R, counts over visible Free cells
};

namespace detail {

// Supercover line between cell centers (Dedu's algorithm). Visits every cell
// the segment touches, including both side cells when it passes exactly
// through a lattice corner. Endpoints are visited.
template <typename Visit>
void supercover_line(Cell a, Cell b, Visit&& visit) {
    int x = a.x, y = a.y;
    int dx = b.x - a.x, dy = b.y - a.y;
    int xstep = dx > 0 ? 1 : -1;
    int ystep = dy > 0 ? 1 : -1;
    dx = std::abs(dx);
    dy = std::abs(dy);
    visit(Cell{x, y});
    int ddx = 2 * dx, ddy = 2 * dy;
    if (ddx >= ddy) {
        int error = dx, errorprev = dx;
        for (int i = 0; i < dx; ++i) {
            x += xstep;
            error += ddy;
            if (error > ddx) {
                y += ystep;
                error -= ddx;
                if (error + errorprev < ddx) {
                    visit(Cell{x, y - ystep});
                } else if (error + errorprev > ddx) {
                    visit(Cell{x - xstep, y});
                } else {  // exactly through a corner
                    visit(Cell{x, y - ystep});
                    visit(Cell{x - xstep, y});
                }
            }
            visit(Cell{x, y});
            errorprev = error;
        }
    } else {
        int error = dy, errorprev = dy;
        for (int i = 0; i < dy; ++i) {
            y += ystep;
            error += ddx;
            if (error > ddy) {
                x += xstep;
                error -= ddy;
                if (error + errorprev < ddy) {
                    visit(Cell{x - xstep, y});
                } else if (error + errorprev > ddy) {
                    visit(Cell{x, y - ystep});
                } else {
                    visit(Cell{x - xstep, y});
                    visit(Cell{x, y - ystep});
                }
            }
            visit(Cell{x, y});
            errorprev = error;
        }
    }
}

inline double wrap_angle(double rad) {
    return std::remainder(rad, 2.0 * std::numbers::pi);
}

// FOV boundary comparisons tolerate one ulp-scale slack so cells exactly on
// the cone edge stay visible (their confidence is ~0 there anyway).
inline constexpr double kAngleEps = 1e-9;

}  // namespace detail

/// True if the straight segment between the two cell centers crosses no
/// obstacle cell strictly between its endpoints.
inline bool line_of_sight(const GridWorld& world, Cell from, Cell to) {
    bool clear = true;
    detail::supercover_line(from, to, [&](Cell c) {
        if (c == from || c == to) return;
        if (world.occupancy.at(c) == Terrain::Obstacle) clear = false;
    });
    return clear;
}

/// Simulated sensing sweep. A cell is visible iff it is within range, within
/// half-FOV of the heading, and its supercover ray is unobstructed. The
/// robot's own cell is always visible at off-axis 0.
inline Observation observe(const GridWorld& world, const RobotState& robot, const SensorConfig& sensor) {
    if (!world.is_free(robot.cell)) throw WorldError("observe: robot cell is not free");
    Observation obs;
    obs.room_histogram.assign(static_cast<size_t>(world.room_types), 0);

    const double heading = robot.heading_deg * std::numbers::pi / 180.0;
    const double half_fov = sensor.fov_deg * std::numbers::pi / 360.0;
    const double range2 = sensor.range * sensor.range;
    const int r = static_cast<int>(std::floor(sensor.range));

    auto emit = [&](Cell c, double off_axis) {
        bool occluding = world.occupancy.at(c) == Terrain::Obstacle;
        obs.visible.push_back(VisibleCell{c, off_axis, occluding});
        if (!occluding) obs.room_histogram[world.room_label.at(c)]++;
    };

    emit(robot.cell, 0.0);

    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            if (dx == 0 && dy == 0) continue;
            Cell c{robot.cell.x + dx, robot.cell.y + dy};
            if (!world.occupancy.in_bounds(c)) continue;
            if (dx * dx + dy * dy > range2) continue;
            double off_axis = detail::wrap_angle(std::atan2(static_cast<double>(dy), static_cast<double>(dx)) - heading);
            if (std::abs(off_axis) > half_fov + detail::kAngleEps) continue;
            if (!line_of_sight(world, robot.cell, c)) continue;
            emit(c, off_axis);
        }
    }

    std::unordered_set<Cell> visible_free;
    for (const VisibleCell& v : obs.visible) {
        if (!v.occluding) visible_free.insert(v.cell);
    }
    for (size_t i = 0; i < world.scene_objects.size(); ++i) {
        const SceneObject& so = world.scene_objects[i];
        if (!visible_free.contains(so.cell)) continue;
        Detection d;
        d.object_index = static_cast<int>(i);
        d.class_id = so.class_id;
        d.cell = so.cell;
        for (size_t j = 0; j < world.targets.size(); ++j) {
            if (world.targets[j] == static_cast<int>(i)) {
                d.is_target = true;
                d.target_index = static_cast<int>(j);
            }
        }
        obs.detections.push_back(d);
    }
    return obs;
}

// The 8 grid directions at 45 degree spacing, index k at angle 45k.
inline constexpr Cell kHeadingDirs[8] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};

/// Nearest of the 8 grid directions to an integer heading in degrees.
inline Cell forward_direction(int heading_deg) {
    int idx = ((heading_deg * 2 + 45) / 90) % 8;
    return kHeadingDirs[idx];
}

struct StepResult {
    RobotState robot;
    bool blocked = false;  // set when Forward could not move
};

/// Discrete kinematics. Forward snaps the heading to the nearest of the 8
/// grid directions and advances one cell if that cell is free; a blocked
/// Forward is a lawful no-op with the flag set.
inline StepResult step(const GridWorld& world, const RobotState& robot, Action action, const MotionConfig& motion) {
    StepResult out{robot, false};
    switch (action) {
        case Action::Forward: {
            Cell to = offset(robot.cell, forward_direction(robot.heading_deg));
            if (world.is_free(to)) {
                out.robot.cell = to;
            } else {
                out.blocked = true;
            }
            break;
        }
        case Action::TurnLeft:
            out.robot.heading_deg = (robot.heading_deg + motion.turn_deg) % 360;
            break;
        case Action::TurnRight:
            out.robot.heading_deg = (robot.heading_deg - motion.turn_deg % 360 + 360) % 360;
            break;
        case Action::Stop:
            break;
    }
    return out;
}

/// Exact 4-connected breadth-first distance over free cells, in cells.
/// Unreachable pairs yield an empty optional, never a sentinel value.
inline std::optional<int> shortest_path_len(const GridWorld& world, Cell a, Cell b) {
    if (!world.is_free(a) || !world.is_free(b)) throw WorldError("shortest_path_len: endpoint not free");
    if (a == b) return 0;
    Grid<int> dist(world.width, world.height, -1);
    std::queue<Cell> q;
    dist.at(a) = 0;
    q.push(a);
    while (!q.empty()) {
        Cell c = q.front();
        q.pop();
        for (Cell d : kNeighbors4) {
            Cell n = offset(c, d);
            if (!world.is_free(n) || dist.at(n) >= 0) continue;
            dist.at(n) = dist.at(c) + 1;
            if (n == b) return dist.at(n);
            q.push(n);
        }
    }
    return std::nullopt;
}

/// BFS distance field over free cells from one source; -1 marks unreachable.
inline Grid<int> free_distance_field(const GridWorld& world, Cell from) {
    if (!world.is_free(from)) throw WorldError("free_distance_field: source not free");
    Grid<int> dist(world.width, world.height, -1);
    std::queue<Cell> q;
    dist.at(from) = 0;
    q.push(from);
    while (!q.empty()) {
        Cell c = q.front();
        q.pop();
        for (Cell d : kNeighbors4) {
            Cell n = offset(c, d);
            if (!world.is_free(n) || dist.at(n) >= 0) continue;
            dist.at(n) = dist.at(c) + 1;
            q.push(n);
        }
    }
    return dist;
}

/// Checks every GridWorld invariant; throws WorldError naming the first
/// violation. Called by the generator and the scenario loader.
inline void validate_world(const GridWorld& world) {
    if (world.width <= 0 || world.height <= 0) throw WorldError("world dimensions must be positive");
    if (world.occupancy.width() != world.width || world.occupancy.height() != world.height)
        throw WorldError("occupancy dimensions mismatch");
    if (world.room_label.width() != world.width || world.room_label.height() != world.height)
        throw WorldError("room label dimensions mismatch");
    if (world.room_types < 1) throw WorldError("room type count must be >= 1");
    if (world.class_count < 1) throw WorldError("class count must be >= 1");
    size_t k = world.targets.size();
    if (k < 1 || k > 8) throw WorldError("K out of range (need 1 <= K <= 8)");
    for (size_t i = 0; i < world.occupancy.size(); ++i) {
        if (world.room_label[i] >= world.room_types) throw WorldError("room label out of range");
    }
    for (const SceneObject& so : world.scene_objects) {
        if (so.class_id < 0 || so.class_id >= world.class_count) throw WorldError("object class out of range");
        if (!world.is_free(so.cell)) throw WorldError("scene object not on a free cell");
    }
    for (int t : world.targets) {
        if (t < 0 || t >= static_cast<int>(world.scene_objects.size()))
            throw WorldError("target index out of range");
    }
    // Targets must be mutually reachable; spawn sampling later restricts
    // itself to cells that reach all of them.
    Grid<int> dist = free_distance_field(world, world.target_cell(0));
    for (size_t j = 1; j < k; ++j) {
        if (dist.at(world.target_cell(static_cast<int>(j))) < 0)
            throw WorldError("targets not mutually reachable");
    }
}

/// Free cells from which every target is reachable, in (y, x) order.
inline std::vector<Cell> valid_spawn_cells(const GridWorld& world) {
    Grid<int> dist = free_distance_field(world, world.target_cell(0));
    std::vector<Cell> out;
    for (int y = 0; y < world.height; ++y) {
        for (int x = 0; x < world.width; ++x) {
            Cell c{x, y};
            if (world.is_free(c) && dist.at(c) >= 0) out.push_back(c);
        }
    }
    return out;
}

}  // namespace finder
