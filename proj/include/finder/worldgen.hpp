#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "finder/rng.hpp"
#include "finder/world.hpp"

namespace finder {

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Procedural generation knobs. Room-class id 0 is reserved for corridors;
/// rooms draw their class uniformly from 1..R-1. The class-to-room affinity
/// doubles as the placement distribution and as the ground truth behind the
/// synthetic similarity model.
struct WorldGenParams {
    int width = 64;
    int height = 64;
    int room_types = 5;   // R, including the corridor class 0; at most 16
    int class_count = 20; // L
    std::vector<int> target_classes;  // K entries, each in 0..L-1
    int min_rooms = 7;
    int max_rooms = 10;
    int room_min_side = 8;
    int room_max_side = 13;
    int corridor_width = 2;
    // Objects are placed as same-class groups (a couch spans 2-3 adjacent
    // cells, each one scene-object entry); target objects are the single
    // anchor entries of their class.
    int min_object_groups_per_room = 2;
    int max_object_groups_per_room = 4;
    int max_group_size = 3;
    std::vector<double> affinity;  // L x R row-major, entries in [0,1]
    double resolution = 0.25;
    int max_attempts = 32;

    int k() const { return static_cast<int>(target_classes.size()); }
    double affinity_at(int class_id, int room_type) const {
        return affinity[static_cast<size_t>(class_id) * room_types + room_type];
    }
};

/// Structured default affinity: every class has one home room type with high
/// affinity and a low floor elsewhere. Classes sharing a home type become
/// natural cooccurrence partners. The corridor column sits mid-scale: a view
/// down a corridor should outscore a view into a wrong room (worth exploring
/// past) while any glimpse of a home room dominates both.
inline std::vector<double> structured_affinity(int class_count, int room_types, double high = 0.9,
                                               double low = 0.08, double corridor = 0.35) {
    std::vector<double> aff(static_cast<size_t>(class_count) * room_types, low);
    for (int c = 0; c < class_count; ++c) {
        int home = room_types > 1 ? 1 + c % (room_types - 1) : 0;
        for (int r = 0; r < room_types; ++r) {
            double v = r == 0 ? corridor : (r == home ? high : low);
            aff[static_cast<size_t>(c) * room_types + r] = v;
        }
    }
    return aff;
}

inline WorldGenParams default_worldgen_params(std::vector<int> target_classes = {1, 6, 11}) {
    WorldGenParams p;
    p.target_classes = std::move(target_classes);
    p.affinity = structured_affinity(p.class_count, p.room_types);
    return p;
}

namespace detail {

struct Room {
    int x, y, w, h;  // interior rectangle (free cells)
    int type;
    Cell center() const { return Cell{x + w / 2, y + h / 2}; }
    bool contains(Cell c) const { return c.x >= x && c.x < x + w && c.y >= y && c.y < y + h; }
};

inline bool rooms_overlap(const Room& a, const Room& b) {
    // Expanded by one so interiors keep a wall between them.
    return a.x - 1 < b.x + b.w && b.x - 1 < a.x + a.w && a.y - 1 < b.y + b.h && b.y - 1 < a.y + a.h;
}

inline void carve_corridor(GridWorld& world, Cell from, Cell to, int width, Rng& rng) {
    // L-shaped corridor, leg order randomized. Only obstacle cells are carved
    // (and labelled corridor); room interiors keep their labels.
    auto carve = [&](Cell c) {
        if (!world.occupancy.in_bounds(c)) return;
        if (world.occupancy.at(c) == Terrain::Obstacle) {
            world.occupancy.at(c) = Terrain::Free;
            world.room_label.at(c) = 0;
        }
    };
    auto carve_span = [&](Cell c, bool horizontal) {
        for (int off = 0; off < width; ++off)
            carve(horizontal ? Cell{c.x, c.y + off} : Cell{c.x + off, c.y});
    };
    bool x_first = rng.uniform_int(0, 1) == 0;
    Cell cur = from;
    auto walk_x = [&] {
        carve_span(cur, true);
        while (cur.x != to.x) {
            cur.x += to.x > cur.x ? 1 : -1;
            carve_span(cur, true);
        }
    };
    auto walk_y = [&] {
        carve_span(cur, false);
        while (cur.y != to.y) {
            cur.y += to.y > cur.y ? 1 : -1;
            carve_span(cur, false);
        }
    };
    if (x_first) {
        walk_x();
        walk_y();
    } else {
        walk_y();
        walk_x();
    }
}

inline bool free_cells_connected(const GridWorld& world) {
    Cell start{-1, -1};
    int free_count = 0;
    for (int y = 0; y < world.height; ++y)
        for (int x = 0; x < world.width; ++x)
            if (world.occupancy.at(x, y) == Terrain::Free) {
                if (start.x < 0) start = Cell{x, y};
                ++free_count;
            }
    if (free_count == 0) return false;
    Grid<int> dist = free_distance_field(world, start);
    int reached = 0;
    for (size_t i = 0; i < dist.size(); ++i)
        if (dist[i] >= 0) ++reached;
    return reached == free_count;
}

}  // namespace detail

/// Seeded procedural world: rectangular rooms joined by 1-cell corridors,
/// objects sampled per room from the class-to-room affinity, one target
/// object per requested target class. Identical (seed, params) yields a
/// bit-identical world; failure after bounded retries raises GenerationError.
inline GridWorld generate_world(uint64_t seed, const WorldGenParams& params) {
    if (params.k() < 1 || params.k() > 8) throw GenerationError("K out of range (need 1 <= K <= 8)");
    if (params.room_types < 2 || params.room_types > 16)
        throw GenerationError("room_types out of range (need 2 <= R <= 16)");
    if (params.class_count < 1) throw GenerationError("class_count must be >= 1");
    if (params.affinity.size() != static_cast<size_t>(params.class_count) * params.room_types)
        throw GenerationError("affinity table must be L x R");
    for (double a : params.affinity)
        if (!(a >= 0.0 && a <= 1.0)) throw GenerationError("affinity entries must lie in [0,1]");
    for (int tc : params.target_classes)
        if (tc < 0 || tc >= params.class_count) throw GenerationError("target class out of range");

    std::string last_failure = "no attempt run";
    for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(attempt)));

        GridWorld world;
        world.width = params.width;
        world.height = params.height;
        world.room_types = params.room_types;
        world.class_count = params.class_count;
        world.resolution = params.resolution;
        world.occupancy = Grid<Terrain>(params.width, params.height, Terrain::Obstacle);
        world.room_label = Grid<uint8_t>(params.width, params.height, 0);

        // Rooms: rejection-sample non-overlapping rectangles.
        std::vector<detail::Room> rooms;
        int want = rng.uniform_int(params.min_rooms, params.max_rooms);
        for (int tries = 0; tries < 400 && static_cast<int>(rooms.size()) < want; ++tries) {
            int w = rng.uniform_int(params.room_min_side, params.room_max_side);
            int h = rng.uniform_int(params.room_min_side, params.room_max_side);
            if (w + 2 > params.width || h + 2 > params.height) continue;
            int x = rng.uniform_int(1, params.width - w - 1);
            int y = rng.uniform_int(1, params.height - h - 1);
            detail::Room room{x, y, w, h, rng.uniform_int(1, params.room_types - 1)};
            bool ok = true;
            for (const auto& other : rooms)
                if (detail::rooms_overlap(room, other)) {
                    ok = false;
                    break;
                }
            if (ok) rooms.push_back(room);
        }
        if (rooms.size() < 2) {
            last_failure = "could not place at least two rooms";
            continue;
        }
        for (const auto& room : rooms)
            for (int y = room.y; y < room.y + room.h; ++y)
                for (int x = room.x; x < room.x + room.w; ++x) {
                    world.occupancy.at(x, y) = Terrain::Free;
                    world.room_label.at(x, y) = static_cast<uint8_t>(room.type);
                }

        for (size_t i = 1; i < rooms.size(); ++i)
            detail::carve_corridor(world, rooms[i - 1].center(), rooms[i].center(),
                                   std::max(1, params.corridor_width), rng);

        if (!detail::free_cells_connected(world)) {
            last_failure = "free space not connected";
            continue;
        }

        // Objects: one cell holds at most one entry; a group is a straight
        // run of same-class cells.
        Grid<uint8_t> occupied(params.width, params.height, 0);
        std::vector<double> weights(static_cast<size_t>(params.class_count));
        for (const auto& room : rooms) {
            int groups = rng.uniform_int(params.min_object_groups_per_room, params.max_object_groups_per_room);
            for (int c = 0; c < params.class_count; ++c) weights[c] = params.affinity_at(c, room.type);
            for (int g = 0; g < groups; ++g) {
                int class_id = static_cast<int>(rng.weighted_index(weights));
                int size = rng.uniform_int(1, std::max(1, params.max_group_size));
                bool horizontal = rng.uniform_int(0, 1) == 0;
                Cell start{room.x + rng.uniform_int(0, room.w - 1), room.y + rng.uniform_int(0, room.h - 1)};
                for (int i = 0; i < size; ++i) {
                    Cell cell = horizontal ? Cell{start.x + i, start.y} : Cell{start.x, start.y + i};
                    if (!room.contains(cell) || occupied.at(cell)) continue;
                    occupied.at(cell) = 1;
                    world.scene_objects.push_back(SceneObject{class_id, cell});
                }
            }
        }

        // Targets: one object instance per requested class, force-placing an
        // instance when sampling produced none.
        bool targets_ok = true;
        for (int tc : params.target_classes) {
            std::vector<int> candidates;
            for (size_t i = 0; i < world.scene_objects.size(); ++i)
                if (world.scene_objects[i].class_id == tc &&
                    std::find(world.targets.begin(), world.targets.end(), static_cast<int>(i)) ==
                        world.targets.end())
                    candidates.push_back(static_cast<int>(i));
            if (candidates.empty()) {
                std::vector<double> room_weights(rooms.size());
                for (size_t ri = 0; ri < rooms.size(); ++ri)
                    room_weights[ri] = params.affinity_at(tc, rooms[ri].type);
                bool placed = false;
                for (int tries = 0; tries < 64 && !placed; ++tries) {
                    const auto& room = rooms[rng.weighted_index(room_weights)];
                    Cell cell{room.x + rng.uniform_int(0, room.w - 1), room.y + rng.uniform_int(0, room.h - 1)};
                    if (occupied.at(cell)) continue;
                    occupied.at(cell) = 1;
                    world.scene_objects.push_back(SceneObject{tc, cell});
                    candidates.push_back(static_cast<int>(world.scene_objects.size()) - 1);
                    placed = true;
                }
                if (!placed) {
                    targets_ok = false;
                    break;
                }
            }
            world.targets.push_back(candidates[rng.uniform_int(0, static_cast<int>(candidates.size()) - 1)]);
        }
        if (!targets_ok) {
            last_failure = "could not place a target object";
            continue;
        }

        try {
            validate_world(world);
        } catch (const WorldError& e) {
            last_failure = e.what();
            continue;
        }
        return world;
    }
    throw GenerationError("world generation failed after " + std::to_string(params.max_attempts) +
                          " attempts: " + last_failure);
}

}  // namespace finder
