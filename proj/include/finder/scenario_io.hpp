#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "finder/textio.hpp"
#include "finder/world.hpp"

namespace finder {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kScenarioMagic = "finder-scenario v1";

// Scenario format, line oriented:
//   finder-scenario v1
//   width W / height H / room_types R / classes L / targets K / resolution M
//   map        followed by H rows of W chars, '.' free, '#' obstacle
//   rooms      followed by H rows of W hex digits (room class per cell)
//   obj <class_id> <x> <y>     one line per scene object, in index order
//   tgt <object_index>         one line per target, in target order
inline void save_scenario(std::ostream& out, const GridWorld& world) {
    out << kScenarioMagic << '\n';
    out << "width " << world.width << '\n';
    out << "height " << world.height << '\n';
    out << "room_types " << world.room_types << '\n';
    out << "classes " << world.class_count << '\n';
    out << "targets " << world.targets.size() << '\n';
    out << "resolution " << format_double(world.resolution) << '\n';
    out << "map\n";
    for (int y = 0; y < world.height; ++y) {
        for (int x = 0; x < world.width; ++x)
            out << (world.occupancy.at(x, y) == Terrain::Free ? '.' : '#');
        out << '\n';
    }
    out << "rooms\n";
    for (int y = 0; y < world.height; ++y) {
        for (int x = 0; x < world.width; ++x) out << "0123456789abcdef"[world.room_label.at(x, y)];
        out << '\n';
    }
    for (const SceneObject& so : world.scene_objects)
        out << "obj " << so.class_id << ' ' << so.cell.x << ' ' << so.cell.y << '\n';
    for (int t : world.targets) out << "tgt " << t << '\n';
}

inline GridWorld load_scenario(std::istream& in) {
    LineReader reader(in);
    auto fail = [&](const std::string& msg) -> ScenarioError {
        return ScenarioError("scenario line " + std::to_string(reader.line_no()) + ": " + msg);
    };

    if (reader.require("magic line") != kScenarioMagic) throw fail("bad magic, expected 'finder-scenario v1'");
    auto keyed_int = [&](const std::string& key) {
        auto parts = split_ws(reader.require(key));
        if (parts.size() != 2 || parts[0] != key) throw fail("expected '" + key + " <value>'");
        return static_cast<int>(parse_int(parts[1], key));
    };

    GridWorld world;
    world.width = keyed_int("width");
    world.height = keyed_int("height");
    world.room_types = keyed_int("room_types");
    world.class_count = keyed_int("classes");
    int k = keyed_int("targets");
    {
        auto parts = split_ws(reader.require("resolution"));
        if (parts.size() != 2 || parts[0] != "resolution") throw fail("expected 'resolution <value>'");
        world.resolution = parse_double(parts[1], "resolution");
    }
    if (world.width <= 0 || world.height <= 0) throw fail("dimensions must be positive");
    if (world.room_types < 1 || world.room_types > 16) throw fail("room_types must lie in 1..16");

    if (reader.require("map header") != "map") throw fail("expected 'map'");
    world.occupancy = Grid<Terrain>(world.width, world.height, Terrain::Obstacle);
    for (int y = 0; y < world.height; ++y) {
        std::string row = reader.require("map row");
        if (static_cast<int>(row.size()) != world.width) throw fail("map row has wrong length");
        for (int x = 0; x < world.width; ++x) {
            if (row[x] == '.')
                world.occupancy.at(x, y) = Terrain::Free;
            else if (row[x] == '#')
                world.occupancy.at(x, y) = Terrain::Obstacle;
            else
                throw fail(std::string("bad map char '") + row[x] + "'");
        }
    }

    if (reader.require("rooms header") != "rooms") throw fail("expected 'rooms'");
    world.room_label = Grid<uint8_t>(world.width, world.height, 0);
    for (int y = 0; y < world.height; ++y) {
        std::string row = reader.require("room row");
        if (static_cast<int>(row.size()) != world.width) throw fail("room row has wrong length");
        for (int x = 0; x < world.width; ++x) {
            char ch = row[x];
            int v = ch >= '0' && ch <= '9'   ? ch - '0'
                    : ch >= 'a' && ch <= 'f' ? ch - 'a' + 10
                                             : -1;
            if (v < 0 || v >= world.room_types) throw fail(std::string("bad room digit '") + ch + "'");
            world.room_label.at(x, y) = static_cast<uint8_t>(v);
        }
    }

    std::string line;
    while (reader.next(line)) {
        if (line.empty()) continue;
        auto parts = split_ws(line);
        if (parts[0] == "obj") {
            if (!world.targets.empty()) throw fail("obj lines must precede tgt lines");
            if (parts.size() != 4) throw fail("expected 'obj <class_id> <x> <y>'");
            SceneObject so;
            so.class_id = static_cast<int>(parse_int(parts[1], "class_id"));
            so.cell.x = static_cast<int>(parse_int(parts[2], "x"));
            so.cell.y = static_cast<int>(parse_int(parts[3], "y"));
            world.scene_objects.push_back(so);
        } else if (parts[0] == "tgt") {
            if (parts.size() != 2) throw fail("expected 'tgt <object_index>'");
            world.targets.push_back(static_cast<int>(parse_int(parts[1], "object_index")));
        } else {
            throw fail("unknown directive '" + std::string(parts[0]) + "'");
        }
    }
    if (static_cast<int>(world.targets.size()) != k)
        throw fail("target count mismatch: header says " + std::to_string(k) + ", found " +
                   std::to_string(world.targets.size()));

    try {
        validate_world(world);
    } catch (const WorldError& e) {
        throw ScenarioError(std::string("scenario invalid: ") + e.what());
    }
    return world;
}

inline void save_scenario_file(const std::string& path, const GridWorld& world) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError("cannot open for writing: " + path);
    save_scenario(out, world);
    if (!out) throw ScenarioError("write failed: " + path);
}

inline GridWorld load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open: " + path);
    return load_scenario(in);
}

}  // namespace finder
