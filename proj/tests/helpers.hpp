#pragma once

#include <string>
#include <vector>

#include "finder/world.hpp"

namespace helpers {

/// Builds a world from ASCII art rows: '.' free, '#' obstacle, a decimal
/// digit marks a free cell with that room label. Objects and targets are
/// attached by the caller.
inline finder::GridWorld ascii_world(const std::vector<std::string>& rows, int room_types = 1,
                                     int class_count = 1) {
    finder::GridWorld w;
    w.height = static_cast<int>(rows.size());
    w.width = static_cast<int>(rows[0].size());
    w.room_types = room_types;
    w.class_count = class_count;
    w.occupancy = finder::Grid<finder::Terrain>(w.width, w.height, finder::Terrain::Obstacle);
    w.room_label = finder::Grid<uint8_t>(w.width, w.height, 0);
    for (int y = 0; y < w.height; ++y)
        for (int x = 0; x < w.width; ++x) {
            char c = rows[y][x];
            if (c == '.') {
                w.occupancy.at(x, y) = finder::Terrain::Free;
            } else if (c >= '0' && c <= '9') {
                w.occupancy.at(x, y) = finder::Terrain::Free;
                w.room_label.at(x, y) = static_cast<uint8_t>(c - '0');
            }
        }
    return w;
}

inline int add_object(finder::GridWorld& w, int class_id, finder::Cell cell, bool target = false) {
    w.scene_objects.push_back({class_id, cell});
    int idx = static_cast<int>(w.scene_objects.size()) - 1;
    if (target) w.targets.push_back(idx);
    return idx;
}

}  // namespace helpers
