#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "finder/mapping.hpp"

namespace finder {

struct PgmError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Plain-text portable greymap (P2), one row of samples per image row.
/// Real-valued maps are scaled by the declared maximum so golden files stay
/// readable and diffable.
inline void write_pgm(std::ostream& out, const Grid<double>& map, double declared_max, int maxval = 255) {
    out << "P2\n" << map.width() << ' ' << map.height() << '\n' << maxval << '\n';
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            double v = declared_max > 0.0 ? map.at(x, y) / declared_max : 0.0;
            v = std::clamp(v, 0.0, 1.0);
            out << (x ? " " : "") << static_cast<int>(std::lround(v * maxval));
        }
        out << '\n';
    }
}

/// Occupancy rendering: obstacle 0, unknown 127, free 255.
inline void write_pgm(std::ostream& out, const OccupancyMap& map) {
    out << "P2\n" << map.width() << ' ' << map.height() << '\n' << 255 << '\n';
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) {
            int v = 127;
            switch (map.at(Cell{x, y})) {
                case CellKnowledge::Free: v = 255; break;
                case CellKnowledge::Obstacle: v = 0; break;
                case CellKnowledge::Unknown: v = 127; break;
            }
            out << (x ? " " : "") << v;
        }
        out << '\n';
    }
}

template <typename T>
void write_pgm_file(const std::string& path, const T& map, auto&&... args) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PgmError("cannot open for writing: " + path);
    write_pgm(out, map, args...);
    if (!out) throw PgmError("write failed: " + path);
}

/// Minimal P2 reader (golden-file tests and tooling round-trips).
inline Grid<int> read_pgm(std::istream& in) {
    std::string magic;
    in >> magic;
    if (magic != "P2") throw PgmError("expected P2 magic, got '" + magic + "'");
    int w = 0, h = 0, maxval = 0;
    in >> w >> h >> maxval;
    if (!in || w <= 0 || h <= 0 || maxval <= 0) throw PgmError("bad pgm header");
    Grid<int> out(w, h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int v;
            if (!(in >> v)) throw PgmError("truncated pgm body");
            if (v < 0 || v > maxval) throw PgmError("pgm sample out of range");
            out.at(x, y) = v;
        }
    return out;
}

}  // namespace finder
