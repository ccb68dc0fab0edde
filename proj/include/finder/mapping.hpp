#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "finder/grid.hpp"
#include "finder/world.hpp"

namespace finder {

enum class CellKnowledge : uint8_t { Unknown, Free, Obstacle };

/// Robot belief over cell occupancy. Cells only transition away from Unknown;
/// the world is static so direct observations are stable.
struct OccupancyMap {
    Grid<CellKnowledge> cells;

    OccupancyMap() = default;
    OccupancyMap(int width, int height) : cells(width, height, CellKnowledge::Unknown) {}

    int width() const { return cells.width(); }
    int height() const { return cells.height(); }
    CellKnowledge at(Cell c) const { return cells.at(c); }
    bool known_free(Cell c) const { return cells.in_bounds(c) && cells.at(c) == CellKnowledge::Free; }
    bool traversable(Cell c) const {
        return cells.in_bounds(c) && cells.at(c) != CellKnowledge::Obstacle;
    }
    int unknown_count() const {
        int n = 0;
        for (auto v : cells)
            if (v == CellKnowledge::Unknown) ++n;
        return n;
    }
};

/// Visible free cells become Free, ray-terminating obstacle faces become
/// Obstacle, everything else is untouched. Idempotent for repeated views.
inline void update_occupancy(OccupancyMap& map, const Observation& obs) {
    for (const VisibleCell& v : obs.visible)
        map.cells.at(v.cell) = v.occluding ? CellKnowledge::Obstacle : CellKnowledge::Free;
}

/// Per-class binary presence map of observed scene objects. Bits only get
/// set, never cleared. Keeps a per-class cell list so score computation can
/// iterate the sparse support cheaply.
class SemanticMap {
public:
    SemanticMap() = default;
    SemanticMap(int width, int height, int class_count)
        : class_count_(class_count),
          bits_(class_count, Grid<uint8_t>(width, height, 0)),
          marked_(class_count) {}

    int class_count() const { return class_count_; }
    bool test(int class_id, Cell c) const { return bits_[class_id].at(c) != 0; }
    const std::vector<Cell>& marked(int class_id) const { return marked_[class_id]; }

    void set(int class_id, Cell c) {
        if (class_id < 0 || class_id >= class_count_)
            throw std::out_of_range("semantic map: class id out of range");
        uint8_t& bit = bits_[class_id].at(c);
        if (!bit) {
            bit = 1;
            marked_[class_id].push_back(c);
        }
    }

    friend bool operator==(const SemanticMap& a, const SemanticMap& b) {
        return a.bits_ == b.bits_;
    }

private:
    int class_count_ = 0;
    std::vector<Grid<uint8_t>> bits_;
    std::vector<std::vector<Cell>> marked_;
};

/// Marks non-target detections. Target detections are routed to the planner's
/// waypoint logic instead of the map.
inline void update_semantic(SemanticMap& map, const Observation& obs) {
    for (const Detection& d : obs.detections)
        if (!d.is_target) map.set(d.class_id, d.cell);
}

using ConfidenceMap = Grid<double>;

/// Cone-shaped view confidence: 1 on the optical axis, falling off as
/// cos^2(theta / (fov/2) * pi/2), zero on obstacle faces and outside the view.
inline ConfidenceMap cone_mask(const Observation& obs, const SensorConfig& sensor, int width, int height) {
    if (!(sensor.fov_deg > 0.0)) throw std::invalid_argument("cone_mask: fov must be positive");
    ConfidenceMap mask(width, height, 0.0);
    const double half_fov = sensor.fov_deg * std::numbers::pi / 360.0;
    for (const VisibleCell& v : obs.visible) {
        if (v.occluding) continue;  // obstacle faces carry zero confidence
        double ratio = std::min(1.0, std::abs(v.off_axis) / half_fov);
        double c = std::cos(ratio * std::numbers::pi / 2.0);
        mask.at(v.cell) = c * c;
    }
    return mask;
}

/// Ratio-of-squares confidence fusion. A weighted mean of its two inputs, so
/// the result always lies between them; 0/0 (never observed) stays 0.
inline ConfidenceMap fuse_confidence(const ConfidenceMap& now, const ConfidenceMap& prev) {
    if (now.width() != prev.width() || now.height() != prev.height())
        throw std::invalid_argument("fuse_confidence: dimension mismatch");
    ConfidenceMap out(now.width(), now.height(), 0.0);
    for (size_t i = 0; i < out.size(); ++i) {
        double a = now[i], b = prev[i];
        double denom = a + b;
        out[i] = denom > 0.0 ? (a * a + b * b) / denom : 0.0;
    }
    return out;
}

}  // namespace finder
