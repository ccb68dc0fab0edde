#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace finder {

struct Cell {
    int x = 0;
    int y = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
    // Row-major ordering: (y, x). Used for all deterministic tie-breaks.
    friend auto operator<=>(const Cell& a, const Cell& b) {
        if (auto c = a.y <=> b.y; c != 0) return c;
        return a.x <=> b.x;
    }
};

/// Dense row-major grid of T with (x, y) indexing, y selecting the row.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : w_(width), h_(height), cells_(static_cast<size_t>(width) * height, fill) {
        assert(width >= 0 && height >= 0);
    }

    int width() const { return w_; }
    int height() const { return h_; }
    size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }

    bool in_bounds(int x, int y) const { return x >= 0 && x < w_ && y >= 0 && y < h_; }
    bool in_bounds(Cell c) const { return in_bounds(c.x, c.y); }

    T& at(int x, int y) {
        assert(in_bounds(x, y));
        return cells_[static_cast<size_t>(y) * w_ + x];
    }
    const T& at(int x, int y) const {
        assert(in_bounds(x, y));
        return cells_[static_cast<size_t>(y) * w_ + x];
    }
    T& at(Cell c) { return at(c.x, c.y); }
    const T& at(Cell c) const { return at(c.x, c.y); }

    T& operator[](size_t i) { return cells_[i]; }
    const T& operator[](size_t i) const { return cells_[i]; }

    Cell cell_of(size_t i) const { return Cell{static_cast<int>(i % w_), static_cast<int>(i / w_)}; }

    void fill(const T& v) { cells_.assign(cells_.size(), v); }

    auto begin() { return cells_.begin(); }
    auto end() { return cells_.end(); }
    auto begin() const { return cells_.begin(); }
    auto end() const { return cells_.end(); }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int w_ = 0;
    int h_ = 0;
    std::vector<T> cells_;
};

// 4-connected neighborhood, fixed order: east, south, west, north.
inline constexpr Cell kNeighbors4[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

// 8-connected neighborhood, fixed scan order by (y, x).
inline constexpr Cell kNeighbors8[8] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                        {1, 0},   {-1, 1}, {0, 1},  {1, 1}};

inline Cell offset(Cell c, Cell d) { return Cell{c.x + d.x, c.y + d.y}; }

}  // namespace finder

template <>
struct std::hash<finder::Cell> {
    size_t operator()(const finder::Cell& c) const noexcept {
        return (static_cast<size_t>(static_cast<uint32_t>(c.y)) << 32) ^ static_cast<uint32_t>(c.x);
    }
};
