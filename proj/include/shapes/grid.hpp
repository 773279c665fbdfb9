#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "shapes/errors.hpp"

namespace shapes {

// Integer cell index. Components beyond the grid dimension are always zero.
using CellIndex = std::array<int, 3>;

// Point in physical coordinates; components beyond the grid dimension are zero.
using Point = std::array<double, 3>;

struct CellIndexHash {
    std::size_t operator()(const CellIndex& c) const noexcept {
        // FNV-1a over the three components.
        std::uint64_t h = 14695981039346656037ull;
        for (int v : c) {
            auto u = static_cast<std::uint32_t>(v);
            for (int b = 0; b < 4; ++b) {
                h ^= (u >> (8 * b)) & 0xffu;
                h *= 1099511628211ull;
            }
        }
        return static_cast<std::size_t>(h);
    }
};

// Uniform axis-aligned grid. Cell k occupies origin + spacing * [k, k+1).
struct Grid {
    int dim = 2;
    double spacing = 1.0;
    Point origin{0.0, 0.0, 0.0};

    Grid() = default;
    Grid(int dim_, double spacing_, Point origin_ = {0.0, 0.0, 0.0});

    bool operator==(const Grid&) const = default;

    // spacing^dim, the exact volume of one cell.
    double cell_volume() const;
    // spacing^(dim-1), the exact area of one cell face.
    double face_area() const;
    // Physical center of a cell: origin + spacing * (k + 1/2).
    Point cell_center(const CellIndex& c) const;
};

// Axis-aligned half-open box [lo, hi) in index space.
struct Region {
    Grid grid;
    CellIndex lo{0, 0, 0};
    CellIndex hi{0, 0, 0};

    bool contains(const CellIndex& c) const;
    // Number of cells in the box.
    std::int64_t cell_count() const;
    bool contains_region(const Region& other) const;
    // True when the cell touches the outermost one-cell shell of the box.
    bool on_rim(const CellIndex& c) const;
};

// Immutable finite set of occupied cells. Stores a lexicographically sorted
// cell list plus a hash index for O(1) membership. The complement is never
// materialized; only windows (Regions) ever enumerate unoccupied cells.
class GridShape {
public:
    GridShape() = default;
    explicit GridShape(Grid grid) : grid_(grid) {}

    // Sorts and de-duplicates.
    static GridShape from_cells(Grid grid, std::vector<CellIndex> cells);

    const Grid& grid() const { return grid_; }
    std::span<const CellIndex> cells() const { return cells_; }
    std::size_t cell_count() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }
    bool contains(const CellIndex& c) const { return index_.count(c) != 0; }

    bool operator==(const GridShape& other) const {
        return grid_ == other.grid_ && cells_ == other.cells_;
    }

private:
    Grid grid_;
    std::vector<CellIndex> cells_;
    std::unordered_set<CellIndex, CellIndexHash> index_;
};

// |cells| * spacing^dim, exact (integer count times exact power).
double volume(const GridShape& s);

// Cells in exactly one of a, b. Throws GridMismatch when grids differ.
GridShape symdiff(const GridShape& a, const GridShape& b);

// Cells in both a and b. Throws GridMismatch when grids differ.
GridShape intersect(const GridShape& a, const GridShape& b);

// Union of cell sets. Throws GridMismatch when grids differ.
GridShape unite(const GridShape& a, const GridShape& b);

bool disjoint(const GridShape& a, const GridShape& b);

GridShape translate(const GridShape& s, const CellIndex& offset);

// Replaces each cell by f^dim subcells on the grid with spacing h/f. The
// geometric set is unchanged; with power-of-two f the volume is bit-exact.
GridShape refine(const GridShape& s, int factor);

// Same cell set reinterpreted at spacing r*h (the dilation x -> r x).
GridShape rescale_spacing(const GridShape& s, double r);

// Smallest index box containing s, dilated by pad_cells on every side.
// Throws EmptyShape on the empty shape.
Region bounding_window(const GridShape& s, int pad_cells);

namespace detail {
// 2 * dim axis neighbors of a cell (x-, x+, y-, y+, z-, z+ truncated to dim).
inline int neighbor_count(int dim) { return 2 * dim; }
CellIndex neighbor(const CellIndex& c, int which);
}  // namespace detail

}  // namespace shapes
