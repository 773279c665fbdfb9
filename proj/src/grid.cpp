#include "shapes/grid.hpp"

#include <algorithm>
#include <cmath>

namespace shapes {

Grid::Grid(int dim_, double spacing_, Point origin_) : dim(dim_), spacing(spacing_), origin(origin_) {
    if (dim < 1 || dim > 3) throw BadInput("grid dimension must be 1, 2, or 3");
    if (!(spacing > 0.0)) throw BadInput("grid spacing must be positive");
    for (int d = dim; d < 3; ++d) origin[d] = 0.0;
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= spacing;
    return v;
}

double Grid::face_area() const {
    double v = 1.0;
    for (int d = 0; d + 1 < dim; ++d) v *= spacing;
    return v;
}

Point Grid::cell_center(const CellIndex& c) const {
    Point p{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) p[d] = origin[d] + spacing * (c[d] + 0.5);
    return p;
}

bool Region::contains(const CellIndex& c) const {
    for (int d = 0; d < grid.dim; ++d) {
        if (c[d] < lo[d] || c[d] >= hi[d]) return false;
    }
    return true;
}

std::int64_t Region::cell_count() const {
    std::int64_t n = 1;
    for (int d = 0; d < grid.dim; ++d) {
        if (hi[d] <= lo[d]) return 0;
        n *= hi[d] - lo[d];
    }
    return n;
}

bool Region::contains_region(const Region& other) const {
    for (int d = 0; d < grid.dim; ++d) {
        if (other.lo[d] < lo[d] || other.hi[d] > hi[d]) return false;
    }
    return true;
}

bool Region::on_rim(const CellIndex& c) const {
    for (int d = 0; d < grid.dim; ++d) {
        if (c[d] == lo[d] || c[d] == hi[d] - 1) return true;
    }
    return false;
}

GridShape GridShape::from_cells(Grid grid, std::vector<CellIndex> cells) {
    for (auto& c : cells) {
        for (int d = grid.dim; d < 3; ++d) c[d] = 0;
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    GridShape s(grid);
    s.cells_ = std::move(cells);
    s.index_.reserve(s.cells_.size() * 2);
    s.index_.insert(s.cells_.begin(), s.cells_.end());
    return s;
}

double volume(const GridShape& s) {
    return static_cast<double>(s.cell_count()) * s.grid().cell_volume();
}

namespace {
void require_same_grid(const GridShape& a, const GridShape& b) {
    if (!(a.grid() == b.grid())) throw GridMismatch("shapes live on different grids");
}
}  // namespace

GridShape symdiff(const GridShape& a, const GridShape& b) {
    require_same_grid(a, b);
    std::vector<CellIndex> out;
    std::set_symmetric_difference(a.cells().begin(), a.cells().end(), b.cells().begin(),
                                  b.cells().end(), std::back_inserter(out));
    return GridShape::from_cells(a.grid(), std::move(out));
}

GridShape intersect(const GridShape& a, const GridShape& b) {
    require_same_grid(a, b);
    std::vector<CellIndex> out;
    std::set_intersection(a.cells().begin(), a.cells().end(), b.cells().begin(), b.cells().end(),
                          std::back_inserter(out));
    return GridShape::from_cells(a.grid(), std::move(out));
}

GridShape unite(const GridShape& a, const GridShape& b) {
    require_same_grid(a, b);
    std::vector<CellIndex> out;
    std::set_union(a.cells().begin(), a.cells().end(), b.cells().begin(), b.cells().end(),
                   std::back_inserter(out));
    return GridShape::from_cells(a.grid(), std::move(out));
}

bool disjoint(const GridShape& a, const GridShape& b) {
    require_same_grid(a, b);
    const GridShape& small = a.cell_count() <= b.cell_count() ? a : b;
    const GridShape& large = a.cell_count() <= b.cell_count() ? b : a;
    for (const auto& c : small.cells()) {
        if (large.contains(c)) return false;
    }
    return true;
}

GridShape translate(const GridShape& s, const CellIndex& offset) {
    std::vector<CellIndex> out(s.cells().begin(), s.cells().end());
    for (auto& c : out) {
        for (int d = 0; d < s.grid().dim; ++d) c[d] += offset[d];
    }
    return GridShape::from_cells(s.grid(), std::move(out));
}

GridShape refine(const GridShape& s, int factor) {
    if (factor < 1) throw BadInput("refine factor must be >= 1");
    if (factor == 1) return s;
    const Grid& g = s.grid();
    Grid fine(g.dim, g.spacing / factor, g.origin);
    std::vector<CellIndex> out;
    std::int64_t per_cell = 1;
    for (int d = 0; d < g.dim; ++d) per_cell *= factor;
    out.reserve(s.cell_count() * per_cell);
    for (const auto& c : s.cells()) {
        CellIndex base{c[0] * factor, c[1] * factor, c[2] * factor};
        for (int d = g.dim; d < 3; ++d) base[d] = 0;
        CellIndex off{0, 0, 0};
        while (true) {
            out.push_back({base[0] + off[0], base[1] + off[1], base[2] + off[2]});
            int d = 0;
            for (; d < g.dim; ++d) {
                if (++off[d] < factor) break;
                off[d] = 0;
            }
            if (d == g.dim) break;
        }
    }
    return GridShape::from_cells(fine, std::move(out));
}

GridShape rescale_spacing(const GridShape& s, double r) {
    if (!(r > 0.0)) throw BadInput("spacing scale must be positive");
    const Grid& g = s.grid();
    Grid scaled(g.dim, g.spacing * r, g.origin);
    std::vector<CellIndex> cells(s.cells().begin(), s.cells().end());
    return GridShape::from_cells(scaled, std::move(cells));
}

Region bounding_window(const GridShape& s, int pad_cells) {
    if (s.empty()) throw EmptyShape("bounding_window of empty shape");
    if (pad_cells < 0) throw BadInput("pad_cells must be >= 0");
    const Grid& g = s.grid();
    Region r{g, {0, 0, 0}, {0, 0, 0}};
    for (int d = 0; d < 3; ++d) {
        r.lo[d] = s.cells().front()[d];
        r.hi[d] = r.lo[d] + 1;
    }
    for (const auto& c : s.cells()) {
        for (int d = 0; d < g.dim; ++d) {
            r.lo[d] = std::min(r.lo[d], c[d]);
            r.hi[d] = std::max(r.hi[d], c[d] + 1);
        }
    }
    for (int d = 0; d < g.dim; ++d) {
        r.lo[d] -= pad_cells;
        r.hi[d] += pad_cells;
    }
    for (int d = g.dim; d < 3; ++d) {
        r.lo[d] = 0;
        r.hi[d] = 1;
    }
    return r;
}

namespace detail {
CellIndex neighbor(const CellIndex& c, int which) {
    CellIndex out = c;
    out[which / 2] += (which % 2 == 0) ? -1 : 1;
    return out;
}
}  // namespace detail

}  // namespace shapes
