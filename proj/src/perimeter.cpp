#include "shapes/perimeter.hpp"

namespace shapes {

std::int64_t boundary_face_count(const GridShape& s) {
    const int nn = detail::neighbor_count(s.grid().dim);
    std::int64_t faces = 0;
    for (const auto& c : s.cells()) {
        for (int w = 0; w < nn; ++w) {
            if (!s.contains(detail::neighbor(c, w))) ++faces;
        }
    }
    return faces;
}

PerimeterValue perimeter(const GridShape& s) {
    return {static_cast<double>(boundary_face_count(s)) * s.grid().face_area(),
            PerimeterValue::Convention::face_count};
}

PerimeterValue localized_perimeter(const GridShape& s, const Region& a) {
    if (!(s.grid() == a.grid)) throw GridMismatch("region lives on a different grid");
    const int dim = s.grid().dim;
    const int nn = detail::neighbor_count(dim);
    // Face midpoints have half-integer coordinates along tangential axes and
    // integer coordinates along the normal axis; doubling all coordinates
    // makes the containment test exact integer arithmetic.
    std::int64_t faces = 0;
    for (const auto& c : s.cells()) {
        for (int w = 0; w < nn; ++w) {
            if (s.contains(detail::neighbor(c, w))) continue;
            const int axis = w / 2;
            bool inside = true;
            for (int d = 0; d < dim; ++d) {
                const std::int64_t mid2 =
                    (d == axis) ? 2ll * (c[d] + (w % 2 == 0 ? 0 : 1)) : 2ll * c[d] + 1;
                if (mid2 < 2ll * a.lo[d] || mid2 >= 2ll * a.hi[d]) {
                    inside = false;
                    break;
                }
            }
            if (inside) ++faces;
        }
    }
    return {static_cast<double>(faces) * s.grid().face_area(),
            PerimeterValue::Convention::face_count};
}

std::int64_t face_delta_swap(const GridShape& s, const CellIndex& remove, const CellIndex& add) {
    if (!s.contains(remove)) throw BadMove("cell to remove is not in the shape");
    if (s.contains(add)) throw BadMove("cell to add is already in the shape");
    const int nn = detail::neighbor_count(s.grid().dim);
    int occupied_around_remove = 0;
    for (int w = 0; w < nn; ++w) {
        if (s.contains(detail::neighbor(remove, w))) ++occupied_around_remove;
    }
    // Neighbors of add, evaluated after the removal.
    int occupied_around_add = 0;
    for (int w = 0; w < nn; ++w) {
        const CellIndex n = detail::neighbor(add, w);
        if (n != remove && s.contains(n)) ++occupied_around_add;
    }
    return 2ll * (occupied_around_remove - occupied_around_add);
}

double perimeter_delta_swap(const GridShape& s, const CellIndex& remove, const CellIndex& add) {
    return static_cast<double>(face_delta_swap(s, remove, add)) * s.grid().face_area();
}

}  // namespace shapes
