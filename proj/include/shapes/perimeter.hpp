#pragma once

#include "shapes/grid.hpp"

namespace shapes {

// Discrete perimeter of a shape. The face_count convention is spacing^(dim-1)
// times the number of grid faces with exactly one occupied side; it is exact
// (integer count times exact power) and admits O(1) incremental updates. The
// smoothed tag is a reserved extension point and is never produced here.
struct PerimeterValue {
    enum class Convention { face_count, smoothed };
    double value = 0.0;
    Convention convention = Convention::face_count;
};

PerimeterValue perimeter(const GridShape& s);

// Raw boundary face count, before scaling by face area.
std::int64_t boundary_face_count(const GridShape& s);

// Counts only boundary faces whose midpoint lies in `a`. Localized values over
// a partition of space by disjoint regions sum exactly to perimeter(s).
PerimeterValue localized_perimeter(const GridShape& s, const Region& a);

// perimeter(s with {remove -> add} applied) - perimeter(s), from O(1)
// neighborhood lookups. Exactly consistent with recomputation.
// Preconditions: remove in s, add not in s (else BadMove).
double perimeter_delta_swap(const GridShape& s, const CellIndex& remove, const CellIndex& add);

// Face-count delta of the same swap as an exact integer.
std::int64_t face_delta_swap(const GridShape& s, const CellIndex& remove, const CellIndex& add);

}  // namespace shapes
