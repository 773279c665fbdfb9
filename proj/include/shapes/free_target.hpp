#pragma once

#include "shapes/grid.hpp"
#include "shapes/transport.hpp"

namespace shapes {

// Record of the window-size and sparsification checks attached to a solve.
struct WindowAudit {
    bool pass = false;            // no used sink lies on the window's outermost shell
    double max_distance = 0.0;    // longest transport arc (length units)
    int shell_margin_cells = 0;   // min cell distance from a used sink to the rim
    int enlargements = 0;         // window doublings performed
    int certificate_rounds = 0;   // pruning-certificate growth rounds
};

// Exact free-target distance of a shape: the optimal equal-volume disjoint
// target F, the plan reaching it, and the audited window it was solved in.
// Plan indices refer to positions in e.cells() (sources) and
// witness.cells() (sinks).
struct FreeTargetResult {
    double wp = 0.0;
    double wp_pow_p = 0.0;
    double p = 1.0;
    GridShape witness;
    TransportPlan plan;
    Region window;
    WindowAudit audits;
};

// Computes the free-target distance exactly: sinks are the window cells not in
// e, each with capacity h^n; the integral optimal flow makes the occupied
// sinks a genuine set. The window starts at pad_factor * |E|^(1/n) of padding
// and doubles (at most 4 times) whenever the audit fails; WindowOverflow is
// thrown if it still fails. Throws EmptyShape on empty input.
FreeTargetResult solve_free_target(const GridShape& e, double p, double pad_factor = 3.0);

// Re-derives the audit record from a result (rim check, distances).
WindowAudit window_audit(const FreeTargetResult& r);

// Distance with the empty-set convention: 0 for an empty shape.
double wp_with_convention(const GridShape& e, double p, double pad_factor = 3.0);

// Constructive upper bound: tiles space by cubes of volume 2|E| (in cells:
// side ceil((2N)^(1/n))), matches E's cells inside each cube with free cells
// of the same cube, and returns that feasible cost (>= exact wp^p) plus the
// feasible target.
struct UpperBoundResult {
    double cost_p = 0.0;  // feasible transport cost, an upper bound on wp^p
    GridShape target;
};
UpperBoundResult cube_partition_upper_bound(const GridShape& e, double p);

// Decomposes e into single-linkage clusters at threshold
// 2 * pad_factor * |E|^(1/n), solves each independently, and combines with
// the power-p additivity wp^p(union) = sum wp^p(cluster). Agrees with the
// monolithic solve whenever the separation criterion holds.
FreeTargetResult additive_split_solve(const GridShape& e, double p, double pad_factor = 3.0);

// Single-linkage clusters of e at the given center-distance threshold,
// ordered by lexicographic minimum cell.
std::vector<GridShape> proximity_clusters(const GridShape& e, double threshold);

}  // namespace shapes
