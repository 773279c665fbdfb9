#pragma once

#include <span>
#include <vector>

#include "shapes/grid.hpp"

namespace shapes {

// Weighted point cloud: the discretization of Lebesgue measure restricted to a
// shape (cell centers weighted by cell volume), or any equal-mass test data.
struct DiscreteMeasure {
    int dim = 2;
    std::vector<Point> points;
    std::vector<double> masses;

    double total() const;
    void validate() const;  // positive masses, matching lengths

    static DiscreteMeasure from_shape(const GridShape& s);
};

struct PlanEntry {
    int src = 0;
    int snk = 0;
    double mass = 0.0;
    double distance = 0.0;  // Euclidean source-sink distance
};

// Sparse coupling between two discrete measures, with its p-cost.
struct TransportPlan {
    std::vector<PlanEntry> entries;
    double cost_p = 0.0;  // sum of mass * distance^p
    double p = 1.0;
};

// Recomputes sum(mass * distance^p) from the entries.
double plan_cost(const TransportPlan& plan, double p);

struct CapacitatedSink {
    Point point{0.0, 0.0, 0.0};
    double capacity = 0.0;
};

struct FlowOptions {
    // Per-source arc radius (length units): arcs to sinks farther than this are
    // pruned. Empty disables pruning. Pruned solves are validated by an LP dual
    // certificate and radii grow automatically until it passes, so pruning is
    // never silent.
    std::vector<double> source_radius;
    // Processing order of the sources (a permutation of 0..m-1). The optimum is
    // order-independent; augmenting-path lengths are not, so callers with
    // geometric structure can pass e.g. a deepest-first order. Empty keeps
    // input order.
    std::vector<int> source_order;
};

struct FlowSolution {
    TransportPlan plan;
    std::vector<double> source_dual;  // optimal duals of the supply constraints
    double max_arc_distance = 0.0;
    int certificate_rounds = 0;  // radius-growth rounds needed by the certificate
};

// Exact minimum of the discrete Kantorovich problem with cost |x-y|^p between
// equal-total measures. Deterministic for fixed input ordering; integral in
// the common mass unit when one exists. Throws MassMismatch on unequal totals.
TransportPlan solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

// Min-cost flow saturating all sources into capacitated sinks. With unit
// supplies and capacities the optimal flow is integral, so the occupied sinks
// form a set. Throws InsufficientCapacity when total capacity < total supply.
TransportPlan solve_flow_to_capacitated_sinks(const DiscreteMeasure& mu,
                                              std::span<const CapacitatedSink> sinks, double p);

// As above, with pruning options and dual information exposed.
FlowSolution solve_capacitated_detailed(const DiscreteMeasure& mu,
                                        std::span<const CapacitatedSink> sinks, double p,
                                        const FlowOptions& options = {});

// Independent oracle: exact minimum over all permutation matchings for
// equal-unit-mass instances with at most 8 points per side. Returns the
// p-cost (not its p-th root).
double brute_force_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

namespace detail {
double point_dist2(const Point& a, const Point& b, int dim);
double cost_from_dist2(double d2, double p);
double cost_from_distance(double d, double p);
}  // namespace detail

}  // namespace shapes
