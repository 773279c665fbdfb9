#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shapes/free_target.hpp"
#include "shapes/grid.hpp"
#include "shapes/perimeter.hpp"

namespace shapes {

// Problem instance: minimize perimeter(E) + lambda * wp(E) over shapes of
// exactly target_cells cells on the given grid.
struct EnergyParams {
    double lambda = 1.0;
    double p = 1.0;
    int target_cells = 1;
    Grid grid;
    double pad_factor = 3.0;
    int recompute_every = 25;  // accepted moves between exact wp solves
};

struct EnergyReport {
    double perimeter = 0.0;
    double wp = 0.0;
    double total = 0.0;
    GridShape witness_f;
    bool exact = true;
};

struct AnnealSchedule {
    double t0 = 1.0;
    double alpha = 0.999;
    std::int64_t steps = 0;
};

struct TraceRow {
    std::int64_t step = 0;
    double temperature = 0.0;
    bool accepted = false;
    double total = 0.0;  // surrogate energy, exact at rows flagged exact
    bool exact = false;
};

struct OptimizerResult {
    GridShape best_shape;
    EnergyReport best_report;
    std::vector<TraceRow> trace;
    std::uint64_t seed = 0;
    std::int64_t moves_tried = 0;
    std::int64_t moves_accepted = 0;
    std::int64_t exact_evaluations = 0;
    // Times an exact solve exceeded the surrogate bound at the then-current
    // constant; the constant is raised to cover each exceedance.
    std::int64_t surrogate_violations = 0;
    double fitted_continuity_constant = 0.0;
};

// Exact energy evaluation. Throws VolumeViolation unless |E| = target_cells.
EnergyReport energy(const GridShape& e, const EnergyParams& params);

// Volume-preserving stochastic local search: swap moves (remove a boundary
// cell, add an exterior-boundary cell) with Metropolis acceptance on a
// surrogate energy. The surrogate tracks the last exact wp solve plus a
// Lipschitz-in-symmetric-difference margin; wp is re-solved exactly every
// recompute_every accepted moves and whenever a new best is possible, and the
// reported best is always exact and non-increasing.
OptimizerResult anneal(const GridShape& init, const EnergyParams& params,
                       const AnnealSchedule& schedule, std::uint64_t seed);

enum class AnsatzKind { ball, cylinder, droplets, segments_1d };

struct AnsatzSpec {
    AnsatzKind kind = AnsatzKind::ball;
    int count = 1;              // droplets / segments
    double aspect_ratio = 1.0;  // cylinder length-to-width
};

// Deterministic rasterized starting shape of exactly target_cells cells.
// droplets/segments place congruent pieces separated beyond the additivity
// threshold. Throws Unrepresentable when the request does not divide evenly
// or does not fit the dimension.
GridShape ansatz(const AnsatzSpec& spec, const EnergyParams& params);

AnsatzKind ansatz_kind_from_string(const std::string& name);
std::string to_string(AnsatzKind kind);

struct Oracle1DResult {
    int k_star = 1;
    double energy = 0.0;
    std::vector<double> energies;  // energies[k-1] for k = 1..kmax
};

// Exhaustive search over families of k equal well-separated segments of total
// length 1: energy(k) = 2k + lambda * w1 / k, where w1 is the free-target
// distance of the unit segment measured once on a fine grid. (Each segment of
// length 1/k contributes (1/k)^(p+1) * w1^p to the p-th power of the union's
// distance; summing k of them and taking the p-th root gives w1/k for any p.)
Oracle1DResult oracle_1d(double lambda, double p, int kmax);

}  // namespace shapes
