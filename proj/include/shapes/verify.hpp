#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shapes/free_target.hpp"
#include "shapes/grid.hpp"

namespace shapes {

// Result of one quantitative check: a measured statistic against an expected
// value or interval, plus a CSV payload with the per-sample data.
struct PropertyReport {
    std::string name;
    std::int64_t samples = 0;
    double statistic = 0.0;
    double expected_lo = 0.0;  // expected_lo == expected_hi for point targets
    double expected_hi = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string artifacts;  // CSV file name (relative), empty if not written
    std::string csv;        // CSV payload

    void judge() { pass = statistic >= expected_lo - tolerance && statistic <= expected_hi + tolerance; }
};

struct NucleationReport {
    double epsilon = 0.0;
    double r_ball = 0.0;
    std::vector<Point> points;
    std::vector<double> per_ball_volume;   // |E intersect B(x_i, r)| for each center
    double leftover_volume = 0.0;          // |E \ union B(x_i, 2r)|
    int count_i = 0;
};

// Scaling-law check. Exact variant: the same cell set solved at spacings
// r * h; the log-log slope is analytically forced to 1 + n/p and must match
// to 1e-10. Rasterized variant: balls re-rasterized at fixed h; slope within
// 2%. Returns {exact report, rasterized report}.
std::vector<PropertyReport> check_scaling(double p, int n, const std::vector<double>& radii,
                                          int raster_grid = 128);

// Fixed total volume split into m separated congruent droplets (dilations of a
// common base, so face counts and costs scale cleanly). Fits slopes of
// log wp and log P against log m; expected -1/n and +1/n. Returns the wp
// report, the perimeter report, and the product (bounded) report.
std::vector<PropertyReport> check_microdroplet(const std::vector<int>& ms, double p,
                                               int base_cells = 24, int dim = 2);

// Random boundary perturbations of e; statistic is the max ratio
// |wp^p(E~) - wp^p(E)| / (max(|E|,|E~|)^(p/n) * |E symdiff E~|).
PropertyReport check_continuity(const GridShape& e, double p, int trials, std::uint64_t seed = 1);

// Two equal balls at separation mult * threshold; statistic is the max
// relative gap |wp^p(union) - 2 wp^p(ball)| over all multipliers >= 1.
// Multipliers below 1 are recorded in the CSV but not asserted.
PropertyReport check_additivity(const std::vector<double>& sep_multipliers, double p,
                                int ball_cells = 97);

// Greedy constructive decomposition: repeatedly picks the center covering the
// most of E among grid points separated by more than 2 r from chosen centers,
// until |E \ union B(x_i, 2r)| < epsilon. Throws BadEpsilon unless
// 0 < epsilon <= |E|.
NucleationReport nucleation_decompose(const GridShape& e, double epsilon, double r_ball);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

// Configuration of the full verification run; defaults are the desk-scale
// settings used by CI.
struct SuiteConfig {
    std::vector<std::string> checks{"scaling", "microdroplet", "continuity", "additivity",
                                    "nucleation"};
    double p = 1.0;
    std::uint64_t seed = 1;
    std::vector<double> scaling_radii{2.5, 3.5, 5.0, 7.0, 10.0, 14.0, 20.0, 25.0};
    int raster_grid = 128;
    std::vector<int> microdroplet_ms{1, 4, 16, 64};
    int microdroplet_base_cells = 24;
    int continuity_trials = 50;
    int continuity_cells = 40;
    std::vector<double> additivity_multipliers{0.1, 1.0, 2.0, 4.0};
    int additivity_ball_cells = 97;
};

// Runs the selected checks and returns their reports in declaration order.
std::vector<PropertyReport> run_verification_suite(const SuiteConfig& config);

}  // namespace shapes
