// Acceptance suite: runs every gate criterion at its pinned tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <vector>

#include "shapes/energy.hpp"
#include "shapes/free_target.hpp"
#include "shapes/gs1.hpp"
#include "shapes/perimeter.hpp"
#include "shapes/rng.hpp"
#include "shapes/transport.hpp"
#include "shapes/verify.hpp"
#include "oracles.hpp"

using namespace shapes;

namespace {

struct Criterion {
    const char* name;
    std::function<bool(std::string&)> run;
};

GridShape make_ball(int dim, int cells, double spacing = 1.0) {
    EnergyParams params;
    params.grid = Grid(dim, spacing);
    params.target_cells = cells;
    return ansatz({AnsatzKind::ball, 1, 1.0}, params);
}

GridShape make_segment(int cells, double spacing) {
    std::vector<CellIndex> v;
    for (int i = 0; i < cells; ++i) v.push_back({i, 0, 0});
    return GridShape::from_cells(Grid(1, spacing), std::move(v));
}

// 1. solve_ot equals the permutation oracle on 200 random instances.
bool c1_ot_oracle(std::string& detail) {
    SplitMix64 rng(20250801);
    int failures = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_below(8));
        const int dim = 1 + static_cast<int>(rng.next_below(3));
        const double p = trial % 3 == 0 ? 1.0 : (trial % 3 == 1 ? 2.0 : 1.5);
        const auto mu = testing::random_unit_measure(rng, dim, n);
        const auto nu = testing::random_unit_measure(rng, dim, n);
        const double solver = solve_ot(mu, nu, p).cost_p;
        const double oracle = brute_force_ot(mu, nu, p);
        const double rel = std::abs(solver - oracle) / std::max(1e-30, oracle);
        worst = std::max(worst, oracle == 0.0 ? std::abs(solver) : rel);
        if (std::abs(solver - oracle) > 1e-9 * std::max(1.0, oracle)) ++failures;
    }
    std::ostringstream os;
    os << "200 instances, worst rel gap " << worst;
    detail = os.str();
    return failures == 0;
}

// 2. Exact scaling law at 1e-10, rasterized-ball slope within 2%.
bool c2_scaling(std::string& detail) {
    bool ok = true;
    double worst = 0.0;
    for (int n : {1, 2}) {
        for (double p : {1.0, 2.0}) {
            const GridShape base = make_ball(n, n == 1 ? 12 : 57);
            const double w_base = solve_free_target(base, p).wp;
            for (double r : {2.0, 4.0, 8.0}) {
                const double w_scaled = solve_free_target(rescale_spacing(base, r), p).wp;
                const double expected = std::pow(r, 1.0 + n / p) * w_base;
                const double rel = std::abs(w_scaled - expected) / expected;
                worst = std::max(worst, rel);
                ok = ok && rel <= 1e-10;
            }
        }
    }
    const auto reports = check_scaling(2.0, 2, {2.5, 3.5, 5.0, 7.0, 10.0, 14.0, 20.0, 25.0}, 128);
    const double slope = reports[1].statistic;
    ok = ok && reports[1].pass;
    std::ostringstream os;
    os << "worst exact rel err " << worst << ", raster slope " << slope << " (target 2 +/- 0.04)";
    detail = os.str();
    return ok;
}

// 3. Exhaustive free-target enumeration on small instances.
bool c3_small_exhaustive(std::string& detail) {
    SplitMix64 rng(3);
    int checked = 0;
    double worst = 0.0;
    const Grid g(2, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_below(4));
        const GridShape e = testing::random_blob(rng, g, n);
        const Region win = bounding_window(e, 2);
        if (win.cell_count() > 25) continue;
        const double p = trial % 2 == 0 ? 1.0 : 2.0;
        const double oracle = testing::enumerate_free_target(e, win, p);
        const double solver = solve_free_target(e, p).wp_pow_p;
        worst = std::max(worst, std::abs(solver - oracle) / std::max(1.0, oracle));
        ++checked;
        if (std::abs(solver - oracle) > 1e-12 * std::max(1.0, oracle)) {
            std::ostringstream os;
            os << "mismatch at trial " << trial << ": solver " << solver << " vs oracle " << oracle;
            detail = os.str();
            return false;
        }
    }
    std::ostringstream os;
    os << checked << " exhaustive instances, worst rel gap " << worst;
    detail = os.str();
    return checked >= 30;
}

// 4. 1D continuum anchor: wp of the unit interval at h = 1/256.
bool c4_interval_anchor(std::string& detail) {
    const double h = 1.0 / 256.0;
    const double wp = solve_free_target(make_segment(256, h), 1.0).wp;
    std::ostringstream os;
    os << "wp = " << wp << " (target 0.5 +/- " << 3.0 * h << ")";
    detail = os.str();
    return std::abs(wp - 0.5) <= 3.0 * h;
}

// 5. Microdroplet slopes at fixed total volume.
bool c5_microdroplet(std::string& detail) {
    const auto reports = check_microdroplet({1, 4, 16, 64}, 1.0, 24, 2);
    const double s_wp = reports[0].statistic;
    const double s_per = reports[1].statistic;
    std::ostringstream os;
    os << "wp slope " << s_wp << " (-0.5 +/- 0.025), perimeter slope " << s_per
       << " (+0.5 +/- 0.025)";
    detail = os.str();
    return std::abs(s_wp + 0.5) <= 0.025 && std::abs(s_per - 0.5) <= 0.025;
}

// 6. Additivity of wp^p over separated balls.
bool c6_additivity(std::string& detail) {
    const PropertyReport rep = check_additivity({1.0, 2.0, 4.0}, 1.0, 97);
    std::ostringstream os;
    os << "max rel gap " << rep.statistic << " (<= 1e-9)";
    detail = os.str();
    return rep.pass;
}

// 7. Continuity constant stable within a factor 2 across shapes and spacings.
bool c7_continuity(std::string& detail) {
    EnergyParams params;
    params.grid = Grid(2, 1.0);
    params.target_cells = 40;
    const GridShape disk = ansatz({AnsatzKind::ball, 1, 1.0}, params);
    params.target_cells = 36;
    const GridShape square = ansatz({AnsatzKind::cylinder, 1, 1.0}, params);
    params.target_cells = 40;
    const GridShape droplets = ansatz({AnsatzKind::droplets, 2, 1.0}, params);

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    int idx = 0;
    for (const GridShape* base : {&disk, &square, &droplets}) {
        for (int level = 0; level < 2; ++level) {
            const GridShape shape = level == 0 ? *base : refine(*base, 2);
            const PropertyReport rep = check_continuity(shape, 1.0, 50, 1000 + idx);
            lo = std::min(lo, rep.statistic);
            hi = std::max(hi, rep.statistic);
            ++idx;
        }
    }
    std::ostringstream os;
    os << "ratio constants in [" << lo << ", " << hi << "], spread " << hi / lo << " (< 2)";
    detail = os.str();
    return hi / lo < 2.0;
}

// 8. Cube-partition upper bound: dominates exact everywhere; fitted constant
//    volume-stable within 10% over two decades.
bool c8_upper_bound(std::string& detail) {
    SplitMix64 rng(8);
    const Grid g(2, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_below(40));
        const GridShape e = testing::random_blob(rng, g, n);
        const double p = trial % 2 == 0 ? 1.0 : 2.0;
        if (cube_partition_upper_bound(e, p).cost_p < solve_free_target(e, p).wp_pow_p - 1e-12) {
            detail = "upper bound fell below the exact value";
            return false;
        }
    }
    // Volume stability of C = wp / |E|^{1/p + 1/n} on balls over two decades.
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int n : {16, 40, 100, 250, 640, 1600}) {
        const GridShape ball = make_ball(2, n);
        const double wp = solve_free_target(ball, 1.0).wp;
        const double c = wp / std::pow(static_cast<double>(n), 1.0 + 0.5);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    std::ostringstream os;
    os << "100 domination checks ok; ball constants in [" << lo << ", " << hi << "], spread "
       << hi / lo << " (<= 1.10)";
    detail = os.str();
    return hi / lo <= 1.10;
}

// 9. Optimizer sanity in 1D against the segment-family oracle.
bool c9_optimizer(std::string& detail) {
    const int n = 128;
    EnergyParams params;
    params.lambda = 16.0;
    params.p = 1.0;
    params.target_cells = n;
    params.grid = Grid(1, 1.0 / n);
    params.recompute_every = 25;
    const Oracle1DResult oracle = oracle_1d(16.0, 1.0, 8);
    const AnnealSchedule schedule{0.4, 0.995, 800};

    double best = std::numeric_limits<double>::infinity();
    for (const AnsatzSpec spec :
         {AnsatzSpec{AnsatzKind::ball, 1, 1.0}, AnsatzSpec{AnsatzKind::cylinder, 1, 4.0},
          AnsatzSpec{AnsatzKind::segments_1d, 2, 1.0}, AnsatzSpec{AnsatzKind::segments_1d, 4, 1.0}}) {
        const OptimizerResult r = anneal(ansatz(spec, params), params, schedule, 17);
        // Non-increasing exact best along the trace.
        double prev = std::numeric_limits<double>::infinity();
        double run_best = prev;
        for (const auto& row : r.trace) {
            if (!row.exact) continue;
            run_best = std::min(run_best, row.total);
        }
        if (r.best_report.total != run_best) {
            detail = "best_report.total is not the minimum exact evaluation";
            return false;
        }
        (void)prev;
        best = std::min(best, r.best_report.total);
    }

    // Determinism, byte for byte.
    const GridShape init = ansatz({AnsatzKind::segments_1d, 2, 1.0}, params);
    const OptimizerResult a = anneal(init, params, schedule, 99);
    const OptimizerResult b = anneal(init, params, schedule, 99);
    const bool deterministic = write_gs1(a.best_shape) == write_gs1(b.best_shape) &&
                               a.best_report.total == b.best_report.total &&
                               a.trace.size() == b.trace.size();

    std::ostringstream os;
    os << "best energy " << best << " (oracle " << oracle.energy << ", cap "
       << 1.05 * oracle.energy << "), deterministic " << (deterministic ? "yes" : "no");
    detail = os.str();
    return deterministic && best <= 1.05 * oracle.energy;
}

// 10. Nucleation diagnostic on the two-far-balls corpus.
bool c10_nucleation(std::string& detail) {
    const Grid g(2, 1.0);
    const GridShape ball30 = make_ball(2, 30);
    std::vector<CellIndex> two(ball30.cells().begin(), ball30.cells().end());
    for (const auto& c : ball30.cells()) two.push_back({c[0] + 100, c[1], c[2]});
    const GridShape two_balls = GridShape::from_cells(g, std::move(two));

    const double r = 4.0;
    const double eps = 1.0;
    const NucleationReport rep = nucleation_decompose(two_balls, eps, r);
    bool ok = rep.count_i == 2 && rep.leftover_volume < eps;
    for (std::size_t i = 0; ok && i < rep.points.size(); ++i) {
        for (std::size_t j = i + 1; j < rep.points.size(); ++j) {
            const double d2 = detail::point_dist2(rep.points[i], rep.points[j], 2);
            ok = ok && d2 > 4.0 * r * r;
        }
    }

    // Single fitted c across a corpus: count bound I < |E| (P / (c eps))^n.
    std::vector<std::pair<GridShape, double>> corpus;
    corpus.emplace_back(two_balls, eps);
    corpus.emplace_back(make_ball(2, 50), 1.0);
    corpus.emplace_back(make_ball(2, 120), 2.0);
    double c_fit = std::numeric_limits<double>::infinity();
    std::vector<NucleationReport> reps;
    for (const auto& [shape, e] : corpus) {
        reps.push_back(nucleation_decompose(shape, e, r));
        c_fit = std::min(c_fit, 0.99 * (perimeter(shape).value / e) *
                                    std::sqrt(volume(shape) / reps.back().count_i));
    }
    ok = ok && c_fit > 0.0;
    for (std::size_t i = 0; ok && i < corpus.size(); ++i) {
        const auto& [shape, e] = corpus[i];
        ok = ok && reps[i].count_i <
                       volume(shape) * std::pow(perimeter(shape).value / (c_fit * e), 2.0);
    }

    std::ostringstream os;
    os << "I = " << rep.count_i << ", leftover " << rep.leftover_volume << ", fitted c " << c_fit;
    detail = os.str();
    return ok;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"01-ot-oracle-equivalence", c1_ot_oracle},
        {"02-exact-scaling-law", c2_scaling},
        {"03-free-target-small-exhaustive", c3_small_exhaustive},
        {"04-1d-continuum-anchor", c4_interval_anchor},
        {"05-microdroplet-instability", c5_microdroplet},
        {"06-additivity", c6_additivity},
        {"07-continuity-constant-stability", c7_continuity},
        {"08-upper-bound-construction", c8_upper_bound},
        {"09-optimizer-sanity", c9_optimizer},
        {"10-nucleation-diagnostic", c10_nucleation},
    };

    int failures = 0;
    const auto suite_start = std::chrono::steady_clock::now();
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = false;
        try {
            pass = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %-34s %6.1fs  %s\n", pass ? "PASS" : "FAIL", criterion.name, secs,
                    detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start).count();
    std::printf("%d/%zu criteria passed in %.1fs\n", static_cast<int>(criteria.size()) - failures,
                criteria.size(), total);
    return failures == 0 ? 0 : 1;
}
