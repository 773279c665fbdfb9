#include "doctest.h"

#include <sstream>

#include "shapes/energy.hpp"
#include "shapes/gs1.hpp"
#include "shapes/run_io.hpp"
#include "oracles.hpp"

using namespace shapes;

namespace {

EnergyParams params_1d(double lambda, int n_cells, double spacing) {
    EnergyParams params;
    params.lambda = lambda;
    params.p = 1.0;
    params.target_cells = n_cells;
    params.grid = Grid(1, spacing);
    return params;
}

std::string serialize(const OptimizerResult& r) {
    std::ostringstream os;
    os.precision(17);
    os << write_gs1(r.best_shape) << '|' << r.best_report.perimeter << '|' << r.best_report.wp
       << '|' << r.best_report.total << '|' << r.moves_tried << '|' << r.moves_accepted << '|'
       << r.exact_evaluations << '|' << r.surrogate_violations;
    for (const auto& row : r.trace) {
        os << ';' << row.step << ',' << row.temperature << ',' << row.accepted << ',' << row.total
           << ',' << row.exact;
    }
    return os.str();
}

}  // namespace

TEST_CASE("oracle_1d: perimeter dominates as lambda -> 0") {
    const Oracle1DResult r = oracle_1d(1e-9, 1.0, 6);
    CHECK(r.k_star == 1);
}

TEST_CASE("oracle_1d: lambda=16, p=1 gives k*=2 and energy 8") {
    const Oracle1DResult r = oracle_1d(16.0, 1.0, 8);
    CHECK(r.k_star == 2);
    CHECK(r.energy == doctest::Approx(8.0).epsilon(1e-3));
    // Closed form 2k + lambda/(2k): the unit-interval distance is 1/2.
    for (int k = 1; k <= 8; ++k) {
        CHECK(r.energies[k - 1] == doctest::Approx(2.0 * k + 16.0 / (2.0 * k)).epsilon(1e-3));
    }
}

TEST_CASE("energy: exact, deterministic, additive") {
    EnergyParams params;
    params.lambda = 1.0;
    params.p = 2.0;
    params.target_cells = 100;
    params.grid = Grid(2, 0.1);
    const GridShape disk = ansatz({AnsatzKind::ball, 1, 1.0}, params);
    const EnergyReport a = energy(disk, params);
    const EnergyReport b = energy(disk, params);
    CHECK(a.exact);
    CHECK(a.total == a.perimeter + params.lambda * a.wp);
    CHECK(a.perimeter == b.perimeter);
    CHECK(a.wp == b.wp);
    CHECK(a.total == b.total);
    CHECK(disjoint(a.witness_f, disk));
}

TEST_CASE("energy: volume violation") {
    EnergyParams params;
    params.target_cells = 5;
    params.grid = Grid(2, 1.0);
    const GridShape one = GridShape::from_cells(params.grid, {{0, 0, 0}});
    CHECK_THROWS_AS(energy(one, params), VolumeViolation);
}

TEST_CASE("lambda -> 0 ranking equals perimeter ranking") {
    EnergyParams params;
    params.lambda = 1e-12;
    params.p = 1.0;
    params.target_cells = 16;
    params.grid = Grid(2, 1.0);
    const GridShape square = ansatz({AnsatzKind::cylinder, 1, 1.0}, params);
    const GridShape rod = ansatz({AnsatzKind::cylinder, 1, 16.0}, params);
    const EnergyReport es = energy(square, params);
    const EnergyReport er = energy(rod, params);
    CHECK(perimeter(square).value < perimeter(rod).value);
    CHECK(es.total < er.total);
}

TEST_CASE("1D segment-family energies match oracle within O(h)") {
    const int n = 64;
    const double h = 1.0 / n;
    const double lambda = 16.0;
    const Oracle1DResult oracle = oracle_1d(lambda, 1.0, 4);
    for (int k : {1, 2, 4}) {
        EnergyParams params = params_1d(lambda, n, h);
        const GridShape segs = ansatz({AnsatzKind::segments_1d, k, 1.0}, params);
        const EnergyReport rep = energy(segs, params);
        CHECK(std::abs(rep.total - oracle.energies[k - 1]) <= 4.0 * h * lambda);
    }
}

TEST_CASE("ansatz: droplets(1) equals ball") {
    EnergyParams params;
    params.target_cells = 40;
    params.grid = Grid(2, 1.0);
    CHECK(ansatz({AnsatzKind::droplets, 1, 1.0}, params) == ansatz({AnsatzKind::ball, 1, 1.0}, params));
}

TEST_CASE("ansatz: cylinder ratio 1 is the square block") {
    EnergyParams params;
    params.target_cells = 25;
    params.grid = Grid(2, 1.0);
    const GridShape sq = ansatz({AnsatzKind::cylinder, 1, 1.0}, params);
    CHECK(sq.cell_count() == 25);
    CHECK(perimeter(sq).value == 20.0);
}

TEST_CASE("ansatz: droplet volumes are exact and separated") {
    EnergyParams params;
    params.target_cells = 48;
    params.grid = Grid(2, 1.0);
    for (int m : {2, 4, 8}) {
        const GridShape d = ansatz({AnsatzKind::droplets, m, 1.0}, params);
        CHECK(static_cast<int>(d.cell_count()) == 48);
        const auto clusters = proximity_clusters(
            d, 2.0 * params.pad_factor * std::sqrt(48.0 / m));
        CHECK(static_cast<int>(clusters.size()) == m);
    }
    CHECK_THROWS_AS(ansatz({AnsatzKind::droplets, 5, 1.0}, params), Unrepresentable);
}

TEST_CASE("ansatz: segments_1d requires dim 1") {
    EnergyParams params;
    params.target_cells = 8;
    params.grid = Grid(2, 1.0);
    CHECK_THROWS_AS(ansatz({AnsatzKind::segments_1d, 2, 1.0}, params), Unrepresentable);
}

TEST_CASE("anneal: zero steps returns the initial shape with exact energy") {
    EnergyParams params = params_1d(16.0, 32, 1.0 / 32.0);
    const GridShape init = ansatz({AnsatzKind::ball, 1, 1.0}, params);
    const OptimizerResult r = anneal(init, params, {1.0, 0.99, 0}, 42);
    CHECK(r.best_shape == init);
    CHECK(r.best_report.exact);
    const EnergyReport direct = energy(init, params);
    CHECK(r.best_report.total == direct.total);
}

TEST_CASE("anneal: schedule validation") {
    EnergyParams params = params_1d(16.0, 16, 1.0 / 16.0);
    const GridShape init = ansatz({AnsatzKind::ball, 1, 1.0}, params);
    CHECK_THROWS_AS(anneal(init, params, {-1.0, 0.9, 10}, 1), BadSchedule);
    CHECK_THROWS_AS(anneal(init, params, {1.0, 1.5, 10}, 1), BadSchedule);
}

TEST_CASE("anneal: best trace is non-increasing and volume is conserved") {
    EnergyParams params = params_1d(16.0, 32, 1.0 / 32.0);
    params.recompute_every = 10;
    const GridShape init = ansatz({AnsatzKind::ball, 1, 1.0}, params);
    const OptimizerResult r = anneal(init, params, {0.5, 0.995, 400}, 7);

    CHECK(static_cast<int>(r.best_shape.cell_count()) == params.target_cells);
    double best_so_far = std::numeric_limits<double>::infinity();
    double min_exact = std::numeric_limits<double>::infinity();
    for (const auto& row : r.trace) {
        if (!row.exact) continue;
        min_exact = std::min(min_exact, row.total);
        CHECK(std::min(best_so_far, row.total) <= best_so_far);  // non-increasing best
        best_so_far = std::min(best_so_far, row.total);
    }
    CHECK(r.best_report.total == min_exact);
    CHECK(r.best_report.exact);
}

TEST_CASE("anneal: determinism byte-for-byte") {
    EnergyParams params = params_1d(16.0, 32, 1.0 / 32.0);
    const GridShape init = ansatz({AnsatzKind::segments_1d, 2, 1.0}, params);
    const OptimizerResult a = anneal(init, params, {0.5, 0.995, 300}, 2024);
    const OptimizerResult b = anneal(init, params, {0.5, 0.995, 300}, 2024);
    CHECK(serialize(a) == serialize(b));
    const OptimizerResult c = anneal(init, params, {0.5, 0.995, 300}, 2025);
    CHECK(serialize(a) != serialize(c));
}

TEST_CASE("anneal: 1D lambda=16 reaches the oracle optimum within 5%") {
    const int n = 128;
    EnergyParams params = params_1d(16.0, n, 1.0 / n);
    params.recompute_every = 25;
    const Oracle1DResult oracle = oracle_1d(16.0, 1.0, 8);

    double best = std::numeric_limits<double>::infinity();
    for (const AnsatzSpec spec :
         {AnsatzSpec{AnsatzKind::ball, 1, 1.0}, AnsatzSpec{AnsatzKind::segments_1d, 2, 1.0}}) {
        const GridShape init = ansatz(spec, params);
        const OptimizerResult r = anneal(init, params, {0.4, 0.995, 600}, 11);
        best = std::min(best, r.best_report.total);
    }
    CHECK(best <= 1.05 * oracle.energy);
}

TEST_CASE("droplet energies order by count: wp falls, perimeter rises") {
    EnergyParams params;
    params.lambda = 1.0;
    params.p = 1.0;
    params.target_cells = 64;
    params.grid = Grid(2, 1.0);
    double prev_wp = std::numeric_limits<double>::infinity();
    double prev_per = 0.0;
    for (int m : {1, 2, 4, 8, 16}) {
        const GridShape d = ansatz({AnsatzKind::droplets, m, 1.0}, params);
        const double wp = additive_split_solve(d, 1.0).wp;
        const double per = perimeter(d).value;
        CHECK(wp < prev_wp);
        CHECK(per >= prev_per);
        prev_wp = wp;
        prev_per = per;
    }
}

TEST_CASE("surrogate bookkeeping stays sound") {
    EnergyParams params = params_1d(8.0, 24, 1.0 / 24.0);
    params.recompute_every = 5;
    const GridShape init = ansatz({AnsatzKind::ball, 1, 1.0}, params);
    const OptimizerResult r = anneal(init, params, {0.5, 0.99, 200}, 3);
    CHECK(r.fitted_continuity_constant > 0.0);
    CHECK(r.exact_evaluations >= r.moves_accepted / params.recompute_every);
}
