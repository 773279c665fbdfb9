// Test-only independent oracles. These deliberately avoid the solver code
// paths they are used to check: everything here is plain enumeration.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_set>
#include <vector>

#include "shapes/grid.hpp"
#include "shapes/rng.hpp"
#include "shapes/transport.hpp"

namespace shapes::testing {

inline double pair_cost(const Point& a, const Point& b, int dim, double p) {
    double d2 = 0.0;
    for (int d = 0; d < dim; ++d) d2 += (a[d] - b[d]) * (a[d] - b[d]);
    return std::pow(std::sqrt(d2), p);
}

// Minimum assignment cost of `points` onto an equal-size subset of sinks,
// all unit masses, by exhaustive enumeration over subsets and permutations.
inline double enumerate_capacitated_optimum(const std::vector<Point>& sources,
                                            const std::vector<Point>& sinks, int dim, double p,
                                            double mass) {
    const std::size_t m = sources.size();
    const std::size_t k = sinks.size();
    std::vector<int> pick(m);
    std::iota(pick.begin(), pick.end(), 0);
    double best = std::numeric_limits<double>::infinity();

    // Subsets of size m via the standard odometer.
    std::vector<int> subset(m);
    std::iota(subset.begin(), subset.end(), 0);
    while (true) {
        std::vector<int> perm = subset;
        std::sort(perm.begin(), perm.end());
        do {
            double cost = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                cost += mass * pair_cost(sources[i], sinks[perm[i]], dim, p);
            }
            best = std::min(best, cost);
        } while (std::next_permutation(perm.begin(), perm.end()));

        // next subset
        int i = static_cast<int>(m) - 1;
        while (i >= 0 && subset[i] == static_cast<int>(k - m + i)) --i;
        if (i < 0) break;
        ++subset[i];
        for (std::size_t j = i + 1; j < m; ++j) subset[j] = subset[j - 1] + 1;
    }
    return best;
}

// Exhaustive free-target optimum for a small shape: enumerates all
// equal-cardinality disjoint sink subsets inside the window.
inline double enumerate_free_target(const GridShape& e, const Region& window, double p) {
    std::vector<Point> sources;
    for (const auto& c : e.cells()) sources.push_back(e.grid().cell_center(c));
    std::vector<Point> sinks;
    CellIndex c = window.lo;
    while (true) {
        if (!e.contains(c)) sinks.push_back(e.grid().cell_center(c));
        int d = 0;
        for (; d < e.grid().dim; ++d) {
            if (++c[d] < window.hi[d]) break;
            c[d] = window.lo[d];
        }
        if (d == e.grid().dim) break;
    }
    return enumerate_capacitated_optimum(sources, sinks, e.grid().dim, p,
                                         e.grid().cell_volume());
}

inline DiscreteMeasure random_unit_measure(SplitMix64& rng, int dim, int n, double box = 10.0) {
    DiscreteMeasure mu;
    mu.dim = dim;
    for (int i = 0; i < n; ++i) {
        Point pt{0.0, 0.0, 0.0};
        for (int d = 0; d < dim; ++d) pt[d] = rng.next_double() * box;
        mu.points.push_back(pt);
        mu.masses.push_back(1.0);
    }
    return mu;
}

// Random connected blob grown cell by cell from the origin.
inline GridShape random_blob(SplitMix64& rng, const Grid& g, int n_cells) {
    std::vector<CellIndex> cells{{0, 0, 0}};
    std::unordered_set<CellIndex, CellIndexHash> seen{{0, 0, 0}};
    const int nn = detail::neighbor_count(g.dim);
    while (static_cast<int>(cells.size()) < n_cells) {
        const auto& base = cells[rng.next_below(cells.size())];
        const CellIndex cand = detail::neighbor(base, static_cast<int>(rng.next_below(nn)));
        if (seen.insert(cand).second) cells.push_back(cand);
    }
    return GridShape::from_cells(g, std::move(cells));
}

// All fixed polyominoes with n cells (translation-normalized), by growth from
// a canonical seed set. Standard enumeration, small n only.
inline std::vector<std::vector<CellIndex>> fixed_polyominoes(int n) {
    std::vector<std::vector<CellIndex>> current{{CellIndex{0, 0, 0}}};
    auto normalize = [](std::vector<CellIndex> cells) {
        int mx = cells[0][0], my = cells[0][1];
        for (const auto& c : cells) {
            mx = std::min(mx, c[0]);
            my = std::min(my, c[1]);
        }
        for (auto& c : cells) {
            c[0] -= mx;
            c[1] -= my;
        }
        std::sort(cells.begin(), cells.end());
        return cells;
    };
    for (int size = 2; size <= n; ++size) {
        std::set<std::vector<CellIndex>> next;
        for (const auto& poly : current) {
            for (const auto& c : poly) {
                for (int w = 0; w < 4; ++w) {
                    const CellIndex cand = detail::neighbor(c, w);
                    if (std::find(poly.begin(), poly.end(), cand) != poly.end()) continue;
                    std::vector<CellIndex> grown = poly;
                    grown.push_back(cand);
                    next.insert(normalize(std::move(grown)));
                }
            }
        }
        current.assign(next.begin(), next.end());
    }
    return current;
}

}  // namespace shapes::testing
