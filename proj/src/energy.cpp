#include "shapes/energy.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "shapes/rng.hpp"

namespace shapes {

namespace {

double root_p(double cost, double p) {
    if (p == 1.0) return cost;
    if (p == 2.0) return std::sqrt(cost);
    return std::pow(cost, 1.0 / p);
}

void validate_params(const EnergyParams& params) {
    if (!(params.lambda > 0.0)) throw BadInput("lambda must be positive");
    if (!(params.p >= 1.0)) throw BadInput("p must be >= 1");
    if (params.target_cells < 1) throw BadInput("target_cells must be >= 1");
    if (params.recompute_every < 1) throw BadInput("recompute_every must be >= 1");
}

}  // namespace

EnergyReport energy(const GridShape& e, const EnergyParams& params) {
    validate_params(params);
    if (static_cast<int>(e.cell_count()) != params.target_cells) {
        throw VolumeViolation("shape has " + std::to_string(e.cell_count()) + " cells, expected " +
                              std::to_string(params.target_cells));
    }
    FreeTargetResult ft = solve_free_target(e, params.p, params.pad_factor);
    EnergyReport report;
    report.perimeter = perimeter(e).value;
    report.wp = ft.wp;
    report.total = report.perimeter + params.lambda * report.wp;
    report.witness_f = std::move(ft.witness);
    report.exact = true;
    return report;
}

namespace {

// Mutable working copy of the shape with O(1) membership, sampling, and
// incremental face counting.
class WorkingShape {
public:
    explicit WorkingShape(const GridShape& s) : grid_(s.grid()) {
        cells_.assign(s.cells().begin(), s.cells().end());
        pos_.reserve(cells_.size() * 2);
        for (std::size_t i = 0; i < cells_.size(); ++i) pos_[cells_[i]] = static_cast<int>(i);
        faces_ = boundary_face_count(s);
    }

    const Grid& grid() const { return grid_; }
    int size() const { return static_cast<int>(cells_.size()); }
    bool contains(const CellIndex& c) const { return pos_.count(c) != 0; }
    const CellIndex& cell(int i) const { return cells_[i]; }
    std::int64_t faces() const { return faces_; }

    int occupied_neighbors(const CellIndex& c, const CellIndex* excluded = nullptr) const {
        const int nn = detail::neighbor_count(grid_.dim);
        int occ = 0;
        for (int w = 0; w < nn; ++w) {
            const CellIndex n = detail::neighbor(c, w);
            if (excluded && n == *excluded) continue;
            if (contains(n)) ++occ;
        }
        return occ;
    }

    std::int64_t face_delta(const CellIndex& remove, const CellIndex& add) const {
        return 2ll * (occupied_neighbors(remove) - occupied_neighbors(add, &remove));
    }

    void apply_swap(const CellIndex& remove, const CellIndex& add, std::int64_t face_delta_value) {
        const auto it = pos_.find(remove);
        const int idx = it->second;
        pos_.erase(it);
        cells_[idx] = cells_.back();
        pos_[cells_[idx]] = idx;
        cells_.pop_back();
        pos_[add] = static_cast<int>(cells_.size());
        cells_.push_back(add);
        faces_ += face_delta_value;
    }

    GridShape snapshot() const {
        return GridShape::from_cells(grid_, std::vector<CellIndex>(cells_.begin(), cells_.end()));
    }

private:
    Grid grid_;
    std::vector<CellIndex> cells_;
    std::unordered_map<CellIndex, int, CellIndexHash> pos_;
    std::int64_t faces_ = 0;
};

}  // namespace

OptimizerResult anneal(const GridShape& init, const EnergyParams& params,
                       const AnnealSchedule& schedule, std::uint64_t seed) {
    validate_params(params);
    if (!(init.grid() == params.grid)) throw GridMismatch("initial shape is not on the params grid");
    if (static_cast<int>(init.cell_count()) != params.target_cells) {
        throw VolumeViolation("initial shape violates the volume constraint");
    }
    if (!(schedule.t0 > 0.0)) throw BadSchedule("t0 must be positive");
    if (!(schedule.alpha > 0.0 && schedule.alpha < 1.0)) throw BadSchedule("alpha must be in (0,1)");
    if (schedule.steps < 0) throw BadSchedule("steps must be >= 0");

    SplitMix64 rng(seed);
    const Grid& g = params.grid;
    const int dim = g.dim;
    const int nn = detail::neighbor_count(dim);
    const double face_area = g.face_area();
    const double cell_vol = g.cell_volume();
    const double volume = params.target_cells * cell_vol;
    // max{|E|,|E~|}^(p/n) factor of the continuity bound; the volume never
    // changes, so it is a constant here.
    const double volume_pow = std::pow(volume, params.p / dim);

    OptimizerResult result;
    result.seed = seed;
    result.fitted_continuity_constant = 4.0;

    WorkingShape state(init);

    // Anchor = shape of the last exact solve; the surrogate bounds wp^p within
    // fitted_C * volume_pow * |current (symdiff) anchor|.
    std::unordered_set<CellIndex, CellIndexHash> anchor(init.cells().begin(), init.cells().end());
    std::int64_t symdiff_cells = 0;
    double anchor_wp_pow_p = 0.0;

    EnergyReport best;
    bool has_best = false;
    auto exact_resolve = [&](std::int64_t step) {
        const GridShape current = state.snapshot();
        FreeTargetResult ft = solve_free_target(current, params.p, params.pad_factor);
        ++result.exact_evaluations;
        const double drift = std::abs(ft.wp_pow_p - anchor_wp_pow_p);
        const double sym_vol = static_cast<double>(symdiff_cells) * cell_vol;
        if (sym_vol > 0.0) {
            const double ratio = drift / (volume_pow * sym_vol);
            if (ratio > result.fitted_continuity_constant) {
                ++result.surrogate_violations;
                result.fitted_continuity_constant = ratio;
            }
        }
        anchor.clear();
        anchor.insert(current.cells().begin(), current.cells().end());
        symdiff_cells = 0;
        anchor_wp_pow_p = ft.wp_pow_p;

        const double perim = static_cast<double>(state.faces()) * face_area;
        const double total = perim + params.lambda * ft.wp;
        if (!has_best || total < best.total) {
            has_best = true;
            best.perimeter = perim;
            best.wp = ft.wp;
            best.total = total;
            best.witness_f = std::move(ft.witness);
            best.exact = true;
            result.best_shape = current;
        }
        result.trace.push_back({step, 0.0, false, total, true});
        return total;
    };

    exact_resolve(0);

    auto surrogate_wp = [&](std::int64_t sym_cells) {
        const double margin = result.fitted_continuity_constant * volume_pow *
                              static_cast<double>(sym_cells) * cell_vol;
        return root_p(anchor_wp_pow_p + margin, params.p);
    };
    auto optimistic_wp = [&](std::int64_t sym_cells) {
        const double margin = result.fitted_continuity_constant * volume_pow *
                              static_cast<double>(sym_cells) * cell_vol;
        return root_p(std::max(0.0, anchor_wp_pow_p - margin), params.p);
    };

    double temperature = schedule.t0;
    std::int64_t accepted_since_resolve = 0;
    for (std::int64_t step = 1; step <= schedule.steps; ++step) {
        ++result.moves_tried;

        // Boundary cell to remove.
        CellIndex remove{0, 0, 0};
        bool found = false;
        for (int tries = 0; tries < 64 && !found; ++tries) {
            const auto& c = state.cell(static_cast<int>(rng.next_below(state.size())));
            if (state.occupied_neighbors(c) < nn) {
                remove = c;
                found = true;
            }
        }
        if (!found) {
            for (int i = 0; i < state.size() && !found; ++i) {
                if (state.occupied_neighbors(state.cell(i)) < nn) {
                    remove = state.cell(i);
                    found = true;
                }
            }
        }
        // Exterior boundary cell to add.
        CellIndex add{0, 0, 0};
        bool found_add = false;
        for (int tries = 0; tries < 64 && !found_add; ++tries) {
            const auto& c = state.cell(static_cast<int>(rng.next_below(state.size())));
            const CellIndex cand = detail::neighbor(c, static_cast<int>(rng.next_below(nn)));
            if (!state.contains(cand)) {
                add = cand;
                found_add = true;
            }
        }
        if (!found || !found_add) {
            temperature *= schedule.alpha;
            result.trace.push_back({step, temperature, false,
                                    static_cast<double>(state.faces()) * face_area +
                                        params.lambda * surrogate_wp(symdiff_cells),
                                    false});
            continue;
        }

        const std::int64_t dfaces = state.face_delta(remove, add);
        const std::int64_t dsym = (anchor.count(remove) ? 1 : -1) + (anchor.count(add) ? -1 : 1);

        const double perim = static_cast<double>(state.faces()) * face_area;
        const double cur_total = perim + params.lambda * surrogate_wp(symdiff_cells);
        const double new_total = perim + static_cast<double>(dfaces) * face_area +
                                 params.lambda * surrogate_wp(symdiff_cells + dsym);
        const double delta = new_total - cur_total;

        const bool accept = delta < 0.0 || rng.next_double() < std::exp(-delta / temperature);
        if (accept) {
            state.apply_swap(remove, add, dfaces);
            symdiff_cells += dsym;
            ++result.moves_accepted;
            ++accepted_since_resolve;
        }
        result.trace.push_back({step, temperature, accept, accept ? new_total : cur_total, false});

        if (accept) {
            const double optimistic_total =
                static_cast<double>(state.faces()) * face_area +
                params.lambda * optimistic_wp(symdiff_cells);
            if (accepted_since_resolve >= params.recompute_every ||
                (has_best && optimistic_total < best.total)) {
                exact_resolve(step);
                accepted_since_resolve = 0;
            }
        }
        temperature *= schedule.alpha;
    }

    if (symdiff_cells != 0) exact_resolve(schedule.steps);
    result.best_report = std::move(best);
    return result;
}

namespace {

// Exactly n cells minimizing squared center distance to the cell block around
// the anchor, ties broken lexicographically. This is the rasterized ball.
std::vector<CellIndex> rasterized_ball_cells(int dim, int n_cells, const CellIndex& center) {
    const double unit_ball_vol = dim == 1 ? 2.0 : (dim == 2 ? 3.141592653589793 : 4.18879020478639);
    const int radius =
        static_cast<int>(std::ceil(std::pow(n_cells / unit_ball_vol * std::pow(2.0, dim), 1.0 / dim))) + 2;
    std::vector<std::pair<std::int64_t, CellIndex>> ranked;
    CellIndex lo{0, 0, 0};
    CellIndex hi{0, 0, 0};
    for (int d = 0; d < dim; ++d) {
        lo[d] = -radius;
        hi[d] = radius;
    }
    CellIndex c = lo;
    while (true) {
        std::int64_t d2 = 0;
        for (int d = 0; d < dim; ++d) d2 += static_cast<std::int64_t>(c[d]) * c[d];
        ranked.emplace_back(d2, c);
        int d = 0;
        for (; d < dim; ++d) {
            if (++c[d] <= hi[d]) break;
            c[d] = lo[d];
        }
        if (d == dim) break;
    }
    if (static_cast<int>(ranked.size()) < n_cells) throw Unrepresentable("ball candidate box too small");
    std::sort(ranked.begin(), ranked.end());
    std::vector<CellIndex> out;
    out.reserve(n_cells);
    for (int i = 0; i < n_cells; ++i) {
        CellIndex cc = ranked[i].second;
        for (int d = 0; d < dim; ++d) cc[d] += center[d];
        out.push_back(cc);
    }
    return out;
}

int ball_extent_cells(const std::vector<CellIndex>& cells) {
    int ext = 0;
    for (const auto& c : cells) {
        for (int v : c) ext = std::max(ext, std::abs(v));
    }
    return ext;
}

}  // namespace

GridShape ansatz(const AnsatzSpec& spec, const EnergyParams& params) {
    validate_params(params);
    const Grid& g = params.grid;
    const int dim = g.dim;
    const int n = params.target_cells;

    switch (spec.kind) {
        case AnsatzKind::ball: {
            return GridShape::from_cells(g, rasterized_ball_cells(dim, n, {0, 0, 0}));
        }
        case AnsatzKind::cylinder: {
            if (!(spec.aspect_ratio > 0.0)) throw BadInput("cylinder aspect ratio must be positive");
            std::vector<CellIndex> cells;
            cells.reserve(n);
            if (dim == 1) {
                for (int i = 0; i < n; ++i) cells.push_back({i, 0, 0});
            } else if (dim == 2) {
                const int w = std::clamp(
                    static_cast<int>(std::lround(std::sqrt(n / spec.aspect_ratio))), 1, n);
                for (int i = 0; i < n; ++i) cells.push_back({i / w, i % w, 0});
            } else {
                const int w = std::clamp(
                    static_cast<int>(std::lround(std::cbrt(n / spec.aspect_ratio))), 1, n);
                for (int i = 0; i < n; ++i) cells.push_back({i / (w * w), (i / w) % w, i % w});
            }
            return GridShape::from_cells(g, std::move(cells));
        }
        case AnsatzKind::droplets: {
            if (spec.count < 1) throw BadInput("droplet count must be >= 1");
            if (n % spec.count != 0) {
                throw Unrepresentable("target_cells must be divisible by the droplet count");
            }
            const int per = n / spec.count;
            const auto base = rasterized_ball_cells(dim, per, {0, 0, 0});
            const int extent = ball_extent_cells(base);
            const int threshold_cells = static_cast<int>(
                std::ceil(2.0 * params.pad_factor * std::pow(static_cast<double>(per), 1.0 / dim)));
            const int pitch = threshold_cells + 2 * extent + 2;
            const int cols = dim == 1 ? spec.count
                                      : static_cast<int>(std::ceil(
                                            std::pow(static_cast<double>(spec.count), 1.0 / dim)));
            std::vector<CellIndex> cells;
            cells.reserve(n);
            for (int i = 0; i < spec.count; ++i) {
                CellIndex offset{0, 0, 0};
                if (dim == 1) {
                    offset[0] = i * pitch;
                } else if (dim == 2) {
                    offset[0] = (i % cols) * pitch;
                    offset[1] = (i / cols) * pitch;
                } else {
                    offset[0] = (i % cols) * pitch;
                    offset[1] = ((i / cols) % cols) * pitch;
                    offset[2] = (i / (cols * cols)) * pitch;
                }
                for (const auto& b : base) {
                    cells.push_back({b[0] + offset[0], b[1] + offset[1], b[2] + offset[2]});
                }
            }
            return GridShape::from_cells(g, std::move(cells));
        }
        case AnsatzKind::segments_1d: {
            if (dim != 1) throw Unrepresentable("segments_1d requires a 1-dimensional grid");
            if (spec.count < 1) throw BadInput("segment count must be >= 1");
            if (n % spec.count != 0) {
                throw Unrepresentable("target_cells must be divisible by the segment count");
            }
            const int per = n / spec.count;
            const int gap = static_cast<int>(std::ceil(2.0 * params.pad_factor * per)) + 1;
            std::vector<CellIndex> cells;
            cells.reserve(n);
            for (int s = 0; s < spec.count; ++s) {
                const int start = s * (per + gap);
                for (int i = 0; i < per; ++i) cells.push_back({start + i, 0, 0});
            }
            return GridShape::from_cells(g, std::move(cells));
        }
    }
    throw BadInput("unknown ansatz kind");
}

AnsatzKind ansatz_kind_from_string(const std::string& name) {
    if (name == "ball") return AnsatzKind::ball;
    if (name == "cylinder") return AnsatzKind::cylinder;
    if (name == "droplets") return AnsatzKind::droplets;
    if (name == "segments_1d") return AnsatzKind::segments_1d;
    throw BadInput("unknown ansatz kind: " + name);
}

std::string to_string(AnsatzKind kind) {
    switch (kind) {
        case AnsatzKind::ball: return "ball";
        case AnsatzKind::cylinder: return "cylinder";
        case AnsatzKind::droplets: return "droplets";
        case AnsatzKind::segments_1d: return "segments_1d";
    }
    return "?";
}

Oracle1DResult oracle_1d(double lambda, double p, int kmax) {
    if (!(p >= 1.0)) throw BadInput("p must be >= 1");
    if (kmax < 1) throw BadInput("kmax must be >= 1");
    if (!(lambda >= 0.0)) throw BadInput("lambda must be nonnegative");

    // Free-target distance of the unit segment, measured once on a fine grid.
    constexpr int kFineCells = 256;
    Grid fine(1, 1.0 / kFineCells);
    std::vector<CellIndex> cells;
    cells.reserve(kFineCells);
    for (int i = 0; i < kFineCells; ++i) cells.push_back({i, 0, 0});
    const double w1 = solve_free_target(GridShape::from_cells(fine, std::move(cells)), p).wp;

    Oracle1DResult out;
    out.energies.reserve(kmax);
    for (int k = 1; k <= kmax; ++k) {
        const double e = 2.0 * k + lambda * w1 / k;
        out.energies.push_back(e);
        if (k == 1 || e < out.energy) {
            out.energy = e;
            out.k_star = k;
        }
    }
    return out;
}

}  // namespace shapes
