#include "shapes/free_target.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace shapes {

namespace {

// Pruning pays for itself only on instances too dense to enumerate arcs.
constexpr std::size_t kPruneArcThreshold = 50000;

struct WindowIndexer {
    Region win;
    int size[3] = {1, 1, 1};

    explicit WindowIndexer(const Region& w) : win(w) {
        for (int d = 0; d < w.grid.dim; ++d) size[d] = w.hi[d] - w.lo[d];
    }

    std::int64_t flat(const CellIndex& c) const {
        std::int64_t idx = 0;
        for (int d = win.grid.dim - 1; d >= 0; --d) idx = idx * size[d] + (c[d] - win.lo[d]);
        return idx;
    }

    std::int64_t count() const {
        std::int64_t n = 1;
        for (int d = 0; d < win.grid.dim; ++d) n *= size[d];
        return n;
    }

    CellIndex unflat(std::int64_t idx) const {
        CellIndex c{0, 0, 0};
        for (int d = 0; d < win.grid.dim; ++d) {
            c[d] = win.lo[d] + static_cast<int>(idx % size[d]);
            idx /= size[d];
        }
        return c;
    }
};

// Nearest free window cell by expanding Chebyshev rings; state: 0 free, 1 in E
// or already taken. Distances are exact integer cell offsets. Used to seed the
// per-source pruning radii with a feasible greedy assignment.
class GreedyAssigner {
public:
    GreedyAssigner(const WindowIndexer& wi, std::vector<char> state)
        : wi_(wi), state_(std::move(state)) {}

    // Returns squared cell distance to the nearest free cell, marking it taken.
    std::int64_t take_nearest(const CellIndex& from) {
        const int dim = wi_.win.grid.dim;
        std::int64_t best_d2 = -1;
        CellIndex best{0, 0, 0};
        int max_ring = 0;
        for (int d = 0; d < dim; ++d) max_ring = std::max(max_ring, wi_.size[d]);
        for (int ring = 1; ring <= max_ring; ++ring) {
            if (best_d2 >= 0 && static_cast<std::int64_t>(ring) * ring > best_d2) break;
            visit_ring(from, ring, [&](const CellIndex& c) {
                if (state_[wi_.flat(c)] != 0) return;
                std::int64_t d2 = 0;
                for (int d = 0; d < dim; ++d) {
                    const std::int64_t diff = c[d] - from[d];
                    d2 += diff * diff;
                }
                if (best_d2 < 0 || d2 < best_d2 || (d2 == best_d2 && c < best)) {
                    best_d2 = d2;
                    best = c;
                }
            });
        }
        if (best_d2 < 0) throw Infeasible("greedy found no free cell in window");
        state_[wi_.flat(best)] = 1;
        return best_d2;
    }

private:
    template <typename Fn>
    void visit_ring(const CellIndex& center, int ring, Fn&& fn) const {
        const int dim = wi_.win.grid.dim;
        CellIndex lo = center;
        CellIndex hi = center;
        for (int d = 0; d < dim; ++d) {
            lo[d] = std::max(center[d] - ring, wi_.win.lo[d]);
            hi[d] = std::min(center[d] + ring, wi_.win.hi[d] - 1);
        }
        CellIndex c = lo;
        while (true) {
            bool shell = false;
            for (int d = 0; d < dim; ++d) {
                if (c[d] == center[d] - ring || c[d] == center[d] + ring) {
                    shell = true;
                    break;
                }
            }
            if (shell) fn(c);
            int d = 0;
            for (; d < dim; ++d) {
                if (++c[d] <= hi[d]) break;
                c[d] = lo[d];
            }
            if (d == dim) break;
        }
    }

    const WindowIndexer& wi_;
    std::vector<char> state_;
};

struct SolveAttempt {
    FlowSolution flow;
    std::vector<CellIndex> sink_cells;  // parallel to the sink list
    Region window;
};

SolveAttempt solve_in_window(const GridShape& e, double p, int pad_cells) {
    const Grid& g = e.grid();
    const Region window = bounding_window(e, pad_cells);
    const WindowIndexer wi(window);

    std::vector<char> occupied(static_cast<std::size_t>(wi.count()), 0);
    for (const auto& c : e.cells()) occupied[wi.flat(c)] = 1;

    SolveAttempt attempt;
    attempt.window = window;
    std::vector<CapacitatedSink> sinks;
    sinks.reserve(static_cast<std::size_t>(wi.count()) - e.cell_count());
    const double cell_vol = g.cell_volume();
    for (std::int64_t i = 0; i < wi.count(); ++i) {
        if (occupied[i]) continue;
        const CellIndex c = wi.unflat(i);
        attempt.sink_cells.push_back(c);
        sinks.push_back({g.cell_center(c), cell_vol});
    }

    FlowOptions options;
    if (e.cell_count() * sinks.size() > kPruneArcThreshold) {
        GreedyAssigner greedy(wi, occupied);
        std::vector<double> gdist;
        gdist.reserve(e.cell_count());
        double gmax = 0.0;
        for (const auto& c : e.cells()) {
            gdist.push_back(g.spacing * std::sqrt(static_cast<double>(greedy.take_nearest(c))));
            gmax = std::max(gmax, gdist.back());
        }
        // Duals of cheap-to-serve sources still reflect the global contention
        // scale, so the radius gets a floor at the worst greedy distance.
        options.source_radius.reserve(e.cell_count());
        for (double gd : gdist) {
            options.source_radius.push_back(std::max(1.5 * gd, 1.1 * gmax) + 6.0 * g.spacing);
        }
    }

    // Deepest sources first: their augmenting paths are direct while the
    // nearby complement is still free, which keeps every path short. The
    // optimum itself is order-independent.
    {
        const int nn = detail::neighbor_count(g.dim);
        std::vector<int> depth(e.cell_count(), 0);
        std::vector<int> queue;
        queue.reserve(e.cell_count());
        std::unordered_map<CellIndex, int, CellIndexHash> pos;
        pos.reserve(e.cell_count() * 2);
        for (std::size_t i = 0; i < e.cells().size(); ++i) pos[e.cells()[i]] = static_cast<int>(i);
        for (std::size_t i = 0; i < e.cells().size(); ++i) {
            for (int w = 0; w < nn; ++w) {
                if (!e.contains(detail::neighbor(e.cells()[i], w))) {
                    depth[i] = 1;
                    queue.push_back(static_cast<int>(i));
                    break;
                }
            }
        }
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int i = queue[head];
            for (int w = 0; w < nn; ++w) {
                const auto it = pos.find(detail::neighbor(e.cells()[i], w));
                if (it == pos.end() || depth[it->second] != 0) continue;
                depth[it->second] = depth[i] + 1;
                queue.push_back(it->second);
            }
        }
        options.source_order.resize(e.cell_count());
        std::iota(options.source_order.begin(), options.source_order.end(), 0);
        std::sort(options.source_order.begin(), options.source_order.end(),
                  [&](int a, int b) { return depth[a] != depth[b] ? depth[a] > depth[b] : a < b; });
    }

    const DiscreteMeasure mu = DiscreteMeasure::from_shape(e);
    attempt.flow = solve_capacitated_detailed(mu, sinks, p, options);
    return attempt;
}

WindowAudit audit_attempt(const SolveAttempt& attempt) {
    WindowAudit audit;
    audit.max_distance = attempt.flow.max_arc_distance;
    audit.certificate_rounds = attempt.flow.certificate_rounds;
    int margin = std::numeric_limits<int>::max();
    const Region& win = attempt.window;
    for (const auto& entry : attempt.flow.plan.entries) {
        const CellIndex& c = attempt.sink_cells[entry.snk];
        for (int d = 0; d < win.grid.dim; ++d) {
            margin = std::min(margin, c[d] - win.lo[d]);
            margin = std::min(margin, win.hi[d] - 1 - c[d]);
        }
    }
    if (attempt.flow.plan.entries.empty()) margin = 0;
    audit.shell_margin_cells = margin == std::numeric_limits<int>::max() ? 0 : margin;
    audit.pass = audit.shell_margin_cells >= 1;
    return audit;
}

double root_p(double cost, double p) {
    if (p == 1.0) return cost;
    if (p == 2.0) return std::sqrt(cost);
    return std::pow(cost, 1.0 / p);
}

int initial_pad_cells(const GridShape& e, double pad_factor) {
    const double n_root =
        std::pow(static_cast<double>(e.cell_count()), 1.0 / e.grid().dim);
    return std::max(2, static_cast<int>(std::ceil(pad_factor * n_root)));
}

}  // namespace

FreeTargetResult solve_free_target(const GridShape& e, double p, double pad_factor) {
    if (e.empty()) throw EmptyShape("free-target distance of the empty shape (use the 0 convention)");
    if (!(p >= 1.0)) throw BadInput("p must be >= 1");
    if (!(pad_factor > 0.0)) throw BadInput("pad_factor must be positive");

    int pad = initial_pad_cells(e, pad_factor);
    constexpr int kMaxEnlargements = 4;
    for (int attempt_no = 0;; ++attempt_no) {
        // A window without room for an equal-volume disjoint target can never
        // pass the audit; skip straight to the enlargement.
        if (bounding_window(e, pad).cell_count() <
            2 * static_cast<std::int64_t>(e.cell_count())) {
            if (attempt_no >= kMaxEnlargements) {
                throw WindowOverflow("window audit failing after maximum enlargements");
            }
            pad *= 2;
            continue;
        }
        SolveAttempt attempt = solve_in_window(e, p, pad);
        WindowAudit audit = audit_attempt(attempt);
        audit.enlargements = attempt_no;
        if (!audit.pass) {
            if (attempt_no >= kMaxEnlargements) {
                throw WindowOverflow("window audit failing after maximum enlargements");
            }
            pad *= 2;
            continue;
        }

        FreeTargetResult result;
        result.p = p;
        result.window = attempt.window;
        result.audits = audit;

        std::vector<CellIndex> witness_cells;
        witness_cells.reserve(attempt.flow.plan.entries.size());
        for (const auto& entry : attempt.flow.plan.entries) {
            witness_cells.push_back(attempt.sink_cells[entry.snk]);
        }
        result.witness = GridShape::from_cells(e.grid(), std::move(witness_cells));

        // Remap sink indices from window sink positions to witness positions.
        std::unordered_map<CellIndex, int, CellIndexHash> witness_pos;
        witness_pos.reserve(result.witness.cell_count() * 2);
        for (std::size_t i = 0; i < result.witness.cells().size(); ++i) {
            witness_pos[result.witness.cells()[i]] = static_cast<int>(i);
        }
        result.plan = std::move(attempt.flow.plan);
        for (auto& entry : result.plan.entries) {
            entry.snk = witness_pos.at(attempt.sink_cells[entry.snk]);
        }

        result.wp_pow_p = result.plan.cost_p;
        result.wp = root_p(result.wp_pow_p, p);
        return result;
    }
}

WindowAudit window_audit(const FreeTargetResult& r) {
    WindowAudit audit;
    audit.enlargements = r.audits.enlargements;
    audit.certificate_rounds = r.audits.certificate_rounds;
    int margin = std::numeric_limits<int>::max();
    double maxd = 0.0;
    for (const auto& entry : r.plan.entries) {
        maxd = std::max(maxd, entry.distance);
        const CellIndex& c = r.witness.cells()[entry.snk];
        for (int d = 0; d < r.window.grid.dim; ++d) {
            margin = std::min(margin, c[d] - r.window.lo[d]);
            margin = std::min(margin, r.window.hi[d] - 1 - c[d]);
        }
    }
    audit.max_distance = maxd;
    audit.shell_margin_cells = margin == std::numeric_limits<int>::max() ? 0 : margin;
    audit.pass = audit.shell_margin_cells >= 1;
    return audit;
}

double wp_with_convention(const GridShape& e, double p, double pad_factor) {
    if (e.empty()) return 0.0;
    return solve_free_target(e, p, pad_factor).wp;
}

UpperBoundResult cube_partition_upper_bound(const GridShape& e, double p) {
    if (e.empty()) throw EmptyShape("upper bound of the empty shape");
    if (!(p >= 1.0)) throw BadInput("p must be >= 1");
    const Grid& g = e.grid();
    const int dim = g.dim;
    const auto n_cells = static_cast<double>(e.cell_count());
    const int side = std::max(2, static_cast<int>(std::ceil(std::pow(2.0 * n_cells, 1.0 / dim))));

    const Region bbox = bounding_window(e, 0);
    auto box_of = [&](const CellIndex& c) {
        CellIndex b{0, 0, 0};
        for (int d = 0; d < dim; ++d) {
            // floor division against the bbox anchor
            const int off = c[d] - bbox.lo[d];
            b[d] = off >= 0 ? off / side : -((-off + side - 1) / side);
        }
        return b;
    };

    std::unordered_map<CellIndex, std::vector<CellIndex>, CellIndexHash> groups;
    for (const auto& c : e.cells()) groups[box_of(c)].push_back(c);

    std::vector<CellIndex> boxes;
    boxes.reserve(groups.size());
    for (const auto& [b, _] : groups) boxes.push_back(b);
    std::sort(boxes.begin(), boxes.end());

    double cost = 0.0;
    std::vector<CellIndex> target_cells;
    target_cells.reserve(e.cell_count());
    for (const auto& b : boxes) {
        const auto& members = groups.at(b);
        // Free cells of this cube in lexicographic order.
        std::vector<CellIndex> free_cells;
        free_cells.reserve(members.size());
        CellIndex lo{0, 0, 0};
        for (int d = 0; d < dim; ++d) lo[d] = bbox.lo[d] + b[d] * side;
        CellIndex c = lo;
        while (free_cells.size() < members.size()) {
            if (!e.contains(c)) free_cells.push_back(c);
            int d = dim - 1;
            for (; d >= 0; --d) {
                if (++c[d] < lo[d] + side) break;
                c[d] = lo[d];
            }
            if (d < 0) break;
        }
        if (free_cells.size() < members.size()) {
            throw Infeasible("cube of volume 2|E| lacks free cells (corrupt shape?)");
        }
        for (std::size_t i = 0; i < members.size(); ++i) {
            const Point a = g.cell_center(members[i]);
            const Point t = g.cell_center(free_cells[i]);
            cost += g.cell_volume() *
                    detail::cost_from_dist2(detail::point_dist2(a, t, dim), p);
            target_cells.push_back(free_cells[i]);
        }
    }

    UpperBoundResult out;
    out.cost_p = cost;
    out.target = GridShape::from_cells(g, std::move(target_cells));
    return out;
}

std::vector<GridShape> proximity_clusters(const GridShape& e, double threshold) {
    const auto cells = e.cells();
    const int n = static_cast<int>(cells.size());
    const Grid& g = e.grid();
    const double t2_cells = (threshold / g.spacing) * (threshold / g.spacing);

    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<int> rank(n, 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto link = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank[a] < rank[b]) std::swap(a, b);
        parent[b] = a;
        if (rank[a] == rank[b]) ++rank[a];
    };

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            std::int64_t d2 = 0;
            for (int d = 0; d < g.dim; ++d) {
                const std::int64_t diff = cells[i][d] - cells[j][d];
                d2 += diff * diff;
            }
            if (static_cast<double>(d2) <= t2_cells) link(i, j);
        }
    }

    // Clusters keyed by their representative; output ordered by min cell,
    // which is the first member since cells are sorted.
    std::unordered_map<int, std::vector<CellIndex>> by_root;
    for (int i = 0; i < n; ++i) by_root[find(i)].push_back(cells[i]);
    std::vector<std::vector<CellIndex>> groups;
    groups.reserve(by_root.size());
    for (auto& [_, v] : by_root) groups.push_back(std::move(v));
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    std::vector<GridShape> out;
    out.reserve(groups.size());
    for (auto& grp : groups) out.push_back(GridShape::from_cells(g, std::move(grp)));
    return out;
}

FreeTargetResult additive_split_solve(const GridShape& e, double p, double pad_factor) {
    if (e.empty()) throw EmptyShape("free-target distance of the empty shape");
    const Grid& g = e.grid();
    const double volume_root =
        std::pow(static_cast<double>(e.cell_count()), 1.0 / g.dim) * g.spacing;
    const double threshold = 2.0 * pad_factor * volume_root;

    std::vector<GridShape> clusters = proximity_clusters(e, threshold);
    if (clusters.size() == 1) return solve_free_target(e, p, pad_factor);

    std::unordered_map<CellIndex, int, CellIndexHash> source_pos;
    source_pos.reserve(e.cell_count() * 2);
    for (std::size_t i = 0; i < e.cells().size(); ++i) {
        source_pos[e.cells()[i]] = static_cast<int>(i);
    }

    std::vector<FreeTargetResult> parts;
    parts.reserve(clusters.size());
    std::vector<CellIndex> witness_cells;
    for (const auto& cluster : clusters) {
        parts.push_back(solve_free_target(cluster, p, pad_factor));
        const auto& w = parts.back().witness;
        witness_cells.insert(witness_cells.end(), w.cells().begin(), w.cells().end());
    }

    FreeTargetResult out;
    out.p = p;
    const std::size_t union_size = witness_cells.size();
    out.witness = GridShape::from_cells(g, std::move(witness_cells));
    if (out.witness.cell_count() != union_size || !disjoint(out.witness, e)) {
        // Cluster witnesses collided; the conservative threshold should prevent
        // this, but a monolithic solve is always a valid answer.
        return solve_free_target(e, p, pad_factor);
    }

    std::unordered_map<CellIndex, int, CellIndexHash> witness_pos;
    witness_pos.reserve(out.witness.cell_count() * 2);
    for (std::size_t i = 0; i < out.witness.cells().size(); ++i) {
        witness_pos[out.witness.cells()[i]] = static_cast<int>(i);
    }

    out.audits.pass = true;
    out.audits.shell_margin_cells = std::numeric_limits<int>::max();
    int max_pad = 0;
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
        const auto& part = parts[ci];
        const auto& cluster = clusters[ci];
        for (const auto& entry : part.plan.entries) {
            PlanEntry g_entry = entry;
            g_entry.src = source_pos.at(cluster.cells()[entry.src]);
            g_entry.snk = witness_pos.at(part.witness.cells()[entry.snk]);
            out.plan.entries.push_back(g_entry);
        }
        out.wp_pow_p += part.wp_pow_p;
        out.audits.pass = out.audits.pass && part.audits.pass;
        out.audits.max_distance = std::max(out.audits.max_distance, part.audits.max_distance);
        out.audits.shell_margin_cells =
            std::min(out.audits.shell_margin_cells, part.audits.shell_margin_cells);
        out.audits.enlargements = std::max(out.audits.enlargements, part.audits.enlargements);
        out.audits.certificate_rounds += part.audits.certificate_rounds;
        for (int d = 0; d < g.dim; ++d) {
            max_pad = std::max(max_pad, part.window.hi[d] - part.window.lo[d]);
        }
    }
    std::sort(out.plan.entries.begin(), out.plan.entries.end(),
              [](const PlanEntry& a, const PlanEntry& b) {
                  return std::tie(a.src, a.snk) < std::tie(b.src, b.snk);
              });
    out.plan.p = p;
    out.plan.cost_p = out.wp_pow_p;
    out.wp = root_p(out.wp_pow_p, p);
    out.window = bounding_window(e, initial_pad_cells(e, pad_factor));
    (void)max_pad;
    return out;
}

}  // namespace shapes
