#include "shapes/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <queue>

namespace shapes {

namespace detail {

double point_dist2(const Point& a, const Point& b, int dim) {
    double d2 = 0.0;
    for (int d = 0; d < dim; ++d) {
        const double diff = a[d] - b[d];
        d2 += diff * diff;
    }
    return d2;
}

double cost_from_dist2(double d2, double p) {
    if (p == 1.0) return std::sqrt(d2);
    if (p == 2.0) return d2;
    return std::pow(d2, 0.5 * p);
}

double cost_from_distance(double d, double p) {
    if (p == 1.0) return d;
    if (p == 2.0) return d * d;
    return std::pow(d, p);
}

}  // namespace detail

double DiscreteMeasure::total() const {
    return std::accumulate(masses.begin(), masses.end(), 0.0);
}

void DiscreteMeasure::validate() const {
    if (points.size() != masses.size()) throw BadInput("points/masses length mismatch");
    if (dim < 1 || dim > 3) throw BadInput("measure dimension must be 1, 2, or 3");
    for (double m : masses) {
        if (!(m > 0.0)) throw BadInput("measure masses must be positive");
    }
}

DiscreteMeasure DiscreteMeasure::from_shape(const GridShape& s) {
    DiscreteMeasure mu;
    mu.dim = s.grid().dim;
    mu.points.reserve(s.cell_count());
    mu.masses.assign(s.cell_count(), s.grid().cell_volume());
    for (const auto& c : s.cells()) mu.points.push_back(s.grid().cell_center(c));
    return mu;
}

double plan_cost(const TransportPlan& plan, double p) {
    double total = 0.0;
    for (const auto& e : plan.entries) total += e.mass * detail::cost_from_distance(e.distance, p);
    return total;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Detects a common mass unit: all values integer multiples of the minimum,
// within 1e-9 relative. Returns 0 when there is none.
double detect_mass_unit(std::span<const double> a, std::span<const double> b) {
    double unit = kInf;
    for (double v : a) unit = std::min(unit, v);
    for (double v : b) unit = std::min(unit, v);
    if (!(unit > 0.0) || !std::isfinite(unit)) return 0.0;
    auto integral = [&](double v) {
        const double q = v / unit;
        if (q > 4.5e15) return false;  // keep counts exactly representable
        return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, q);
    };
    for (double v : a) {
        if (!integral(v)) return 0.0;
    }
    for (double v : b) {
        if (!integral(v)) return 0.0;
    }
    return unit;
}

// Uniform spatial buckets over the sink points, for radius queries and
// nearest-free-sink searches.
class PointBuckets {
public:
    PointBuckets(std::span<const CapacitatedSink> sinks, int dim) : dim_(dim) {
        for (int d = 0; d < 3; ++d) {
            lo_[d] = 0.0;
            n_[d] = 1;
        }
        if (sinks.empty()) {
            size_ = 1.0;
            return;
        }
        Point hi;
        for (int d = 0; d < dim; ++d) {
            lo_[d] = hi[d] = sinks[0].point[d];
        }
        for (const auto& s : sinks) {
            for (int d = 0; d < dim; ++d) {
                lo_[d] = std::min(lo_[d], s.point[d]);
                hi[d] = std::max(hi[d], s.point[d]);
            }
        }
        double extent_prod = 1.0;
        for (int d = 0; d < dim; ++d) extent_prod *= std::max(hi[d] - lo_[d], 1e-300);
        // Aim for a handful of points per bucket.
        size_ = 4.0 * std::pow(extent_prod / static_cast<double>(sinks.size()), 1.0 / dim);
        if (!(size_ > 0.0) || !std::isfinite(size_)) size_ = 1.0;
        std::int64_t total = 1;
        for (int d = 0; d < dim; ++d) {
            n_[d] = static_cast<int>((hi[d] - lo_[d]) / size_) + 1;
            total *= n_[d];
        }
        cells_.resize(static_cast<std::size_t>(total));
        for (std::size_t i = 0; i < sinks.size(); ++i) {
            cells_[bucket_of(sinks[i].point)].push_back(static_cast<int>(i));
        }
    }

    template <typename Fn>
    void for_each_in_ball(const Point& center, double radius, Fn&& fn) const {
        int blo[3] = {0, 0, 0};
        int bhi[3] = {0, 0, 0};
        for (int d = 0; d < dim_; ++d) {
            blo[d] = clamp_coord(static_cast<int>(std::floor((center[d] - radius - lo_[d]) / size_)), d);
            bhi[d] = clamp_coord(static_cast<int>(std::floor((center[d] + radius - lo_[d]) / size_)), d);
        }
        for (int z = blo[2]; z <= bhi[2]; ++z) {
            for (int y = blo[1]; y <= bhi[1]; ++y) {
                for (int x = blo[0]; x <= bhi[0]; ++x) {
                    for (int idx : cells_[flat(x, y, z)]) fn(idx);
                }
            }
        }
    }

    double cell_size() const { return size_; }

    void bucket_coords(const Point& p, int out[3]) const {
        out[0] = out[1] = out[2] = 0;
        for (int d = 0; d < dim_; ++d) {
            out[d] = clamp_coord(static_cast<int>(std::floor((p[d] - lo_[d]) / size_)), d);
        }
    }

    // Any point in ring `ring` around a center bucket is at least this far away.
    double ring_min_distance(int ring) const { return std::max(0.0, (ring - 1) * size_); }

    int max_ring() const { return max_rings(); }

    // Sink indices of the Chebyshev bucket ring around the given bucket coords.
    template <typename Fn>
    void for_each_in_ring(const int cb[3], int ring, Fn&& fn) const {
        visit_ring(cb, ring, [&](std::size_t flat_idx) {
            for (int idx : cells_[flat_idx]) fn(idx);
        });
    }

    // Expanding-ring nearest search among sinks passing `pred`.
    // Returns -1 if none exists.
    template <typename Pred>
    int nearest(const Point& center, std::span<const CapacitatedSink> sinks, Pred&& pred) const {
        int cb[3] = {0, 0, 0};
        for (int d = 0; d < dim_; ++d) {
            cb[d] = clamp_coord(static_cast<int>(std::floor((center[d] - lo_[d]) / size_)), d);
        }
        int best = -1;
        double best_d2 = kInf;
        const int max_ring = max_rings();
        for (int ring = 0; ring <= max_ring; ++ring) {
            if (best >= 0) {
                // Any point in a farther ring is at least (ring-1)*size_ away.
                const double min_d = (ring - 1) * size_;
                if (min_d > 0.0 && min_d * min_d > best_d2) break;
            }
            visit_ring(cb, ring, [&](std::size_t flat_idx) {
                for (int idx : cells_[flat_idx]) {
                    if (!pred(idx)) continue;
                    const double d2 = detail::point_dist2(center, sinks[idx].point, dim_);
                    if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
                        best_d2 = d2;
                        best = idx;
                    }
                }
            });
        }
        return best;
    }

private:
    int clamp_coord(int v, int d) const { return std::clamp(v, 0, n_[d] - 1); }

    std::size_t flat(int x, int y, int z) const {
        return (static_cast<std::size_t>(z) * n_[1] + y) * n_[0] + x;
    }

    std::size_t bucket_of(const Point& p) const {
        int b[3] = {0, 0, 0};
        for (int d = 0; d < dim_; ++d) {
            b[d] = clamp_coord(static_cast<int>(std::floor((p[d] - lo_[d]) / size_)), d);
        }
        return flat(b[0], b[1], b[2]);
    }

    int max_rings() const {
        int m = 0;
        for (int d = 0; d < dim_; ++d) m = std::max(m, n_[d]);
        return m;
    }

    template <typename Fn>
    void visit_ring(const int cb[3], int ring, Fn&& fn) const {
        int blo[3] = {0, 0, 0};
        int bhi[3] = {0, 0, 0};
        for (int d = 0; d < dim_; ++d) {
            blo[d] = cb[d] - ring;
            bhi[d] = cb[d] + ring;
        }
        for (int z = blo[2]; z <= bhi[2]; ++z) {
            if (dim_ == 3 && (z < 0 || z >= n_[2])) continue;
            for (int y = blo[1]; y <= bhi[1]; ++y) {
                if (dim_ >= 2 && (y < 0 || y >= n_[1])) continue;
                for (int x = blo[0]; x <= bhi[0]; ++x) {
                    if (x < 0 || x >= n_[0]) continue;
                    // Only the shell of the box.
                    const bool on_shell = (x == blo[0] || x == bhi[0]) ||
                                          (dim_ >= 2 && (y == blo[1] || y == bhi[1])) ||
                                          (dim_ == 3 && (z == blo[2] || z == bhi[2]));
                    if (ring > 0 && !on_shell) continue;
                    fn(flat(x, y, z));
                }
            }
        }
    }

    int dim_;
    Point lo_{0.0, 0.0, 0.0};
    double size_ = 1.0;
    int n_[3] = {1, 1, 1};
    std::vector<std::vector<int>> cells_;
};

// Successive shortest paths with node potentials on the bipartite
// source/sink graph. Dijkstra terminates at the first sink with residual
// capacity; only finalized nodes get potential updates, which keeps all
// residual reduced costs nonnegative. Arcs are generated on the fly from
// coordinates, so no arc list is ever materialized.
class SspSolver {
public:
    SspSolver(const DiscreteMeasure& mu, std::span<const CapacitatedSink> sinks, double p,
              const FlowOptions& options)
        : mu_(mu), sinks_(sinks), p_(p), m_(static_cast<int>(mu.points.size())),
          k_(static_cast<int>(sinks.size())), buckets_(sinks, mu.dim) {
        const double supply_total = mu_.total();
        double cap_total = 0.0;
        for (const auto& s : sinks_) cap_total += s.capacity;
        if (cap_total < supply_total * (1.0 - 1e-12)) {
            throw InsufficientCapacity("total sink capacity below total supply");
        }

        unit_ = detect_mass_unit(mu_.masses, capacities_view());
        supply_.resize(m_);
        for (int s = 0; s < m_; ++s) supply_[s] = to_units(mu_.masses[s]);
        cap_.resize(k_);
        for (int j = 0; j < k_; ++j) cap_[j] = to_units(sinks_[j].capacity);

        pruning_ = !options.source_radius.empty();
        if (pruning_) {
            if (options.source_radius.size() != static_cast<std::size_t>(m_)) {
                throw BadInput("source_radius must have one entry per source");
            }
            radius_ = options.source_radius;
        }
        if (!options.source_order.empty()) {
            if (options.source_order.size() != static_cast<std::size_t>(m_)) {
                throw BadInput("source_order must be a permutation of the sources");
            }
            order_ = options.source_order;
        } else {
            order_.resize(m_);
            std::iota(order_.begin(), order_.end(), 0);
        }

        pot_.assign(m_ + k_, 0.0);
        dist_.assign(m_ + k_, kInf);
        parent_.assign(m_ + k_, -1);
        stamp_.assign(m_ + k_, 0);
        finalized_.assign(m_ + k_, 0);
        active_pos_.assign(k_, -1);
    }

    FlowSolution solve() {
        for (int round = 0;; ++round) {
            reset_state();
            build_active();
            run();
            if (!pruning_ || certificate_ok()) {
                FlowSolution out;
                out.certificate_rounds = round;
                extract(out);
                if (std::getenv("SHAPES_SOLVER_STATS")) {
                    std::fprintf(stderr,
                                 "[solver] m=%d k=%d active=%zu rounds=%d aug=%lld pops_src=%lld "
                                 "pops_snk=%lld arc_scans=%lld\n",
                                 m_, k_, active_.size(), round, stat_augmentations_,
                                 stat_pops_source_, stat_pops_sink_, stat_arc_scans_);
                }
                return out;
            }
            if (round >= 8) {
                // Give up on pruning entirely; one unpruned solve is always valid.
                pruning_ = false;
            }
        }
    }

private:
    std::span<const double> capacities_view() const {
        caps_scratch_.clear();
        caps_scratch_.reserve(k_);
        for (const auto& s : sinks_) caps_scratch_.push_back(s.capacity);
        return caps_scratch_;
    }

    double to_units(double mass) const {
        if (unit_ == 0.0) return mass;
        return std::round(mass / unit_);
    }

    double from_units(double units) const { return unit_ == 0.0 ? units : units * unit_; }

    void reset_state() {
        std::fill(pot_.begin(), pot_.end(), 0.0);
        std::fill(active_pos_.begin(), active_pos_.end(), -1);
        active_.clear();
        active_x_.clear();
        active_y_.clear();
        active_z_.clear();
        remaining_cap_.clear();
        flows_.clear();
        remaining_supply_ = supply_;
        version_ = 0;
        std::fill(stamp_.begin(), stamp_.end(), 0);
    }

    void activate_sink(int j) {
        if (active_pos_[j] >= 0) return;
        active_pos_[j] = static_cast<int>(active_.size());
        active_.push_back(j);
        active_x_.push_back(sinks_[j].point[0]);
        active_y_.push_back(sinks_[j].point[1]);
        active_z_.push_back(sinks_[j].point[2]);
        remaining_cap_.push_back(cap_[j]);
        flows_.emplace_back();
    }

    void build_active() {
        if (!pruning_) {
            for (int j = 0; j < k_; ++j) activate_sink(j);
            return;
        }
        for (int s = 0; s < m_; ++s) {
            buckets_.for_each_in_ball(mu_.points[s], radius_[s], [&](int j) {
                if (detail::point_dist2(mu_.points[s], sinks_[j].point, mu_.dim) <=
                    radius_[s] * radius_[s]) {
                    activate_sink(j);
                }
            });
        }
    }

    // Grows the active set after a radius increase, preserving flow state.
    void grow_radius(int s, double new_radius) {
        radius_[s] = new_radius;
        buckets_.for_each_in_ball(mu_.points[s], new_radius, [&](int j) {
            if (detail::point_dist2(mu_.points[s], sinks_[j].point, mu_.dim) <=
                new_radius * new_radius) {
                activate_sink(j);
            }
        });
    }

    int source_node(int s) const { return s; }
    int sink_node(int a) const { return m_ + a; }  // a = active index

    double arc_cost(int s, int a) const {
        const double dx = mu_.points[s][0] - active_x_[a];
        double d2 = dx * dx;
        if (mu_.dim >= 2) {
            const double dy = mu_.points[s][1] - active_y_[a];
            d2 += dy * dy;
        }
        if (mu_.dim == 3) {
            const double dz = mu_.points[s][2] - active_z_[a];
            d2 += dz * dz;
        }
        return detail::cost_from_dist2(d2, p_);
    }

    void touch(int node) {
        if (stamp_[node] != version_) {
            stamp_[node] = version_;
            dist_[node] = kInf;
            parent_[node] = -1;
            finalized_[node] = 0;
            touched_.push_back(node);
        }
    }

    // One shortest-path computation from source s0; returns the active index of
    // the reached free sink, or -1 when nothing is reachable.
    //
    // Arc scans out of a popped source run ring by ring in increasing distance
    // and stop once d + pot[u] + ring cost can no longer beat the best
    // tentative distance to a free sink: sink potentials are always <= 0, so
    // such relaxations can never enter a shortest path to the target. This
    // keeps the scan local without changing the optimum.
    int dijkstra(int s0) {
        ++version_;
        heap_ = {};
        touched_.clear();
        touch(s0);
        dist_[s0] = 0.0;
        heap_.push({0.0, s0});
        int target = -1;
        double best_free = kInf;  // tentative upper bound on the target distance
        while (!heap_.empty()) {
            auto [d, node] = heap_.top();
            heap_.pop();
            touch(node);
            if (finalized_[node] || d > dist_[node]) continue;
            finalized_[node] = 1;
            if (node >= m_) {
                ++stat_pops_sink_;
                const int a = node - m_;
                if (remaining_cap_[a] > 0.0) {
                    target = a;
                    break;
                }
                // Residual backward arcs to the sources currently feeding a.
                for (const auto& [s, amount] : flows_[a]) {
                    (void)amount;
                    const int v = source_node(s);
                    touch(v);
                    if (finalized_[v]) continue;
                    const double rc =
                        std::max(0.0, -arc_cost(s, a) + pot_[node] - pot_[v]);
                    const double nd = d + rc;
                    if (nd < dist_[v]) {
                        dist_[v] = nd;
                        parent_[v] = a;
                        heap_.push({nd, v});
                    }
                }
            } else {
                ++stat_pops_source_;
                const int s = node;
                const double r2 = pruning_ ? radius_[s] * radius_[s] : kInf;
                const double pu = pot_[node];
                int cb[3];
                buckets_.bucket_coords(mu_.points[s], cb);
                const int max_ring = buckets_.max_ring();
                for (int ring = 0; ring <= max_ring; ++ring) {
                    const double ring_dist = buckets_.ring_min_distance(ring);
                    if (pruning_ && ring_dist * ring_dist > r2) break;
                    if (d + pu + detail::cost_from_distance(ring_dist, p_) >= best_free) break;
                    buckets_.for_each_in_ring(cb, ring, [&](int j) {
                        ++stat_arc_scans_;
                        const int a = active_pos_[j];
                        if (a < 0) return;
                        const double d2 =
                            detail::point_dist2(mu_.points[s], sinks_[j].point, mu_.dim);
                        if (d2 > r2) return;
                        const int v = sink_node(a);
                        touch(v);
                        if (finalized_[v]) return;
                        const double rc =
                            std::max(0.0, detail::cost_from_dist2(d2, p_) + pu - pot_[v]);
                        const double nd = d + rc;
                        if (nd < dist_[v]) {
                            dist_[v] = nd;
                            parent_[v] = s;
                            heap_.push({nd, v});
                            if (remaining_cap_[a] > 0.0 && nd < best_free) best_free = nd;
                        }
                    });
                }
            }
        }
        if (target >= 0) {
            const double dstar = dist_[sink_node(target)];
            for (int node : touched_) {
                if (finalized_[node] && dist_[node] < dstar) pot_[node] += dist_[node] - dstar;
            }
        }
        return target;
    }

    double& flow_ref(int s, int a) {
        for (auto& e : flows_[a]) {
            if (e.first == s) return e.second;
        }
        flows_[a].emplace_back(s, 0.0);
        return flows_[a].back().second;
    }

    void augment(int s0, int target) {
        double delta = std::min(remaining_supply_[s0], remaining_cap_[target]);
        for (int a = target;;) {
            const int s = parent_[sink_node(a)];
            if (s == s0) break;
            const int aprev = parent_[source_node(s)];
            delta = std::min(delta, flow_ref(s, aprev));
            a = aprev;
        }
        for (int a = target;;) {
            const int s = parent_[sink_node(a)];
            flow_ref(s, a) += delta;
            if (s == s0) break;
            const int aprev = parent_[source_node(s)];
            double& f = flow_ref(s, aprev);
            f -= delta;
            if (f <= 0.0) {
                auto& lst = flows_[aprev];
                for (std::size_t i = 0; i < lst.size(); ++i) {
                    if (lst[i].first == s) {
                        lst.erase(lst.begin() + i);
                        break;
                    }
                }
            }
            a = aprev;
        }
        remaining_supply_[s0] -= delta;
        remaining_cap_[target] -= delta;
    }

    void run() {
        const double total_units = std::accumulate(supply_.begin(), supply_.end(), 0.0);
        const double crumb = unit_ != 0.0 ? 0.5 : 1e-12 * std::max(1.0, total_units);
        std::int64_t guard = 0;
        const std::int64_t guard_limit = 64ll * (m_ + k_) + 4096;
        for (int s0 : order_) {
            while (remaining_supply_[s0] > crumb) {
                if (++guard > guard_limit) {
                    throw Infeasible("augmentation limit exceeded (degenerate masses?)");
                }
                ++stat_augmentations_;
                const int target = dijkstra(s0);
                if (target < 0) {
                    if (pruning_) {
                        grow_radius(s0, std::max(radius_[s0] * 2.0, radius_[s0] + 1.0));
                        continue;
                    }
                    throw Infeasible("no augmenting path to a free sink");
                }
                augment(s0, target);
            }
            remaining_supply_[s0] = 0.0;
        }
    }

    // LP dual certificate for pruning: with alpha_s = -pot(s) and beta_j =
    // -pot(j) >= 0, every kept arc is dual-feasible by construction; excluded
    // arcs cost at least radius^p, so alpha_s <= radius_s^p makes the pruned
    // optimum optimal for the full instance.
    bool certificate_ok() {
        bool ok = true;
        for (int s = 0; s < m_; ++s) {
            const double alpha = -pot_[source_node(s)];
            const double bound = detail::cost_from_distance(radius_[s], p_);
            if (alpha > bound + 1e-9 * (1.0 + std::abs(bound))) {
                const double needed =
                    p_ == 1.0 ? alpha : (p_ == 2.0 ? std::sqrt(alpha) : std::pow(alpha, 1.0 / p_));
                if (std::getenv("SHAPES_SOLVER_STATS")) {
                    std::fprintf(stderr, "[cert] source %d alpha=%g radius=%g needed=%g\n", s,
                                 alpha, radius_[s], needed);
                }
                grow_radius(s, std::max(radius_[s] * 2.0, needed * 1.05));
                ok = false;
            }
        }
        return ok;
    }

    void extract(FlowSolution& out) {
        out.plan.p = p_;
        for (int a = 0; a < static_cast<int>(active_.size()); ++a) {
            for (const auto& [s, amount] : flows_[a]) {
                if (amount <= 0.0) continue;
                PlanEntry e;
                e.src = s;
                e.snk = active_[a];
                e.mass = from_units(amount);
                e.distance = std::sqrt(
                    detail::point_dist2(mu_.points[s], sinks_[active_[a]].point, mu_.dim));
                out.plan.entries.push_back(e);
            }
        }
        std::sort(out.plan.entries.begin(), out.plan.entries.end(),
                  [](const PlanEntry& a, const PlanEntry& b) {
                      return std::tie(a.src, a.snk) < std::tie(b.src, b.snk);
                  });
        double cost = 0.0;
        double maxd = 0.0;
        for (const auto& e : out.plan.entries) {
            cost += e.mass * detail::cost_from_distance(e.distance, p_);
            maxd = std::max(maxd, e.distance);
        }
        out.plan.cost_p = cost;
        out.max_arc_distance = maxd;
        out.source_dual.resize(m_);
        for (int s = 0; s < m_; ++s) out.source_dual[s] = -pot_[source_node(s)];
    }

    const DiscreteMeasure& mu_;
    std::span<const CapacitatedSink> sinks_;
    double p_;
    int m_;
    int k_;
    PointBuckets buckets_;

    double unit_ = 0.0;  // 0 means no common unit: real-valued flow
    std::vector<double> supply_;
    std::vector<double> cap_;
    bool pruning_ = false;
    std::vector<double> radius_;
    std::vector<int> order_;

    // Active (kept) sinks, structure-of-arrays for the Dijkstra scan.
    std::vector<int> active_;
    std::vector<int> active_pos_;
    std::vector<double> active_x_, active_y_, active_z_;
    std::vector<double> remaining_cap_;
    std::vector<std::vector<std::pair<int, double>>> flows_;  // per active sink
    std::vector<double> remaining_supply_;

    std::vector<double> pot_;
    std::vector<double> dist_;
    std::vector<int> parent_;
    std::vector<int> stamp_;
    std::vector<char> finalized_;
    std::vector<int> touched_;
    int version_ = 0;
    std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                        std::greater<>>
        heap_;

    std::int64_t stat_augmentations_ = 0;
    std::int64_t stat_pops_source_ = 0;
    std::int64_t stat_pops_sink_ = 0;
    std::int64_t stat_arc_scans_ = 0;

    mutable std::vector<double> caps_scratch_;
};

}  // namespace

FlowSolution solve_capacitated_detailed(const DiscreteMeasure& mu,
                                        std::span<const CapacitatedSink> sinks, double p,
                                        const FlowOptions& options) {
    mu.validate();
    if (!(p >= 1.0)) throw BadInput("p must be >= 1");
    SspSolver solver(mu, sinks, p, options);
    return solver.solve();
}

TransportPlan solve_flow_to_capacitated_sinks(const DiscreteMeasure& mu,
                                              std::span<const CapacitatedSink> sinks, double p) {
    return solve_capacitated_detailed(mu, sinks, p).plan;
}

TransportPlan solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
    mu.validate();
    nu.validate();
    if (mu.dim != nu.dim) throw BadInput("measure dimensions differ");
    const double tm = mu.total();
    const double tn = nu.total();
    if (std::abs(tm - tn) > 1e-12 * std::max(tm, tn)) {
        throw MassMismatch("total masses differ beyond tolerance");
    }
    std::vector<CapacitatedSink> sinks(nu.points.size());
    for (std::size_t j = 0; j < nu.points.size(); ++j) sinks[j] = {nu.points[j], nu.masses[j]};
    return solve_capacitated_detailed(mu, sinks, p).plan;
}

double brute_force_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
    mu.validate();
    nu.validate();
    if (mu.points.size() != nu.points.size()) {
        throw MassMismatch("brute force requires equally many points per side");
    }
    const std::size_t n = mu.points.size();
    if (n > 8) throw TooLarge("brute force limited to 8 points per side");
    if (n == 0) return 0.0;
    const double m0 = mu.masses[0];
    for (double m : mu.masses) {
        if (std::abs(m - m0) > 1e-9 * m0) throw MassMismatch("brute force requires equal unit masses");
    }
    for (double m : nu.masses) {
        if (std::abs(m - m0) > 1e-9 * m0) throw MassMismatch("brute force requires equal unit masses");
    }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = kInf;
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cost += m0 * detail::cost_from_dist2(
                             detail::point_dist2(mu.points[i], nu.points[perm[i]], mu.dim), p);
        }
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace shapes
