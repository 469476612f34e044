#pragma once
/**
 * @file metrics.hpp
 * @brief Density measurements of a front: grid occupancy, covering radius,
 *        the density time tau(P, r), and length growth.
 *
 * The front is turned into straight segments between neighbouring live
 * samples. On the torus, Klein bottle and rectangle these live on a flat
 * torus chart that covers the surface (the surface itself, the 1x2 torus,
 * the 2a x 2b torus) and the surface distance from q is the minimum chart
 * distance over the preimages of q. The disk uses the plane. The cube keeps
 * one chart per face, extended by its four neighbours unfolded across the
 * shared edges; distances found that way are exact only while the shortest
 * path stays inside that cross, so cube reports carry distance_exact = false.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "wavefront/core.hpp"
#include "wavefront/frontier.hpp"
#include "wavefront/parallel.hpp"
#include "wavefront/surfaces.hpp"

namespace wavefront {

struct DensityReport {
    double t{0.0};
    double eps{0.0};
    std::int64_t cells_total{0};
    std::int64_t cells_hit{0};
    double covering_radius{0.0};
    double length{0.0};
    std::int64_t n_components{0};
    bool distance_exact{true};

    double cells_hit_fraction() const {
        return cells_total == 0 ? 0.0 : static_cast<double>(cells_hit) / static_cast<double>(cells_total);
    }
};

struct TauEstimate {
    double r{0.0};
    bool achieved{false};
    double tau{0.0};
    double t_max{0.0};
    double delta_t{0.0};
    std::optional<double> first_full_cover_time;
    std::vector<std::pair<double, bool>> checkpoints;  // (t, every ball hit)
};

struct LengthCurve {
    std::vector<double> t;
    std::vector<double> length;
    double slope{0.0};
};

/// Cell side of the density grid may not be finer than this many h_max.
inline constexpr double kMinEpsOverHmax = 4.0;

namespace detail {

struct Segment {
    Vec2 a;
    Vec2 d;
};

/// Visits every cell of a (cw x ch) grid that the segment a -> b passes
/// through, as unwrapped integer indices.
template <typename Fn>
void traverse_cells(Vec2 a, Vec2 b, double cw, double ch, Fn&& visit) {
    auto i = static_cast<std::int64_t>(std::floor(a.x / cw));
    auto j = static_cast<std::int64_t>(std::floor(a.y / ch));
    const auto ie = static_cast<std::int64_t>(std::floor(b.x / cw));
    const auto je = static_cast<std::int64_t>(std::floor(b.y / ch));
    visit(i, j);
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double inf = std::numeric_limits<double>::infinity();
    const std::int64_t sx = dx > 0 ? 1 : -1, sy = dy > 0 ? 1 : -1;
    double tmx = dx != 0 ? ((dx > 0 ? static_cast<double>(i + 1) * cw : static_cast<double>(i) * cw) - a.x) / dx : inf;
    double tmy = dy != 0 ? ((dy > 0 ? static_cast<double>(j + 1) * ch : static_cast<double>(j) * ch) - a.y) / dy : inf;
    const double tdx = dx != 0 ? cw / std::abs(dx) : inf;
    const double tdy = dy != 0 ? ch / std::abs(dy) : inf;
    std::int64_t steps = std::abs(ie - i) + std::abs(je - j);
    while (steps-- > 0) {
        if (tmx < tmy) {
            i += sx;
            tmx += tdx;
        } else {
            j += sy;
            tmy += tdy;
        }
        visit(i, j);
    }
}

inline std::int64_t wrap_index(std::int64_t i, std::int64_t n) {
    std::int64_t r = i % n;
    return r < 0 ? r + n : r;
}

/// Bucket grid of segments over a rectangle, optionally periodic.
class SegmentIndex {
public:
    SegmentIndex() = default;
    SegmentIndex(Vec2 origin, double width, double height, std::int64_t nx, std::int64_t ny, bool periodic)
        : origin_(origin), w_(width), h_(height), nx_(nx), ny_(ny), periodic_(periodic),
          bw_(width / static_cast<double>(nx)), bh_(height / static_cast<double>(ny)),
          buckets_(static_cast<std::size_t>(nx * ny)) {}

    void insert(const Segment& s) {
        const Vec2 a = s.a - origin_, b = a + s.d;
        const auto i0 = static_cast<std::int64_t>(std::floor(std::min(a.x, b.x) / bw_));
        const auto i1 = static_cast<std::int64_t>(std::floor(std::max(a.x, b.x) / bw_));
        const auto j0 = static_cast<std::int64_t>(std::floor(std::min(a.y, b.y) / bh_));
        const auto j1 = static_cast<std::int64_t>(std::floor(std::max(a.y, b.y) / bh_));
        for (std::int64_t i = i0; i <= i1; ++i)
            for (std::int64_t j = j0; j <= j1; ++j) {
                if (periodic_) {
                    const std::int64_t wi = wrap_index(i, nx_), wj = wrap_index(j, ny_);
                    const Vec2 shift{static_cast<double>((i - wi) / nx_) * w_, static_cast<double>((j - wj) / ny_) * h_};
                    bucket(wi, wj).push_back({s.a - shift, s.d});
                } else if (i >= 0 && i < nx_ && j >= 0 && j < ny_) {
                    bucket(i, j).push_back(s);
                }
            }
        ++count_;
    }

    std::size_t size() const { return count_; }

    /// Distance from q to the nearest segment (infinity if none is in range).
    double nearest(Vec2 q) const {
        const Vec2 r = q - origin_;
        const auto qi = static_cast<std::int64_t>(std::floor(r.x / bw_));
        const auto qj = static_cast<std::int64_t>(std::floor(r.y / bh_));
        const double bmin = std::min(bw_, bh_);
        const std::int64_t max_ring = periodic_ ? std::max(nx_, ny_) / 2 + 1 : std::max(nx_, ny_) + 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::int64_t k = 0; k <= max_ring; ++k) {
            for (std::int64_t di = -k; di <= k; ++di)
                for (std::int64_t dj = -k; dj <= k; ++dj) {
                    if (std::max(std::abs(di), std::abs(dj)) != k) continue;
                    scan(q, qi + di, qj + dj, best);
                }
            if (best <= static_cast<double>(k) * bmin) break;
        }
        return best;
    }

private:
    std::vector<Segment>& bucket(std::int64_t i, std::int64_t j) { return buckets_[static_cast<std::size_t>(j * nx_ + i)]; }
    const std::vector<Segment>& bucket(std::int64_t i, std::int64_t j) const {
        return buckets_[static_cast<std::size_t>(j * nx_ + i)];
    }

    void scan(Vec2 q, std::int64_t i, std::int64_t j, double& best) const {
        Vec2 shift;
        if (periodic_) {
            const std::int64_t wi = wrap_index(i, nx_), wj = wrap_index(j, ny_);
            shift = {static_cast<double>((i - wi) / nx_) * w_, static_cast<double>((j - wj) / ny_) * h_};
            i = wi;
            j = wj;
        } else if (i < 0 || i >= nx_ || j < 0 || j >= ny_) {
            return;
        }
        const Vec2 qs = q - shift;
        for (const auto& s : bucket(i, j)) best = std::min(best, point_segment_distance(qs, s.a, s.d));
    }

    Vec2 origin_;
    double w_{1.0}, h_{1.0};
    std::int64_t nx_{1}, ny_{1};
    bool periodic_{false};
    double bw_{1.0}, bh_{1.0};
    std::vector<std::vector<Segment>> buckets_;
    std::size_t count_{0};
};

inline std::int64_t cells_for(double extent, double eps) {
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(extent / eps - 1e-9)));
}

/// Calls fn(a, b) for each adjacent pair of live samples that forms a front
/// segment, and fn(a, a) for live samples with no such neighbour.
template <typename Fn>
void for_each_front_segment(const Front& f, Fn&& fn) {
    for (const auto& c : f.components) {
        const auto& s = c.samples;
        const std::size_t n = s.size();
        std::vector<char> used(n, 0);
        auto pair = [&](std::size_t i, std::size_t j) {
            if (!s[i].alive || !s[j].alive) return;
            if (!std::isfinite(sample_gap(f.surface, s[i], s[j]))) return;
            fn(s[i], s[j]);
            used[i] = used[j] = 1;
        };
        for (std::size_t i = 1; i < n; ++i) pair(i - 1, i);
        if (c.closed && n > 1) pair(n - 1, 0);
        for (std::size_t i = 0; i < n; ++i)
            if (s[i].alive && !used[i]) fn(s[i], s[i]);
    }
}

// ---------------------------------------------------------------------------
// Flat charts (torus, Klein bottle, rectangle, disk)
// ---------------------------------------------------------------------------

struct FlatChart {
    Vec2 origin;
    double width{1.0}, height{1.0};
    bool periodic{true};
    std::int64_t nx{1}, ny{1};  // occupancy grid over the whole chart
    bool distance_exact{true};

    double cw() const { return width / static_cast<double>(nx); }
    double ch() const { return height / static_cast<double>(ny); }
};

inline FlatChart flat_chart(const SurfaceModel& s, double eps) {
    FlatChart c;
    std::visit(overloaded{
                   [&](const Torus& m) {
                       c.width = m.alpha;
                       c.height = m.beta;
                       c.nx = cells_for(m.alpha, eps);
                       c.ny = cells_for(m.beta, eps);
                   },
                   [&](const KleinBottle&) {
                       c.width = 1.0;
                       c.height = 2.0;
                       c.nx = cells_for(1.0, eps);
                       c.ny = 2 * c.nx;
                   },
                   [&](const RectBilliard& m) {
                       c.width = 2.0 * m.a;
                       c.height = 2.0 * m.b;
                       c.nx = 2 * cells_for(m.a, eps);
                       c.ny = 2 * cells_for(m.b, eps);
                   },
                   [&](const DiskBilliard& m) {
                       c.origin = {-m.radius, -m.radius};
                       c.width = c.height = 2.0 * m.radius;
                       c.periodic = false;
                       c.nx = c.ny = cells_for(2.0 * m.radius, eps);
                   },
                   [&](const CubeSurface&) { throw PreconditionError("the cube has no single flat chart"); },
               },
               s);
    return c;
}

/// Chart position of a sample and the segment to its neighbour.
inline Segment chart_segment(const SurfaceModel& s, const FlatChart& c, const FrontSample& a, const FrontSample& b) {
    if (is_disk(s)) return {a.pos.xy(), b.pos.xy() - a.pos.xy()};
    const Vec2 start{wrap_mod(a.cover.x, c.width), wrap_mod(a.cover.y, c.height)};
    return {start, b.cover.xy() - a.cover.xy()};
}

/// Chart points mapping onto the surface point q.
inline std::vector<Vec2> chart_preimages(const SurfaceModel& s, Vec2 q) {
    return std::visit(overloaded{
                          [&](const KleinBottle&) { return std::vector<Vec2>{q, {1.0 - q.x, q.y + 1.0}}; },
                          [&](const RectBilliard& m) {
                              const double X = 2.0 * m.a - q.x, Y = 2.0 * m.b - q.y;
                              return std::vector<Vec2>{q, {X, q.y}, {q.x, Y}, {X, Y}};
                          },
                          [&](const auto&) { return std::vector<Vec2>{q}; },
                      },
                      s);
}

/// The fundamental-domain cells, each with its preimage cells in the chart.
struct QueryCell {
    Vec2 center;
    std::array<std::int64_t, 4> chart_cells{-1, -1, -1, -1};
    bool interior{true};  // counts for the covering radius
};

inline std::vector<QueryCell> query_cells(const SurfaceModel& s, const FlatChart& c) {
    std::vector<QueryCell> out;
    const double cw = c.cw(), ch = c.ch();
    auto idx = [&](std::int64_t i, std::int64_t j) { return j * c.nx + i; };
    auto center = [&](std::int64_t i, std::int64_t j) {
        return c.origin + Vec2{(static_cast<double>(i) + 0.5) * cw, (static_cast<double>(j) + 0.5) * ch};
    };
    std::visit(overloaded{
                   [&](const Torus&) {
                       for (std::int64_t j = 0; j < c.ny; ++j)
                           for (std::int64_t i = 0; i < c.nx; ++i) out.push_back({center(i, j), {idx(i, j), -1, -1, -1}});
                   },
                   [&](const KleinBottle&) {
                       const std::int64_t n = c.nx;
                       for (std::int64_t j = 0; j < n; ++j)
                           for (std::int64_t i = 0; i < n; ++i)
                               out.push_back({center(i, j), {idx(i, j), idx(n - 1 - i, j + n), -1, -1}});
                   },
                   [&](const RectBilliard&) {
                       const std::int64_t mx = c.nx / 2, my = c.ny / 2;
                       for (std::int64_t j = 0; j < my; ++j)
                           for (std::int64_t i = 0; i < mx; ++i) {
                               const std::int64_t I = c.nx - 1 - i, J = c.ny - 1 - j;
                               out.push_back({center(i, j), {idx(i, j), idx(I, j), idx(i, J), idx(I, J)}});
                           }
                   },
                   [&](const DiskBilliard& m) {
                       const double R = m.radius;
                       for (std::int64_t j = 0; j < c.ny; ++j)
                           for (std::int64_t i = 0; i < c.nx; ++i) {
                               const Vec2 lo = c.origin + Vec2{static_cast<double>(i) * cw, static_cast<double>(j) * ch};
                               const Vec2 hi = lo + Vec2{cw, ch};
                               // nearest and farthest points of the cell from the disk center
                               const Vec2 near{std::clamp(0.0, lo.x, hi.x), std::clamp(0.0, lo.y, hi.y)};
                               const Vec2 far{std::max(std::abs(lo.x), std::abs(hi.x)), std::max(std::abs(lo.y), std::abs(hi.y))};
                               if (near.norm() >= R) continue;
                               out.push_back({center(i, j), {idx(i, j), -1, -1, -1}, far.norm() <= R});
                           }
                   },
                   [&](const CubeSurface&) {},
               },
               s);
    return out;
}

class FlatFrontIndex {
public:
    FlatFrontIndex(const Front& f, double bucket) : surface_(f.surface), chart_(flat_chart(f.surface, bucket)) {
        index_ = SegmentIndex(chart_.origin, chart_.width, chart_.height, chart_.nx, chart_.ny, chart_.periodic);
        for_each_front_segment(f, [&](const FrontSample& a, const FrontSample& b) {
            index_.insert(chart_segment(surface_, chart_, a, b));
        });
    }

    double distance(Vec2 q) const {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec2& p : chart_preimages(surface_, q)) best = std::min(best, index_.nearest(p));
        return best;
    }

    bool empty() const { return index_.size() == 0; }

private:
    SurfaceModel surface_;
    FlatChart chart_;
    SegmentIndex index_;
};

// ---------------------------------------------------------------------------
// Cube charts
// ---------------------------------------------------------------------------

inline int face_index(Face f) { return static_cast<int>(f); }

struct FaceSegment {
    Face face;
    Segment seg;  // in the face's own plane, may run slightly across an edge
};

/// Front segments expressed in face coordinates. A segment crossing an edge
/// is emitted once per face, in each face's plane.
inline std::vector<FaceSegment> cube_face_segments(const Front& f, double side) {
    std::vector<FaceSegment> out;
    for_each_front_segment(f, [&](const FrontSample& a, const FrontSample& b) {
        const Face fa = a.pos.face, fb = b.pos.face;
        if (fa == fb) {
            out.push_back({fa, {a.pos.xy(), b.pos.xy() - a.pos.xy()}});
            return;
        }
        bool adjacent = false;
        for (int e = 0; e < 4; ++e) adjacent = adjacent || neighbor_across(fa, e) == fb;
        if (!adjacent) {
            out.push_back({fa, {a.pos.xy(), {}}});
            out.push_back({fb, {b.pos.xy(), {}}});
            return;
        }
        const Vec2 b_in_a = unfold_neighbor(fa, Placement{}, fb, side).apply(b.pos.xy());
        const Vec2 a_in_b = unfold_neighbor(fb, Placement{}, fa, side).apply(a.pos.xy());
        out.push_back({fa, {a.pos.xy(), b_in_a - a.pos.xy()}});
        out.push_back({fb, {a_in_b, b.pos.xy() - a_in_b}});
    });
    return out;
}

class CubeFrontIndex {
public:
    CubeFrontIndex(const Front& f, double bucket) : side_(std::get<CubeSurface>(f.surface).side) {
        const std::int64_t n = cells_for(side_, bucket);
        for (auto& ix : index_) ix = SegmentIndex({-side_, -side_}, 3.0 * side_, 3.0 * side_, 3 * n, 3 * n, false);
        for (const auto& fs : cube_face_segments(f, side_)) {
            index_[static_cast<std::size_t>(face_index(fs.face))].insert(fs.seg);
            for (int e = 0; e < 4; ++e) {
                const Face g = neighbor_across(fs.face, e);
                const Placement p = unfold_neighbor(g, Placement{}, fs.face, side_);
                index_[static_cast<std::size_t>(face_index(g))].insert({p.apply(fs.seg.a), p.rotate(fs.seg.d)});
            }
        }
        for (const auto& c : f.components)
            for (const auto& s : c.samples)
                if (s.alive) live_.push_back(s.pos);
    }

    double distance(Face face, Vec2 q) const {
        const double d = index_[static_cast<std::size_t>(face_index(face))].nearest(q);
        if (std::isfinite(d)) return d;
        // nothing within the unfolded cross: fall back to pointwise surface distances
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : live_) best = std::min(best, cube_distance(side_, face, q, p.face, p.xy()).distance);
        return best;
    }

private:
    double side_;
    std::array<SegmentIndex, 6> index_;
    std::vector<SurfacePoint> live_;
};

inline double max_over(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

inline DensityReport cube_density(const Front& f, double eps, DensityReport rep) {
    const double side = std::get<CubeSurface>(f.surface).side;
    const std::int64_t n = cells_for(side, eps);
    const double cell = side / static_cast<double>(n);
    std::vector<char> hit(static_cast<std::size_t>(6 * n * n), 0);
    for (const auto& fs : cube_face_segments(f, side)) {
        const std::int64_t base = face_index(fs.face) * n * n;
        traverse_cells(fs.seg.a, fs.seg.a + fs.seg.d, cell, cell, [&](std::int64_t i, std::int64_t j) {
            if (i >= 0 && i < n && j >= 0 && j < n) hit[static_cast<std::size_t>(base + j * n + i)] = 1;
        });
    }
    rep.cells_total = 6 * n * n;
    rep.cells_hit = std::count(hit.begin(), hit.end(), char{1});
    rep.distance_exact = false;

    const CubeFrontIndex index(f, eps);
    std::vector<double> dist(static_cast<std::size_t>(6 * n * n), 0.0);
    parallel::for_each_index(
        dist.size(),
        [&](std::size_t k) {
            const auto face = kAllFaces[k / static_cast<std::size_t>(n * n)];
            const auto r = static_cast<std::int64_t>(k % static_cast<std::size_t>(n * n));
            const Vec2 q{(static_cast<double>(r % n) + 0.5) * cell, (static_cast<double>(r / n) + 0.5) * cell};
            dist[k] = index.distance(face, q);
        },
        64);
    rep.covering_radius = max_over(dist);
    return rep;
}

}  // namespace detail

/**
 * Grid occupancy and covering radius of the front at its current time.
 * Requires eps >= kMinEpsOverHmax * h_max.
 */
inline DensityReport density_report(const Front& f, double eps) {
    require(std::isfinite(eps) && eps > 0.0, "eps must be positive");
    require(eps >= kMinEpsOverHmax * f.params.h_max * (1.0 - 1e-12),
            "eps must be at least " + format_number(kMinEpsOverHmax) + " h_max");
    DensityReport rep;
    rep.t = f.t;
    rep.eps = eps;
    rep.length = front_length(f);
    rep.n_components = static_cast<std::int64_t>(component_count(f));
    if (is_cube(f.surface)) return detail::cube_density(f, eps, rep);

    const detail::FlatChart chart = detail::flat_chart(f.surface, eps);
    std::vector<char> hit(static_cast<std::size_t>(chart.nx * chart.ny), 0);
    detail::for_each_front_segment(f, [&](const FrontSample& a, const FrontSample& b) {
        const detail::Segment s = detail::chart_segment(f.surface, chart, a, b);
        const Vec2 p = s.a - chart.origin;
        detail::traverse_cells(p, p + s.d, chart.cw(), chart.ch(), [&](std::int64_t i, std::int64_t j) {
            if (chart.periodic) {
                i = detail::wrap_index(i, chart.nx);
                j = detail::wrap_index(j, chart.ny);
            } else if (i < 0 || i >= chart.nx || j < 0 || j >= chart.ny) {
                return;
            }
            hit[static_cast<std::size_t>(j * chart.nx + i)] = 1;
        });
    });

    const auto cells = detail::query_cells(f.surface, chart);
    rep.cells_total = static_cast<std::int64_t>(cells.size());
    for (const auto& c : cells) {
        bool any = false;
        for (auto k : c.chart_cells)
            if (k >= 0 && hit[static_cast<std::size_t>(k)]) any = true;
        rep.cells_hit += any ? 1 : 0;
    }

    const detail::FlatFrontIndex index(f, eps);
    std::vector<double> dist(cells.size(), 0.0);
    parallel::for_each_index(
        cells.size(), [&](std::size_t k) { dist[k] = cells[k].interior ? index.distance(cells[k].center) : 0.0; }, 64);
    rep.covering_radius = detail::max_over(dist);
    return rep;
}

/// Distance from q to the sampled front (polyline), on the surface.
inline double front_distance_to(const Front& f, const SurfacePoint& q) {
    const double bucket = std::max(4.0 * f.params.h_max, min_extent(f.surface) / 256.0);
    if (is_cube(f.surface)) return detail::CubeFrontIndex(f, bucket).distance(q.face, q.xy());
    return detail::FlatFrontIndex(f, bucket).distance(q.xy());
}

namespace detail {

/// Ball centres on a grid of spacing at most `spacing` over the surface.
inline std::vector<SurfacePoint> ball_centers(const SurfaceModel& s, double spacing) {
    std::vector<SurfacePoint> out;
    auto grid = [&](double w, double h, Face face) {
        const std::int64_t nx = cells_for(w, spacing), ny = cells_for(h, spacing);
        for (std::int64_t j = 0; j < ny; ++j)
            for (std::int64_t i = 0; i < nx; ++i)
                out.push_back({w * static_cast<double>(i) / static_cast<double>(nx),
                               h * static_cast<double>(j) / static_cast<double>(ny), face});
    };
    std::visit(overloaded{
                   [&](const Torus& m) { grid(m.alpha, m.beta, Face::None); },
                   [&](const KleinBottle&) { grid(1.0, 1.0, Face::None); },
                   [&](const RectBilliard& m) {
                       // include the far walls: the table is closed
                       const std::int64_t nx = cells_for(m.a, spacing), ny = cells_for(m.b, spacing);
                       for (std::int64_t j = 0; j <= ny; ++j)
                           for (std::int64_t i = 0; i <= nx; ++i)
                               out.push_back({m.a * static_cast<double>(i) / static_cast<double>(nx),
                                              m.b * static_cast<double>(j) / static_cast<double>(ny)});
                   },
                   [&](const DiskBilliard& m) {
                       const std::int64_t n = cells_for(m.radius, spacing);
                       const double step = m.radius / static_cast<double>(n);
                       for (std::int64_t j = -n; j <= n; ++j)
                           for (std::int64_t i = -n; i <= n; ++i) {
                               const Vec2 p{static_cast<double>(i) * step, static_cast<double>(j) * step};
                               if (p.norm() <= m.radius) out.push_back({p.x, p.y});
                           }
                   },
                   [&](const CubeSurface& m) {
                       for (Face face : kAllFaces) grid(m.side, m.side, face);
                   },
               },
               s);
    return out;
}

}  // namespace detail

/**
 * Density time tau(P, r) on the checkpoint grid k * delta_t, k * delta_t <= t_max.
 * Every ball of radius r/2 around a grid of centres spaced r/2 must meet the
 * front; tau is the first checkpoint from which that holds at every later
 * checkpoint. Persistence is only checked on this grid.
 */
inline TauEstimate estimate_tau(const SurfaceModel& surface, const SurfacePoint& source, double r, double t_max,
                                double delta_t, const PropagationParams& params) {
    require(std::isfinite(r) && r > 2.0 * params.h_max, "r must exceed 2 h_max");
    require(std::isfinite(delta_t) && delta_t > 0.0, "delta_t must be positive");
    require(std::isfinite(t_max) && t_max >= 0.0, "t_max must be non-negative");
    TauEstimate est;
    est.r = r;
    est.t_max = t_max;
    est.delta_t = delta_t;

    const auto centers = detail::ball_centers(surface, r / 2.0);
    Front f = init_front(surface, source, ArcInterval{}, params);
    const auto last = static_cast<std::int64_t>(std::floor(t_max / delta_t + 1e-9));
    std::optional<double> streak_start;
    for (std::int64_t k = 0; k <= last; ++k) {
        const double t = static_cast<double>(k) * delta_t;
        propagate(f, t);
        std::vector<char> hit(centers.size(), 0);
        const double bucket = std::max(r / 2.0, 4.0 * params.h_max);
        if (is_cube(surface)) {
            const detail::CubeFrontIndex index(f, bucket);
            parallel::for_each_index(
                centers.size(),
                [&](std::size_t i) { hit[i] = index.distance(centers[i].face, centers[i].xy()) <= r / 2.0; }, 64);
        } else {
            const detail::FlatFrontIndex index(f, bucket);
            parallel::for_each_index(
                centers.size(), [&](std::size_t i) { hit[i] = index.distance(centers[i].xy()) <= r / 2.0; }, 64);
        }
        const bool all = std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
        est.checkpoints.emplace_back(t, all);
        if (all) {
            if (!est.first_full_cover_time) est.first_full_cover_time = t;
            if (!streak_start) streak_start = t;
        } else {
            streak_start.reset();
        }
    }
    if (streak_start) {
        est.achieved = true;
        est.tau = *streak_start;
    }
    return est;
}

/// Ordinary least-squares slope of y against x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Front length at each time of t_list, with the slope fitted over t >= median(t_list).
inline LengthCurve length_growth_curve(const SurfaceModel& surface, const SurfacePoint& source,
                                       const std::vector<double>& t_list, const PropagationParams& params) {
    for (std::size_t i = 0; i < t_list.size(); ++i) {
        require(std::isfinite(t_list[i]) && t_list[i] >= 0.0, "times must be finite and non-negative");
        require(i == 0 || t_list[i] > t_list[i - 1], "times must be increasing");
    }
    LengthCurve curve;
    Front f = init_front(surface, source, ArcInterval{}, params);
    for (double t : t_list) {
        propagate(f, t);
        curve.t.push_back(t);
        curve.length.push_back(front_length(f));
    }
    const double m = median(t_list);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < curve.t.size(); ++i)
        if (curve.t[i] >= m) {
            xs.push_back(curve.t[i]);
            ys.push_back(curve.length[i]);
        }
    curve.slope = ols_slope(xs, ys);
    return curve;
}

}  // namespace wavefront
