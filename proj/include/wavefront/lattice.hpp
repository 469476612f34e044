#pragma once
/**
 * @file lattice.hpp
 * @brief Integer lattice counts behind the torus density argument.
 *
 * On the unit torus the front W_t((0,0)) passes through the source exactly
 * when a lattice point lies on the circle of radius t, and comes within h of
 * it when a lattice point lies in the annulus t < |x| <= t + h. This header
 * counts those points by brute force (no asymptotic formulas are used for a
 * count) and checks the numeric steps of the rectangle argument that bounds
 * the covering radius of the unit torus front by 3/sqrt(t).
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "wavefront/core.hpp"
#include "wavefront/metrics.hpp"
#include "wavefront/parallel.hpp"

namespace wavefront {

inline constexpr double kLatticeRadiusLimit = 1e4;

struct LatticeCount {
    double t{0.0};
    double h{0.0};
    std::int64_t N_t{0};
    std::int64_t annulus_count{0};
    double expected_area{0.0};  // 2 pi t h
    double E_t{0.0};            // N_t - pi t^2
    double gauss_bound{0.0};    // sqrt(2) 2 pi t
    bool within_gauss_bound{true};
    bool within_envelope{true};          // |E_t| <= 10 t^(2/3)
    bool annulus_within_envelope{true};  // |count - 2 pi t h| <= 10 ((t+h)^(2/3) + t^(2/3))
};

struct ErrorTerm {
    double E_t{0.0};
    bool within_gauss_bound{true};
    bool within_envelope{true};
};

struct AnnulusCount {
    std::int64_t count{0};
    double expected{0.0};
    bool within_envelope{true};
};

struct RectCheckReport {
    double t{0.0};
    double a{0.0};
    double b{0.0};
    double height{0.0};  // f(b) - f(a)
    double slope_max{0.0};
    double increment_max{0.0};  // max |f(x+1) - f(x)| over the sampled x
    double projected_covering_radius{0.0};
    double bound{0.0};  // 3 / sqrt(t)
    bool slope_ok{false};
    bool height_ok{false};
    bool increment_ok{false};
    bool covering_ok{false};
    bool passed{false};
};

namespace detail {

/// Exact test k <= t^2 for a non-negative integer k.
inline bool within_square(std::int64_t k, double t) {
    const double hi = t * t;
    const double lo = std::fma(t, t, -hi);  // t^2 == hi + lo exactly
    const auto kd = static_cast<double>(k);  // exact below 2^53
    if (kd != hi) return kd < hi;
    return lo >= 0.0;
}

inline void check_radius(double t) {
    require(std::isfinite(t) && t >= 0.0, "radius must be finite and non-negative");
    require(t <= kLatticeRadiusLimit, "radius exceeds the enumeration limit 1e4");
}

}  // namespace detail

/// Number of (m, n) in Z^2 with m^2 + n^2 <= t^2, by enumeration.
inline std::int64_t gauss_count(double t) {
    detail::check_radius(t);
    const auto M = static_cast<std::int64_t>(std::floor(t));
    const auto rows = static_cast<std::size_t>(2 * M + 1);
    std::vector<std::int64_t> per_row(rows, 0);
    parallel::for_each_index(
        rows,
        [&](std::size_t r) {
            const std::int64_t m = static_cast<std::int64_t>(r) - M;
            std::int64_t c = 0;
            for (std::int64_t n = -M; n <= M; ++n) c += detail::within_square(m * m + n * n, t) ? 1 : 0;
            per_row[r] = c;
        },
        64);
    std::int64_t total = 0;
    for (auto c : per_row) total += c;
    return total;
}

inline double annulus_envelope(double t, double h) { return 10.0 * (std::cbrt((t + h) * (t + h)) + std::cbrt(t * t)); }

/// Lattice points with t < |x| <= t + h, next to the area 2 pi t h.
inline AnnulusCount annulus_count(double t, double h) {
    require(std::isfinite(t) && t > 0.0, "t must be positive");
    require(std::isfinite(h) && h >= 0.0, "h must be non-negative");
    detail::check_radius(t + h);
    AnnulusCount out;
    out.count = gauss_count(t + h) - gauss_count(t);
    out.expected = kTwoPi * t * h;
    out.within_envelope = std::abs(static_cast<double>(out.count) - out.expected) <= annulus_envelope(t, h);
    return out;
}

inline double gauss_error_bound(double t) { return std::sqrt(2.0) * kTwoPi * t; }

/// E(t) = N(t) - pi t^2, flagged against the classical bound and the t^(2/3) envelope.
inline ErrorTerm error_term(double t) {
    require(std::isfinite(t) && t > 0.0, "t must be positive");
    detail::check_radius(t);
    ErrorTerm e;
    e.E_t = static_cast<double>(gauss_count(t)) - kPi * t * t;
    e.within_gauss_bound = std::abs(e.E_t) <= gauss_error_bound(t);
    e.within_envelope = std::abs(e.E_t) <= 10.0 * std::cbrt(t * t);
    return e;
}

inline LatticeCount lattice_count(double t, double h) {
    LatticeCount c;
    c.t = t;
    c.h = h;
    const AnnulusCount a = annulus_count(t, h);
    const ErrorTerm e = error_term(t);
    c.N_t = gauss_count(t);
    c.annulus_count = a.count;
    c.expected_area = a.expected;
    c.E_t = e.E_t;
    c.gauss_bound = gauss_error_bound(t);
    c.within_gauss_bound = e.within_gauss_bound;
    c.within_envelope = e.within_envelope;
    c.annulus_within_envelope = a.within_envelope;
    return c;
}

/// min over lattice points L of | |L| - t |: how close W_t((0,0)) on the unit torus comes to its source.
inline double wavefront_return_oracle(double t, double h) {
    require(std::isfinite(t) && t > 0.0, "t must be positive");
    require(std::isfinite(h) && h > 0.0, "h must be positive");
    detail::check_radius(t);
    const auto M = static_cast<std::int64_t>(std::ceil(t)) + 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t m = 0; m <= M; ++m) {
        const double rest = t * t - static_cast<double>(m * m);
        const auto n0 = static_cast<std::int64_t>(std::floor(std::sqrt(std::max(0.0, rest))));
        for (std::int64_t n : {std::int64_t{0}, n0 - 1, n0, n0 + 1, n0 + 2}) {
            if (n < 0) continue;
            best = std::min(best, std::abs(std::hypot(static_cast<double>(m), static_cast<double>(n)) - t));
        }
    }
    return best;
}

/**
 * Numeric check of the rectangle argument at time t. With
 * f(x) = sqrt(t^2 - x^2) on [a, b] = [-2 sqrt(t), -sqrt(2t)], verifies that
 * the slope of f, the height f(b) - f(a) - 1 and the unit increments of f are
 * all within 3/sqrt(t), and that the graph piece wrapped onto the unit torus
 * leaves no point farther than 3/sqrt(t) from it.
 *
 * The covering radius of the wrapped graph is taken over cell centres of a
 * grid of side `grid` and increased by half a cell diagonal, so it bounds the
 * covering radius of the sampled polyline from above.
 */
inline RectCheckReport theorem1_rectangle_check(double t, double h_max = 0.005, double grid = 0.005) {
    require(std::isfinite(t) && t > 36.0 / 5.0, "t must exceed 36/5");
    require(std::isfinite(h_max) && h_max > 0.0, "h_max must be positive");
    require(std::isfinite(grid) && grid > 0.0, "grid must be positive");
    RectCheckReport rep;
    rep.t = t;
    rep.a = -2.0 * std::sqrt(t);
    rep.b = -std::sqrt(2.0 * t);
    rep.bound = 3.0 / std::sqrt(t);
    auto f = [t](double x) { return std::sqrt(t * t - x * x); };

    // |f'(x)| = |x| / sqrt(t^2 - x^2) grows with |x|, so the maximum is at a
    rep.slope_max = std::abs(rep.a) / std::sqrt(t * t - rep.a * rep.a);
    rep.height = f(rep.b) - f(rep.a);
    rep.slope_ok = rep.slope_max <= rep.bound;
    rep.height_ok = std::abs(rep.height - 1.0) <= rep.bound;

    const double width = rep.b - rep.a;
    const auto steps = static_cast<std::int64_t>(std::ceil(width / h_max));
    std::vector<Vec2> graph;
    graph.reserve(static_cast<std::size_t>(steps + 1));
    for (std::int64_t i = 0; i <= steps; ++i) {
        const double x = i == steps ? rep.b : rep.a + width * static_cast<double>(i) / static_cast<double>(steps);
        graph.push_back({x, f(x)});
        if (x + 1.0 <= rep.b) rep.increment_max = std::max(rep.increment_max, std::abs(f(x + 1.0) - f(x)));
    }
    rep.increment_ok = rep.increment_max <= rep.bound;

    // the x spacing is h_max and |f'| < 1, so chords are shorter than sqrt(2) h_max
    const std::int64_t n = detail::cells_for(1.0, grid);
    const double cell = 1.0 / static_cast<double>(n);
    const std::int64_t nb = detail::cells_for(1.0, std::max(grid, rep.bound / 4.0));
    detail::SegmentIndex index({0.0, 0.0}, 1.0, 1.0, nb, nb, true);
    for (std::size_t i = 0; i + 1 < graph.size(); ++i)
        index.insert({{wrap_mod(graph[i].x, 1.0), wrap_mod(graph[i].y, 1.0)}, graph[i + 1] - graph[i]});
    std::vector<double> dist(static_cast<std::size_t>(n * n), 0.0);
    parallel::for_each_index(
        dist.size(),
        [&](std::size_t k) {
            const auto i = static_cast<std::int64_t>(k) % n, j = static_cast<std::int64_t>(k) / n;
            dist[k] = index.nearest({(static_cast<double>(i) + 0.5) * cell, (static_cast<double>(j) + 0.5) * cell});
        },
        256);
    rep.projected_covering_radius = detail::max_over(dist) + cell * std::sqrt(0.5);
    rep.covering_ok = rep.projected_covering_radius <= rep.bound;
    rep.passed = rep.slope_ok && rep.height_ok && rep.increment_ok && rep.covering_ok;
    return rep;
}

}  // namespace wavefront
