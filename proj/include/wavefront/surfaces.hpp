#pragma once
/**
 * @file surfaces.hpp
 * @brief Flat surface models and their exponential maps.
 *
 * Supported models:
 *   - Torus{alpha, beta}   R^2 / (alpha Z x beta Z)
 *   - KleinBottle          unit square, (0,y)~(1,y), (x,0)~(1-x,1); the group
 *                          is generated by (x,y)->(x+1,y) and (x,y)->(1-x,y+1)
 *   - RectBilliard{a, b}   [0,a]x[0,b] with mirror walls
 *   - DiskBilliard{R}      disk of radius R centered at the origin
 *   - CubeSurface{s}       surface of [0,s]^3 (see cube.hpp)
 *
 * exp_point evaluates the unit-speed geodesic at an arbitrary time without
 * stepping. On the torus, Klein bottle and rectangle the straight lift in
 * the plane is reduced in closed form. The disk uses the fact that all
 * chords of one billiard orbit have the same length and subtend the same
 * central angle, so the k-th rim hit is a rotation of the first one. The
 * cube walks the ray edge by edge.
 *
 * All functions are pure.
 */

#include <array>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wavefront/core.hpp"
#include "wavefront/cube.hpp"

namespace wavefront {

struct Torus {
    double alpha{1.0};
    double beta{1.0};
    bool operator==(const Torus&) const = default;
};
struct KleinBottle {
    bool operator==(const KleinBottle&) const = default;
};
struct RectBilliard {
    double a{1.0};
    double b{1.0};
    bool operator==(const RectBilliard&) const = default;
};
struct DiskBilliard {
    double radius{1.0};
    bool operator==(const DiskBilliard&) const = default;
};
struct CubeSurface {
    double side{1.0};
    bool operator==(const CubeSurface&) const = default;
};

using SurfaceModel = std::variant<Torus, KleinBottle, RectBilliard, DiskBilliard, CubeSurface>;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// (x, y) in the fundamental domain, or (u, v) on `face` for the cube.
struct SurfacePoint {
    double x{0.0};
    double y{0.0};
    Face face{Face::None};
    bool operator==(const SurfacePoint&) const = default;
    Vec2 xy() const { return {x, y}; }
};

/// Position of the straight lift in the plane. For the cube this is the
/// development into the plane of the source face; `group` maps the current
/// face frame back to the source face frame.
struct CoverPoint {
    double x{0.0};
    double y{0.0};
    CubeRotation group{};
    std::int32_t reflections{0};  // rim hits, disk only
    bool operator==(const CoverPoint&) const = default;
    Vec2 xy() const { return {x, y}; }
};

struct ExpResult {
    SurfacePoint pos;
    CoverPoint cover;
    bool alive{true};
    double death_time{std::numeric_limits<double>::infinity()};
    std::vector<Face> face_history;  // cube only
};

inline constexpr std::int64_t kReflectionBudget = 10'000'000;

inline bool is_cube(const SurfaceModel& s) { return std::holds_alternative<CubeSurface>(s); }
inline bool is_disk(const SurfaceModel& s) { return std::holds_alternative<DiskBilliard>(s); }

inline void validate_surface(const SurfaceModel& s) {
    auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    std::visit(overloaded{
                   [&](const Torus& m) { require(pos(m.alpha) && pos(m.beta), "torus periods must be positive"); },
                   [](const KleinBottle&) {},
                   [&](const RectBilliard& m) { require(pos(m.a) && pos(m.b), "rectangle sides must be positive"); },
                   [&](const DiskBilliard& m) { require(pos(m.radius), "disk radius must be positive"); },
                   [&](const CubeSurface& m) { require(pos(m.side), "cube side must be positive"); },
               },
               s);
}

/// Smallest linear extent of the surface; default resolutions scale with it.
inline double min_extent(const SurfaceModel& s) {
    return std::visit(overloaded{
                          [](const Torus& m) { return std::min(m.alpha, m.beta); },
                          [](const KleinBottle&) { return 1.0; },
                          [](const RectBilliard& m) { return std::min(m.a, m.b); },
                          [](const DiskBilliard& m) { return 2.0 * m.radius; },
                          [](const CubeSurface& m) { return m.side; },
                      },
                      s);
}

inline void validate_point(const SurfaceModel& s, const SurfacePoint& p) {
    validate_surface(s);
    require(std::isfinite(p.x) && std::isfinite(p.y), "point coordinates must be finite");
    auto in = [](double v, double hi) { return v >= 0.0 && v <= hi; };
    std::visit(overloaded{
                   [&](const Torus& m) {
                       require(p.face == Face::None && in(p.x, m.alpha) && in(p.y, m.beta),
                               "torus point outside [0,alpha]x[0,beta]");
                   },
                   [&](const KleinBottle&) {
                       require(p.face == Face::None && in(p.x, 1.0) && in(p.y, 1.0),
                               "Klein bottle point outside the unit square");
                   },
                   [&](const RectBilliard& m) {
                       require(p.face == Face::None && in(p.x, m.a) && in(p.y, m.b),
                               "billiard point outside the table");
                   },
                   [&](const DiskBilliard& m) {
                       require(p.face == Face::None && p.x * p.x + p.y * p.y <= m.radius * m.radius,
                               "billiard point outside the disk");
                   },
                   [&](const CubeSurface& m) {
                       require(p.face != Face::None && in(p.x, m.side) && in(p.y, m.side),
                               "cube point needs a face and (u,v) in [0,side]");
                       require(!near_cube_vertex(m.side, p.xy()), "cube point coincides with a vertex");
                   },
               },
               s);
}

// ---------------------------------------------------------------------------
// Quotient maps
// ---------------------------------------------------------------------------

/// Folding of the line onto [0, a] with period 2a: x on [0,a], 2a - x on [a,2a].
inline double tent(double x, double a) { return a - std::abs(wrap_mod(x, 2.0 * a) - a); }

inline SurfacePoint reduce_torus(const Torus& m, Vec2 lift) {
    return {wrap_mod(lift.x, m.alpha), wrap_mod(lift.y, m.beta)};
}

/// Applies the inverse glide floor(y) times, then the unit translation.
inline SurfacePoint reduce_klein(Vec2 lift) {
    const double k = std::floor(lift.y);
    const double y = lift.y - k;
    double x = lift.x;
    if (std::fmod(k, 2.0) != 0.0) x = 1.0 - x;
    return {wrap_mod(x, 1.0), y};
}

inline SurfacePoint reduce_rect(const RectBilliard& m, Vec2 lift) {
    return {tent(lift.x, m.a), tent(lift.y, m.b)};
}

// ---------------------------------------------------------------------------
// Disk billiard
// ---------------------------------------------------------------------------

struct DiskState {
    Vec2 pos;
    std::int64_t reflections{0};
};

inline DiskState disk_exp(double R, Vec2 p, Vec2 v, double t) {
    const double b = p.dot(v);
    const double c = p.dot(p) - R * R;
    const double h = std::sqrt(std::max(0.0, b * b - c));  // half chord
    const double s0 = -b + h;                             // first rim hit
    if (t <= s0) return {p + v * t, 0};

    const Vec2 h0 = p + v * s0;
    const double psi0 = std::atan2(h0.y, h0.x);
    const double ang_mom = p.cross(v);
    const double sgn = ang_mom >= 0.0 ? 1.0 : -1.0;
    const double chord = 2.0 * h;

    if (chord <= 1e-15 * R) {
        // tangent ray from a rim point: the limit orbit creeps along the rim
        const double psi = psi0 + sgn * (t - s0) / R;
        return {{R * std::cos(psi), R * std::sin(psi)}, 0};
    }

    const double k = std::floor((t - s0) / chord);
    if (k >= static_cast<double>(kReflectionBudget))
        throw NumericalFailure("disk ray exceeded the reflection budget");
    const double tau = (t - s0) - k * chord;
    const double step = 2.0 * std::acos(std::min(1.0, std::abs(ang_mom) / R));
    const double psi_k = psi0 + sgn * k * step;
    const double psi_n = psi_k + sgn * step;
    const Vec2 hk{R * std::cos(psi_k), R * std::sin(psi_k)};
    const Vec2 hn{R * std::cos(psi_n), R * std::sin(psi_n)};
    return {hk + (hn - hk) * (tau / chord), static_cast<std::int64_t>(k) + 1};
}

// ---------------------------------------------------------------------------
// Exponential map
// ---------------------------------------------------------------------------

/// Geodesic from p with unit direction `dir` (local frame of p's face for
/// the cube), evaluated at time t. No validation; see exp_point.
inline ExpResult exp_ray(const SurfaceModel& s, const SurfacePoint& p, Vec2 dir, double t) {
    ExpResult r;
    const Vec2 lift = p.xy() + dir * t;
    r.cover.x = lift.x;
    r.cover.y = lift.y;
    std::visit(overloaded{
                   [&](const Torus& m) { r.pos = reduce_torus(m, lift); },
                   [&](const KleinBottle&) { r.pos = reduce_klein(lift); },
                   [&](const RectBilliard& m) { r.pos = reduce_rect(m, lift); },
                   [&](const DiskBilliard& m) {
                       const DiskState st = disk_exp(m.radius, p.xy(), dir, t);
                       r.pos = {st.pos.x, st.pos.y};
                       r.cover.reflections = static_cast<std::int32_t>(st.reflections);
                   },
                   [&](const CubeSurface& m) {
                       CubeTrace tr = trace_cube_ray(m.side, p.face, p.xy(), dir, t);
                       r.pos = {tr.uv.x, tr.uv.y, tr.face};
                       r.cover.group = tr.group;
                       r.alive = tr.alive;
                       r.death_time = tr.death_time;
                       r.face_history = std::move(tr.face_history);
                   },
               },
               s);
    return r;
}

inline void validate_ray(const SurfaceModel& s, const SurfacePoint& p, double theta, double t) {
    validate_point(s, p);
    require(std::isfinite(theta) && theta >= 0.0 && theta < kTwoPi, "theta must lie in [0, 2pi)");
    require(std::isfinite(t) && t >= 0.0, "time must be finite and non-negative");
}

/// exp_P(t (cos theta, sin theta)).
inline ExpResult exp_point(const SurfaceModel& s, const SurfacePoint& p, double theta, double t) {
    validate_ray(s, p, theta, t);
    return exp_ray(s, p, unit_direction(theta), t);
}

/// Checked cube-ray entry point on a SurfacePoint (theta in the source face frame).
inline CubeTrace trace_cube_ray(double side, const SurfacePoint& p, double theta, double t) {
    validate_ray(CubeSurface{side}, p, theta, t);
    return trace_cube_ray(side, p.face, p.xy(), unit_direction(theta), t);
}

// ---------------------------------------------------------------------------
// Distance
// ---------------------------------------------------------------------------

inline double surface_distance(const SurfaceModel& s, const SurfacePoint& q1, const SurfacePoint& q2) {
    return std::visit(
        overloaded{
            [&](const Torus& m) {
                double best = std::numeric_limits<double>::infinity();
                for (int i = -1; i <= 1; ++i)
                    for (int j = -1; j <= 1; ++j)
                        best = std::min(best, std::hypot(q2.x + i * m.alpha - q1.x, q2.y + j * m.beta - q1.y));
                return best;
            },
            [&](const KleinBottle&) {
                // images g(q2) with |dy| <= 1 and |dx| <= 1 contain the nearest one
                double best = std::numeric_limits<double>::infinity();
                for (int j = -1; j <= 1; ++j) {
                    const double x = (j == 0) ? q2.x : 1.0 - q2.x;
                    for (int i = -1; i <= 1; ++i)
                        best = std::min(best, std::hypot(x + i - q1.x, q2.y + j - q1.y));
                }
                return best;
            },
            [&](const RectBilliard& m) {
                // preimages of q2 under the folding map, one period around q1
                double best = std::numeric_limits<double>::infinity();
                for (double sx : {1.0, -1.0})
                    for (double sy : {1.0, -1.0})
                        for (int i = -1; i <= 1; ++i)
                            for (int j = -1; j <= 1; ++j)
                                best = std::min(best, std::hypot(sx * q2.x + 2.0 * i * m.a - q1.x,
                                                                 sy * q2.y + 2.0 * j * m.b - q1.y));
                return best;
            },
            [&](const DiskBilliard&) { return std::hypot(q1.x - q2.x, q1.y - q2.y); },
            [&](const CubeSurface& m) { return cube_distance(m.side, q1.face, q1.xy(), q2.face, q2.xy()).distance; },
        },
        s);
}

// ---------------------------------------------------------------------------
// Text grammar:  torus:alpha,beta | klein | rect:a,b | disk:radius | cube:side
// Points:        x,y   or   FACE/u/v
// ---------------------------------------------------------------------------

namespace detail {
inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::vector<double> parse_numbers(std::string_view s, char sep, std::size_t expected,
                                         std::string_view what) {
    auto parts = split(s, sep);
    require(parts.size() == expected, "expected " + std::to_string(expected) + " numbers in " + std::string(what));
    std::vector<double> out;
    for (auto p : parts) {
        double v;
        require(parse_number(p, v), "invalid number '" + std::string(p) + "' in " + std::string(what));
        out.push_back(v);
    }
    return out;
}
}  // namespace detail

inline SurfaceModel parse_surface(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view kind = text.substr(0, colon);
    const std::string_view args = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    SurfaceModel s;
    if (kind == "klein") {
        require(colon == std::string_view::npos, "klein takes no parameters");
        s = KleinBottle{};
    } else {
        require(colon != std::string_view::npos, "unknown surface '" + std::string(text) + "'");
        if (kind == "torus") {
            auto v = detail::parse_numbers(args, ',', 2, text);
            s = Torus{v[0], v[1]};
        } else if (kind == "rect") {
            auto v = detail::parse_numbers(args, ',', 2, text);
            s = RectBilliard{v[0], v[1]};
        } else if (kind == "disk") {
            s = DiskBilliard{detail::parse_numbers(args, ',', 1, text)[0]};
        } else if (kind == "cube") {
            s = CubeSurface{detail::parse_numbers(args, ',', 1, text)[0]};
        } else {
            throw PreconditionError("unknown surface '" + std::string(text) + "'");
        }
    }
    validate_surface(s);
    return s;
}

inline std::string format_surface(const SurfaceModel& s) {
    return std::visit(overloaded{
                          [](const Torus& m) { return "torus:" + format_number(m.alpha) + "," + format_number(m.beta); },
                          [](const KleinBottle&) { return std::string("klein"); },
                          [](const RectBilliard& m) { return "rect:" + format_number(m.a) + "," + format_number(m.b); },
                          [](const DiskBilliard& m) { return "disk:" + format_number(m.radius); },
                          [](const CubeSurface& m) { return "cube:" + format_number(m.side); },
                      },
                      s);
}

/// Parses and validates a point for the given surface.
inline SurfacePoint parse_point(const SurfaceModel& s, std::string_view text) {
    SurfacePoint p;
    if (is_cube(s)) {
        auto parts = detail::split(text, '/');
        require(parts.size() == 3 && parts[0].size() == 1, "cube points are written FACE/u/v");
        auto face = face_from_char(parts[0][0]);
        require(face.has_value(), "unknown cube face '" + std::string(parts[0]) + "'");
        require(parse_number(parts[1], p.x) && parse_number(parts[2], p.y), "invalid cube point coordinates");
        p.face = *face;
    } else {
        auto v = detail::parse_numbers(text, ',', 2, text);
        p.x = v[0];
        p.y = v[1];
    }
    validate_point(s, p);
    return p;
}

inline std::string format_point(const SurfacePoint& p) {
    if (p.face != Face::None)
        return std::string(1, face_char(p.face)) + "/" + format_number(p.x) + "/" + format_number(p.y);
    return format_number(p.x) + "," + format_number(p.y);
}

}  // namespace wavefront
