#pragma once
/**
 * @file cube.hpp
 * @brief Geometry of the surface of the cube [0,s]^3: face frames, the
 *        24-element rotation group, straight-ray tracing across edges and
 *        an unfolding-based distance.
 *
 * Face frames (origin in units of the side s, axes as integer vectors):
 *
 *   face  origin    e_u   e_v   normal
 *   U     (0,0,1)   +x    +y    +z
 *   D     (0,1,0)   +x    -y    -z
 *   F     (0,0,0)   +x    +z    -y
 *   B     (1,1,0)   -x    +z    +y
 *   L     (0,1,0)   -y    +z    -x
 *   R     (1,0,0)   +y    +z    +x
 *
 * Every frame is right handed with an outward normal, so the frames glue
 * into the net  [L F R B]  with U above F and D below F without flips.
 *
 * A traced ray carries a group element G with G * n(current face) equal to
 * n(start face): the product of the quarter turns that fold each entered
 * face back into the plane of the previous one.
 */

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wavefront/core.hpp"

namespace wavefront {

enum class Face : std::uint8_t { U = 0, D, F, B, L, R, None };

inline constexpr std::array<Face, 6> kAllFaces{Face::U, Face::D, Face::F, Face::B, Face::L, Face::R};

inline char face_char(Face f) {
    constexpr char names[] = "UDFBLR?";
    return names[static_cast<int>(f)];
}

inline std::optional<Face> face_from_char(char c) {
    switch (c) {
        case 'U': return Face::U;
        case 'D': return Face::D;
        case 'F': return Face::F;
        case 'B': return Face::B;
        case 'L': return Face::L;
        case 'R': return Face::R;
        default: return std::nullopt;
    }
}

struct IVec3 {
    int x{0}, y{0}, z{0};
    constexpr bool operator==(const IVec3&) const = default;
    constexpr IVec3 operator-() const { return {-x, -y, -z}; }
    constexpr IVec3 operator+(const IVec3& r) const { return {x + r.x, y + r.y, z + r.z}; }
    constexpr int dot(const IVec3& r) const { return x * r.x + y * r.y + z * r.z; }
    constexpr IVec3 cross(const IVec3& r) const {
        return {y * r.z - z * r.y, z * r.x - x * r.z, x * r.y - y * r.x};
    }
};

struct DVec3 {
    double x{0}, y{0}, z{0};
    double dot(const IVec3& r) const { return x * r.x + y * r.y + z * r.z; }
};

/// Element of the rotation group of the cube, stored as a signed
/// permutation matrix (row major).
struct CubeRotation {
    std::array<std::int8_t, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static constexpr CubeRotation identity() { return {}; }

    constexpr bool operator==(const CubeRotation&) const = default;

    constexpr CubeRotation operator*(const CubeRotation& r) const {
        CubeRotation out;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                int acc = 0;
                for (int k = 0; k < 3; ++k) acc += m[i * 3 + k] * r.m[k * 3 + j];
                out.m[i * 3 + j] = static_cast<std::int8_t>(acc);
            }
        return out;
    }

    constexpr IVec3 apply(const IVec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    DVec3 apply(const DVec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    /// Signed permutation matrix with determinant +1.
    constexpr bool is_member() const {
        for (int i = 0; i < 3; ++i) {
            int row = 0, col = 0;
            for (int j = 0; j < 3; ++j) {
                const int a = m[i * 3 + j], b = m[j * 3 + i];
                if (a < -1 || a > 1) return false;
                row += a * a;
                col += b * b;
            }
            if (row != 1 || col != 1) return false;
        }
        const int det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
                        m[2] * (m[3] * m[7] - m[4] * m[6]);
        return det == 1;
    }

    /// Quarter turn about the common edge of two adjacent faces that maps
    /// the normal `to` onto the normal `from`.
    static constexpr CubeRotation fold(const IVec3& from, const IVec3& to) {
        const IVec3 a = from.cross(to);
        const IVec3 basis[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        CubeRotation r;
        for (int j = 0; j < 3; ++j) {
            const IVec3& e = basis[j];
            const IVec3 ax = a.cross(e);
            const int ad = a.dot(e);
            const IVec3 col{ad * a.x - ax.x, ad * a.y - ax.y, ad * a.z - ax.z};
            r.m[0 * 3 + j] = static_cast<std::int8_t>(col.x);
            r.m[1 * 3 + j] = static_cast<std::int8_t>(col.y);
            r.m[2 * 3 + j] = static_cast<std::int8_t>(col.z);
        }
        return r;
    }
};

/// All 24 rotations, enumerated as signed permutation matrices with det +1.
inline std::vector<CubeRotation> all_cube_rotations() {
    std::vector<CubeRotation> out;
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (const auto& p : perms)
        for (int signs = 0; signs < 8; ++signs) {
            CubeRotation r;
            r.m.fill(0);
            for (int i = 0; i < 3; ++i) r.m[i * 3 + p[i]] = (signs >> i) & 1 ? -1 : 1;
            if (r.is_member()) out.push_back(r);
        }
    return out;
}

struct FaceFrame {
    IVec3 origin;  // in units of the side length
    IVec3 eu, ev, n;
};

inline const FaceFrame& face_frame(Face f) {
    static const std::array<FaceFrame, 6> frames{{
        {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}},    // U
        {{0, 1, 0}, {1, 0, 0}, {0, -1, 0}, {0, 0, -1}},  // D
        {{0, 0, 0}, {1, 0, 0}, {0, 0, 1}, {0, -1, 0}},   // F
        {{1, 1, 0}, {-1, 0, 0}, {0, 0, 1}, {0, 1, 0}},   // B
        {{0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {-1, 0, 0}},  // L
        {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 0}},    // R
    }};
    return frames.at(static_cast<std::size_t>(f));
}

inline Face face_with_normal(const IVec3& n) {
    for (Face f : kAllFaces)
        if (face_frame(f).n == n) return f;
    throw PreconditionError("not a cube face normal");
}

inline DVec3 face_to_space(Face f, double side, Vec2 uv) {
    const FaceFrame& fr = face_frame(f);
    return {fr.origin.x * side + uv.x * fr.eu.x + uv.y * fr.ev.x,
            fr.origin.y * side + uv.x * fr.eu.y + uv.y * fr.ev.y,
            fr.origin.z * side + uv.x * fr.eu.z + uv.y * fr.ev.z};
}

inline Vec2 space_to_face(Face f, double side, const DVec3& p) {
    const FaceFrame& fr = face_frame(f);
    const DVec3 rel{p.x - fr.origin.x * side, p.y - fr.origin.y * side, p.z - fr.origin.z * side};
    return {rel.dot(fr.eu), rel.dot(fr.ev)};
}

/// In-plane outward normal of one of the four edges of a face:
/// 0 -> u = 0, 1 -> u = s, 2 -> v = 0, 3 -> v = s.
inline IVec3 edge_outward(Face f, int edge) {
    const FaceFrame& fr = face_frame(f);
    switch (edge) {
        case 0: return -fr.eu;
        case 1: return fr.eu;
        case 2: return -fr.ev;
        default: return fr.ev;
    }
}

inline Face neighbor_across(Face f, int edge) { return face_with_normal(edge_outward(f, edge)); }

// ---------------------------------------------------------------------------
// Ray tracing
// ---------------------------------------------------------------------------

inline constexpr double kCornerTolerance = 1e-9;           // times the side length
inline constexpr std::uint64_t kEventBudget = 10'000'000;  // face crossings per ray

struct CubeTrace {
    Face face{Face::None};
    Vec2 uv;                         // position at the query time (or at death)
    CubeRotation group;              // G * n(face) == n(start face)
    std::vector<Face> face_history;  // faces entered, starting with the source face
    bool alive{true};
    double death_time{std::numeric_limits<double>::infinity()};
};

inline bool near_cube_vertex(double side, Vec2 uv) {
    const double tol = kCornerTolerance * side;
    for (double cu : {0.0, side})
        for (double cv : {0.0, side})
            if (std::hypot(uv.x - cu, uv.y - cv) <= tol) return true;
    return false;
}

/**
 * Walks a unit-speed straight ray from `uv` on `face` in the local direction
 * `dir` (unit length) up to time t. Each traversed face segment is tested
 * against the four face corners; the first approach within the corner
 * tolerance kills the ray and freezes it at that point.
 */
inline CubeTrace trace_cube_ray(double side, Face face, Vec2 uv, Vec2 dir, double t) {
    CubeTrace tr;
    tr.face = face;
    tr.face_history.push_back(face);
    const double tol = kCornerTolerance * side;
    const double inf = std::numeric_limits<double>::infinity();

    Vec2 p = uv;
    Vec2 d = dir;
    double t0 = 0.0;
    std::uint64_t events = 0;

    for (;;) {
        const double tu = d.x > 0 ? (side - p.x) / d.x : (d.x < 0 ? -p.x / d.x : inf);
        const double tv = d.y > 0 ? (side - p.y) / d.y : (d.y < 0 ? -p.y / d.y : inf);
        const double exit = std::max(0.0, std::min(tu, tv));
        const double horizon = std::min(exit, t - t0);

        // closest approach to each corner along [0, exit], reported only if reached by t
        double hit = inf;
        for (double cu : {0.0, side})
            for (double cv : {0.0, side}) {
                const Vec2 w{cu - p.x, cv - p.y};
                const double lambda = std::clamp(w.dot(d), 0.0, exit);
                if (lambda > horizon) continue;
                const Vec2 c = p + d * lambda;
                if (std::hypot(c.x - cu, c.y - cv) <= tol) hit = std::min(hit, lambda);
            }
        if (hit < inf) {
            tr.uv = p + d * hit;
            tr.alive = false;
            tr.death_time = t0 + hit;
            return tr;
        }
        if (t0 + exit >= t) {
            tr.uv = p + d * (t - t0);
            return tr;
        }

        if (++events > kEventBudget)
            throw NumericalFailure("cube ray exceeded the face-crossing budget");

        // cross the edge with the smaller exit time
        int edge;
        Vec2 q = p + d * exit;
        if (tu <= tv) {
            edge = d.x > 0 ? 1 : 0;
            q.x = edge == 1 ? side : 0.0;
            q.y = std::clamp(q.y, 0.0, side);
        } else {
            edge = d.y > 0 ? 3 : 2;
            q.y = edge == 3 ? side : 0.0;
            q.x = std::clamp(q.x, 0.0, side);
        }

        const Face from = tr.face;
        const FaceFrame& ff = face_frame(from);
        const IVec3 m = edge_outward(from, edge);
        const Face to = face_with_normal(m);
        const FaceFrame& ft = face_frame(to);

        const DVec3 q3 = face_to_space(from, side, q);
        const DVec3 d3{d.x * ff.eu.x + d.y * ff.ev.x, d.x * ff.eu.y + d.y * ff.ev.y,
                       d.x * ff.eu.z + d.y * ff.ev.z};
        const double w = d3.dot(m);
        // fold over the edge: the outward component turns into -n(from)
        const DVec3 d3n{d3.x - w * (m.x + ff.n.x), d3.y - w * (m.y + ff.n.y),
                        d3.z - w * (m.z + ff.n.z)};

        Vec2 qn = space_to_face(to, side, q3);
        // the shared edge is the edge of `to` whose outward normal is n(from)
        if (ft.eu == ff.n) qn.x = side;
        else if (ft.eu == -ff.n) qn.x = 0.0;
        else if (ft.ev == ff.n) qn.y = side;
        else qn.y = 0.0;
        qn.x = std::clamp(qn.x, 0.0, side);
        qn.y = std::clamp(qn.y, 0.0, side);

        tr.group = tr.group * CubeRotation::fold(ff.n, ft.n);
        tr.face = to;
        tr.face_history.push_back(to);
        p = qn;
        d = {d3n.dot(ft.eu), d3n.dot(ft.ev)};
        t0 += exit;
    }
}

// ---------------------------------------------------------------------------
// Unfolding
// ---------------------------------------------------------------------------

/// Orientation-preserving placement of a face in the plane of a reference face:
/// plane = rot(k) * uv + offset, rot(k) a rotation by k quarter turns.
struct Placement {
    int quarter_turns{0};
    Vec2 offset;

    Vec2 apply(Vec2 uv) const {
        Vec2 r = uv;
        for (int i = 0; i < quarter_turns; ++i) r = {-r.y, r.x};
        return r + offset;
    }
    Vec2 rotate(Vec2 v) const {
        for (int i = 0; i < quarter_turns; ++i) v = {-v.y, v.x};
        return v;
    }
};

/// Endpoints (local coordinates of face f) of the edge shared by faces f and g.
inline std::pair<Vec2, Vec2> shared_edge(Face f, Face g, double side) {
    for (int e = 0; e < 4; ++e) {
        if (neighbor_across(f, e) != g) continue;
        switch (e) {
            case 0: return {{0, 0}, {0, side}};
            case 1: return {{side, 0}, {side, side}};
            case 2: return {{0, 0}, {side, 0}};
            default: return {{0, side}, {side, side}};
        }
    }
    throw PreconditionError("faces are not adjacent");
}

/// Places neighbor g of face f (already placed by pf) across their shared edge.
inline Placement unfold_neighbor(Face f, const Placement& pf, Face g, double side) {
    auto [a, b] = shared_edge(f, g, side);
    const Vec2 a_plane = pf.apply(a), b_plane = pf.apply(b);
    const Vec2 a_g = space_to_face(g, side, face_to_space(f, side, a));
    const Vec2 b_g = space_to_face(g, side, face_to_space(f, side, b));
    const Vec2 target = b_plane - a_plane;
    Placement pg;
    for (int k = 0; k < 4; ++k) {
        pg.quarter_turns = k;
        const Vec2 r = pg.rotate(b_g - a_g);
        if (std::abs(r.x - target.x) + std::abs(r.y - target.y) < 1e-9 * side) break;
    }
    pg.offset = a_plane - pg.rotate(a_g);
    return pg;
}

struct CubeDistance {
    double distance;
    bool exact;  // true when realized by a straight unfolding shorter than the side
};

namespace detail {
// Parameter s along p + s*(q-p) where it meets the line through a,b; and the
// parameter along a->b of that crossing.
inline bool line_crossing(Vec2 p, Vec2 q, Vec2 a, Vec2 b, double& along_pq, double& along_ab) {
    const Vec2 r = q - p, e = b - a;
    const double den = r.cross(e);
    if (std::abs(den) < 1e-300) return false;
    const Vec2 w = a - p;
    along_pq = w.cross(e) / den;
    along_ab = w.cross(r) / den;
    return true;
}
}  // namespace detail

/**
 * Shortest path between two cube-surface points over all unfoldings through
 * at most three faces. A chain whose straight segment leaves the unfolded
 * faces contributes the length of the bent path through the clamped edge
 * crossings instead, which is still a realizable path and hence an upper
 * bound.
 */
inline CubeDistance cube_distance(double side, Face f1, Vec2 q1, Face f2, Vec2 q2) {
    if (f1 == f2) return {(q1 - q2).norm(), true};

    const double eps = 1e-12 * side;
    double best = std::numeric_limits<double>::infinity();
    bool best_exact = false;
    const Placement p1{};

    auto consider = [&](double len, bool straight) {
        if (len < best || (len == best && straight)) {
            best = len;
            best_exact = straight;
        }
    };

    for (int e1 = 0; e1 < 4; ++e1) {
        const Face g = neighbor_across(f1, e1);
        const Placement pg = unfold_neighbor(f1, p1, g, side);
        auto [a1l, b1l] = shared_edge(f1, g, side);
        const Vec2 a1 = p1.apply(a1l), b1 = p1.apply(b1l);

        if (g == f2) {
            const Vec2 q = pg.apply(q2);
            double s, u;
            if (detail::line_crossing(q1, q, a1, b1, s, u)) {
                const double uc = std::clamp(u, 0.0, 1.0);
                const bool straight = u >= -eps && u <= 1.0 + eps;
                const Vec2 c = a1 + (b1 - a1) * uc;
                consider(straight ? (q - q1).norm() : (c - q1).norm() + (q - c).norm(), straight);
            }
            continue;
        }
        for (int e2 = 0; e2 < 4; ++e2) {
            const Face h = neighbor_across(g, e2);
            if (h != f2) continue;
            const Placement ph = unfold_neighbor(g, pg, h, side);
            auto [a2l, b2l] = shared_edge(g, h, side);
            const Vec2 a2 = pg.apply(a2l), b2 = pg.apply(b2l);
            const Vec2 q = ph.apply(q2);
            double s1, u1, s2, u2;
            if (!detail::line_crossing(q1, q, a1, b1, s1, u1)) continue;
            if (!detail::line_crossing(q1, q, a2, b2, s2, u2)) continue;
            const bool straight = u1 >= -eps && u1 <= 1.0 + eps && u2 >= -eps && u2 <= 1.0 + eps &&
                                  s1 >= -eps && s1 <= s2 + eps && s2 <= 1.0 + eps;
            if (straight) {
                consider((q - q1).norm(), true);
                continue;
            }
            const Vec2 c1 = a1 + (b1 - a1) * std::clamp(u1, 0.0, 1.0);
            double s3, u3;
            Vec2 c2 = a2 + (b2 - a2) * std::clamp(u2, 0.0, 1.0);
            if (detail::line_crossing(c1, q, a2, b2, s3, u3))
                c2 = a2 + (b2 - a2) * std::clamp(u3, 0.0, 1.0);
            consider((c1 - q1).norm() + (c2 - c1).norm() + (q - c2).norm(), false);
        }
    }
    return {best, best_exact && best < side};
}

}  // namespace wavefront
