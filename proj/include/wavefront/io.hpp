#pragma once
/**
 * @file io.hpp
 * @brief Front snapshots (JSON), SVG rendering and CSV series.
 *
 * Snapshot layout, version 1:
 *
 *   {
 *     "version": 1,
 *     "surface": "torus:1,1",
 *     "source": "0,0",                  // "U/0.5/0.5" on the cube
 *     "t": 2.5,
 *     "arc": [0, 6.283185307179586],
 *     "params": {"h_max": ..., "theta_min": ..., "delta_t_check": ...,
 *                "sample_budget": ..., "n0": ...},
 *     "components": [
 *       {"interval": [lo, hi], "split_time": 0, "closed": true,
 *        "samples": [[theta, x, y, alive], ...]}      // [theta, "F", u, v, alive] on the cube
 *     ],
 *     "dead_directions": [[theta, death_time], ...]
 *   }
 *
 * Numbers are written as shortest round-trip decimals. Parsing rebuilds
 * every sample from (surface, source, theta, t) and rejects a document
 * whose stored positions disagree with that.
 */

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "wavefront/core.hpp"
#include "wavefront/frontier.hpp"
#include "wavefront/lattice.hpp"
#include "wavefront/metrics.hpp"
#include "wavefront/surfaces.hpp"

namespace wavefront {

inline constexpr int kSnapshotVersion = 1;

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path);
    return data;
}

inline void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << data;
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Snapshot
// ---------------------------------------------------------------------------

namespace detail {

/// Shortest round-trip decimal that a JSON reader will treat as floating point.
inline std::string json_number(double v) {
    std::string s = format_number(v);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace detail

inline std::string emit_snapshot(const Front& f) {
    using detail::json_number;
    std::string o;
    o += "{\n";
    o += "  \"version\": " + std::to_string(kSnapshotVersion) + ",\n";
    o += "  \"surface\": " + detail::json_string(format_surface(f.surface)) + ",\n";
    o += "  \"source\": " + detail::json_string(format_point(f.source)) + ",\n";
    o += "  \"t\": " + json_number(f.t) + ",\n";
    o += "  \"arc\": [" + json_number(f.arc.theta_lo) + ", " + json_number(f.arc.theta_hi) + "],\n";
    o += "  \"params\": {\"h_max\": " + json_number(f.params.h_max) +
         ", \"theta_min\": " + json_number(f.params.theta_min) +
         ", \"delta_t_check\": " + json_number(f.params.delta_t_check) +
         ", \"sample_budget\": " + std::to_string(f.params.sample_budget) +
         ", \"n0\": " + std::to_string(f.params.n0) + "},\n";
    o += "  \"components\": [";
    for (std::size_t c = 0; c < f.components.size(); ++c) {
        const auto& comp = f.components[c];
        o += c == 0 ? "\n" : ",\n";
        o += "    {\"interval\": [" + json_number(comp.interval.theta_lo) + ", " + json_number(comp.interval.theta_hi) +
             "], \"split_time\": " + json_number(comp.split_time) +
             ", \"closed\": " + (comp.closed ? "true" : "false") + ", \"samples\": [";
        for (std::size_t i = 0; i < comp.samples.size(); ++i) {
            const auto& s = comp.samples[i];
            o += i == 0 ? "\n      [" : ",\n      [";
            o += json_number(s.theta) + ", ";
            if (s.pos.face != Face::None) o += std::string("\"") + face_char(s.pos.face) + "\", ";
            o += json_number(s.pos.x) + ", " + json_number(s.pos.y) + ", " + (s.alive ? "true" : "false") + "]";
        }
        o += comp.samples.empty() ? "]}" : "\n    ]}";
    }
    o += f.components.empty() ? "],\n" : "\n  ],\n";
    o += "  \"dead_directions\": [";
    for (std::size_t i = 0; i < f.dead_directions.size(); ++i) {
        o += i == 0 ? "" : ", ";
        o += "[" + json_number(f.dead_directions[i].theta) + ", " + json_number(f.dead_directions[i].death_time) + "]";
    }
    o += "]\n}\n";
    return o;
}

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

/// Semantic errors are located at the first occurrence of the offending key.
class SnapshotReader {
public:
    explicit SnapshotReader(const std::string& text) : text_(text) {}

    [[noreturn]] void fail(const std::string& what, const std::string& key = {}) const {
        std::size_t offset = 0;
        if (!key.empty()) {
            const auto p = text_.find("\"" + key + "\"");
            if (p != std::string::npos) offset = p;
        }
        const auto [line, col] = line_column(text_, offset);
        throw ParseError("snapshot: " + what, line, col);
    }

    const nlohmann::json& field(const nlohmann::json& obj, const std::string& key) const {
        auto it = obj.find(key);
        if (it == obj.end()) fail("missing key '" + key + "'");
        return *it;
    }

    double number(const nlohmann::json& v, const std::string& key) const {
        if (!v.is_number()) fail("'" + key + "' must be a number", key);
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail("'" + key + "' must be finite", key);
        return d;
    }

    std::size_t count(const nlohmann::json& v, const std::string& key) const {
        if (!v.is_number_unsigned()) fail("'" + key + "' must be a non-negative integer", key);
        return v.get<std::size_t>();
    }

    bool flag(const nlohmann::json& v, const std::string& key) const {
        if (!v.is_boolean()) fail("'" + key + "' must be true or false", key);
        return v.get<bool>();
    }

    void exact_keys(const nlohmann::json& obj, std::initializer_list<const char*> keys, const std::string& where) const {
        if (!obj.is_object()) fail(where + " must be an object", where);
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool known = false;
            for (const char* k : keys) known = known || it.key() == k;
            if (!known) fail("unknown key '" + it.key() + "' in " + where, it.key());
        }
        for (const char* k : keys)
            if (!obj.contains(k)) fail("missing key '" + std::string(k) + "' in " + where, where);
    }

    ArcInterval interval(const nlohmann::json& v, const std::string& key) const {
        if (!v.is_array() || v.size() != 2) fail("'" + key + "' must be [lo, hi]", key);
        return {number(v[0], key), number(v[1], key)};
    }

private:
    const std::string& text_;
};

}  // namespace detail

inline Front parse_snapshot(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        const auto [line, col] = detail::line_column(text, offset);
        throw ParseError(std::string("snapshot: malformed JSON: ") + e.what(), line, col);
    }
    const detail::SnapshotReader rd(text);
    rd.exact_keys(doc, {"version", "surface", "source", "t", "arc", "params", "components", "dead_directions"},
                  "document");

    const auto& version = doc["version"];
    if (!version.is_number_integer() || version.get<std::int64_t>() != kSnapshotVersion)
        rd.fail("unsupported version (expected " + std::to_string(kSnapshotVersion) + ")", "version");

    Front f;
    if (!doc["surface"].is_string()) rd.fail("'surface' must be a string", "surface");
    try {
        f.surface = parse_surface(doc["surface"].get<std::string>());
    } catch (const PreconditionError& e) {
        rd.fail(e.what(), "surface");
    }
    if (!doc["source"].is_string()) rd.fail("'source' must be a string", "source");
    try {
        f.source = parse_point(f.surface, doc["source"].get<std::string>());
    } catch (const PreconditionError& e) {
        rd.fail(e.what(), "source");
    }
    f.t = rd.number(doc["t"], "t");
    if (f.t < 0.0) rd.fail("'t' must be non-negative", "t");
    f.arc = rd.interval(doc["arc"], "arc");

    const auto& p = doc["params"];
    rd.exact_keys(p, {"h_max", "theta_min", "delta_t_check", "sample_budget", "n0"}, "params");
    f.params.h_max = rd.number(p["h_max"], "h_max");
    f.params.theta_min = rd.number(p["theta_min"], "theta_min");
    f.params.delta_t_check = rd.number(p["delta_t_check"], "delta_t_check");
    f.params.sample_budget = rd.count(p["sample_budget"], "sample_budget");
    f.params.n0 = rd.count(p["n0"], "n0");
    try {
        validate_params(f.params, f.arc);
    } catch (const PreconditionError& e) {
        rd.fail(e.what(), "params");
    }

    const double tol = 1e-9 * min_extent(f.surface);
    const auto& comps = doc["components"];
    if (!comps.is_array()) rd.fail("'components' must be an array", "components");
    double prev_lo = -std::numeric_limits<double>::infinity();
    for (const auto& jc : comps) {
        rd.exact_keys(jc, {"interval", "split_time", "closed", "samples"}, "component");
        FrontComponent c;
        c.interval = rd.interval(jc["interval"], "interval");
        if (c.interval.theta_lo > c.interval.theta_hi) rd.fail("component interval has lo > hi", "interval");
        if (c.interval.theta_lo < prev_lo) rd.fail("components are not sorted by theta_lo", "interval");
        prev_lo = c.interval.theta_lo;
        c.split_time = rd.number(jc["split_time"], "split_time");
        c.closed = rd.flag(jc["closed"], "closed");
        const auto& js = jc["samples"];
        if (!js.is_array()) rd.fail("'samples' must be an array", "samples");
        for (const auto& row : js) {
            const bool cube = is_cube(f.surface);
            const std::size_t width = cube ? 5 : 4;
            if (!row.is_array() || row.size() != width)
                rd.fail(cube ? "cube sample must be [theta, face, u, v, alive]" : "sample must be [theta, x, y, alive]",
                        "samples");
            const double theta = rd.number(row[0], "samples");
            SurfacePoint stored;
            std::size_t k = 1;
            if (cube) {
                if (!row[1].is_string() || row[1].get<std::string>().size() != 1 ||
                    !face_from_char(row[1].get<std::string>()[0]))
                    rd.fail("invalid face in sample", "samples");
                stored.face = *face_from_char(row[1].get<std::string>()[0]);
                k = 2;
            }
            stored.x = rd.number(row[k], "samples");
            stored.y = rd.number(row[k + 1], "samples");
            const bool alive = rd.flag(row[k + 2], "samples");
            if (!c.samples.empty() && theta <= c.samples.back().theta)
                rd.fail("samples are not strictly increasing in theta", "samples");

            FrontSample s = make_sample(f.surface, f.source, theta, f.t);
            if (s.alive != alive || s.pos.face != stored.face || std::abs(s.pos.x - stored.x) > tol ||
                std::abs(s.pos.y - stored.y) > tol)
                rd.fail("sample at theta " + format_number(theta) + " does not match the exponential map", "samples");
            s.pos = stored;
            c.samples.push_back(std::move(s));
        }
        f.components.push_back(std::move(c));
    }

    const auto& dead = doc["dead_directions"];
    if (!dead.is_array()) rd.fail("'dead_directions' must be an array", "dead_directions");
    for (const auto& d : dead) {
        if (!d.is_array() || d.size() != 2) rd.fail("dead direction must be [theta, death_time]", "dead_directions");
        f.dead_directions.push_back({rd.number(d[0], "dead_directions"), rd.number(d[1], "dead_directions")});
    }
    return f;
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

struct SvgOptions {
    int width_px{1600};
    bool color_by_component{true};
};

namespace detail {

inline const char* palette(std::size_t i) {
    static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                             "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
    return colors[i % (sizeof colors / sizeof colors[0])];
}

inline std::string fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s(buf);
    if (s == "-0.000") s = "0.000";
    return s;
}

/// Maps surface points to the drawing plane (y up, in surface units).
struct Layout {
    double width{1.0}, height{1.0};
    double cube_side{0.0};
    Vec2 origin;  // lower left corner of the drawing in surface units

    Vec2 place(const SurfacePoint& p) const {
        if (p.face == Face::None) return p.xy() - origin;
        // cross net: row L F R B, U above F, D below F
        Vec2 cell;
        switch (p.face) {
            case Face::L: cell = {0, 1}; break;
            case Face::F: cell = {1, 1}; break;
            case Face::R: cell = {2, 1}; break;
            case Face::B: cell = {3, 1}; break;
            case Face::U: cell = {1, 2}; break;
            default: cell = {1, 0}; break;
        }
        return cell * cube_side + p.xy();
    }
};

inline Layout layout_for(const SurfaceModel& s) {
    Layout l;
    std::visit(overloaded{
                   [&](const Torus& m) { l.width = m.alpha, l.height = m.beta; },
                   [&](const KleinBottle&) {},
                   [&](const RectBilliard& m) { l.width = m.a, l.height = m.b; },
                   [&](const DiskBilliard& m) {
                       l.width = l.height = 2.0 * m.radius;
                       l.origin = {-m.radius, -m.radius};
                   },
                   [&](const CubeSurface& m) {
                       l.cube_side = m.side;
                       l.width = 4.0 * m.side;
                       l.height = 3.0 * m.side;
                   },
               },
               s);
    return l;
}

}  // namespace detail

/**
 * One <path> per component; a sub-path ends wherever consecutive samples
 * are not joined on the drawing (a wrap across the fundamental domain or a
 * change of cube face). A front at t = 0 is drawn as a dot at the source.
 */
inline std::string render_svg(const Front& f, const SvgOptions& opt = {}) {
    require(opt.width_px > 0, "width must be positive");
    const detail::Layout lay = detail::layout_for(f.surface);
    const double scale = static_cast<double>(opt.width_px) / lay.width;
    const double H = lay.height * scale;
    auto X = [&](Vec2 p) { return detail::fixed(p.x * scale); };
    auto Y = [&](Vec2 p) { return detail::fixed(H - p.y * scale); };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opt.width_px << "\" height=\""
      << detail::fixed(H) << "\" viewBox=\"0 0 " << opt.width_px << " " << detail::fixed(H) << "\">\n";
    o << "<title>" << format_surface(f.surface) << " source " << format_point(f.source) << " t="
      << format_number(f.t) << "</title>\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << opt.width_px << "\" height=\"" << detail::fixed(H)
      << "\" fill=\"white\"/>\n";

    // domain outline
    const char* outline = "fill=\"none\" stroke=\"#999999\" stroke-width=\"1\"";
    if (is_disk(f.surface)) {
        const double R = std::get<DiskBilliard>(f.surface).radius;
        o << "<circle cx=\"" << X({R, R}) << "\" cy=\"" << Y({R, R}) << "\" r=\"" << detail::fixed(R * scale) << "\" "
          << outline << "/>\n";
    } else if (is_cube(f.surface)) {
        for (Face face : kAllFaces) {
            const Vec2 lo = lay.place({0, 0, face}), hi = lay.place({lay.cube_side, lay.cube_side, face});
            o << "<rect x=\"" << X(lo) << "\" y=\"" << Y(hi) << "\" width=\"" << detail::fixed((hi.x - lo.x) * scale)
              << "\" height=\"" << detail::fixed((hi.y - lo.y) * scale) << "\" " << outline << "/>\n";
            o << "<text x=\"" << detail::fixed((lo.x + 0.04 * lay.cube_side) * scale) << "\" y=\""
              << detail::fixed(H - (hi.y - 0.1 * lay.cube_side) * scale) << "\" font-size=\""
              << detail::fixed(0.08 * lay.cube_side * scale) << "\" fill=\"#999999\">" << face_char(face)
              << "</text>\n";
        }
    } else {
        o << "<rect x=\"0\" y=\"0\" width=\"" << opt.width_px << "\" height=\"" << detail::fixed(H) << "\" " << outline
          << "/>\n";
    }

    const double stroke = std::max(1.0, opt.width_px / 800.0);
    if (f.t == 0.0) {
        const Vec2 p = lay.place(f.source);
        o << "<circle cx=\"" << X(p) << "\" cy=\"" << Y(p) << "\" r=\"" << detail::fixed(3.0 * stroke)
          << "\" fill=\"" << detail::palette(0) << "\"/>\n";
        o << "</svg>\n";
        return o.str();
    }

    auto joined = [&](const FrontSample& a, const FrontSample& b) {
        if (!a.alive || !b.alive || a.pos.face != b.pos.face) return false;
        if (is_disk(f.surface)) return true;
        const double drawn = (a.pos.xy() - b.pos.xy()).norm();
        const double true_gap = sample_gap(f.surface, a, b);
        return std::isfinite(true_gap) && drawn <= 1.5 * true_gap + 1e-12 * lay.width;
    };

    for (std::size_t ci = 0; ci < f.components.size(); ++ci) {
        const auto& c = f.components[ci];
        const auto& s = c.samples;
        std::string d;
        bool open = false;
        auto point = [&](const FrontSample& smp, bool move) {
            const Vec2 p = lay.place(smp.pos);
            d += (d.empty() ? "" : " ") + std::string(move ? "M" : "L") + X(p) + " " + Y(p);
        };
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!s[i].alive) {
                open = false;
                continue;
            }
            point(s[i], !(open && joined(s[i - 1], s[i])));
            open = true;
        }
        if (c.closed && s.size() > 1 && open && joined(s.back(), s.front())) point(s.front(), false);
        if (d.empty()) continue;
        const char* color = opt.color_by_component ? detail::palette(ci) : detail::palette(0);
        o << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
          << detail::fixed(stroke) << "\" stroke-linejoin=\"round\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kDensityHeader = "t,covering_radius,cells_hit_fraction,length,components";
inline constexpr const char* kLatticeHeader = "t,h,N_t,annulus_count,expected_area,E_t,gauss_bound";

inline std::string emit_series(const std::vector<DensityReport>& rows) {
    std::string o = std::string(kDensityHeader) + "\n";
    for (const auto& r : rows)
        o += format_number(r.t) + "," + format_number(r.covering_radius) + "," + format_number(r.cells_hit_fraction()) +
             "," + format_number(r.length) + "," + format_number(r.n_components) + "\n";
    return o;
}

inline std::string emit_series(const std::vector<LatticeCount>& rows) {
    std::string o = std::string(kLatticeHeader) + "\n";
    for (const auto& r : rows)
        o += format_number(r.t) + "," + format_number(r.h) + "," + format_number(r.N_t) + "," +
             format_number(r.annulus_count) + "," + format_number(r.expected_area) + "," + format_number(r.E_t) + "," +
             format_number(r.gauss_bound) + "\n";
    return o;
}

}  // namespace wavefront
