// Command-line front end: simulate, measure and render geodesic wave fronts.
//
// Every subcommand writes its result to --out (or stdout). CSV outputs start
// with '#' comment lines that record the full parameter set. Errors produce
// one line on stderr of the form
//
//   error kind=<usage|precondition|numerical|io|parse|verification> message="..."
//
// and the exit codes 1 (usage/precondition), 2 (numerical), 3 (io/parse),
// 4 (verify-theorem1 found a failing check).

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wavefront/wavefront.hpp"

namespace wf = wavefront;

namespace {

struct VerificationFailure : wf::Error {
    using wf::Error::Error;
    const char* kind() const noexcept override { return "verification"; }
};

std::vector<double> parse_time_grid(const std::string& text) {
    const auto parts = wf::detail::split(text, ':');
    wf::require(parts.size() == 3, "time grid must be LO:HI:STEP");
    double lo, hi, step;
    wf::require(wf::parse_number(parts[0], lo) && wf::parse_number(parts[1], hi) && wf::parse_number(parts[2], step),
                "time grid must hold three numbers");
    wf::require(lo >= 0.0 && hi >= lo && step > 0.0, "time grid needs 0 <= LO <= HI and STEP > 0");
    const double count = std::floor((hi - lo) / step + 1e-9);
    wf::require(count < 1e7, "time grid has too many points");
    std::vector<double> out;
    for (std::int64_t k = 0; k <= static_cast<std::int64_t>(count); ++k) out.push_back(lo + static_cast<double>(k) * step);
    return out;
}

wf::ArcInterval parse_arc(const std::string& text) {
    const auto v = wf::detail::parse_numbers(text, ',', 2, "arc");
    return {v[0], v[1]};
}

std::string quote(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c == '\n' ? ' ' : c;
    }
    return out;
}

// Options shared by the subcommands that propagate a front.
struct FrontOptions {
    std::string surface;
    std::string point;
    std::optional<double> h_max;
    std::optional<std::size_t> n0;
    std::optional<double> theta_min;
    std::optional<double> delta_t_check;
    std::optional<std::size_t> sample_budget;

    void add(CLI::App* app, bool required = true) {
        app->add_option("--surface", surface, "torus:A,B | klein | rect:A,B | disk:R | cube:S")->required(required);
        app->add_option("--p", point, "source point x,y or FACE/u/v")->required(required);
        app->add_option("--hmax", h_max, "target sample spacing (default 0.005 x smallest extent)");
        app->add_option("--n0", n0, "initial number of directions (default 1024)");
        app->add_option("--theta-min", theta_min, "smallest bisection width in radians (default 1e-12)");
        app->add_option("--dt-check", delta_t_check, "checkpoint spacing (default 0.5, cube 0.1 x side)");
        app->add_option("--budget", sample_budget, "sample budget per front (default 2^22)");
    }

    wf::SurfaceModel model() const { return wf::parse_surface(surface); }

    wf::PropagationParams params(const wf::SurfaceModel& s) const {
        auto p = wf::PropagationParams::defaults_for(s);
        if (h_max) p.h_max = *h_max;
        if (n0) p.n0 = *n0;
        if (theta_min) p.theta_min = *theta_min;
        if (delta_t_check) p.delta_t_check = *delta_t_check;
        if (sample_budget) p.sample_budget = *sample_budget;
        return p;
    }

    std::string header(const wf::SurfaceModel& s, const wf::PropagationParams& p) const {
        return "# surface=" + wf::format_surface(s) + " p=" + point + " h_max=" + wf::format_number(p.h_max) +
               " theta_min=" + wf::format_number(p.theta_min) + " delta_t_check=" + wf::format_number(p.delta_t_check) +
               " sample_budget=" + std::to_string(p.sample_budget) + " n0=" + std::to_string(p.n0) + "\n";
    }
};

void emit(const std::string& out_path, const std::string& data) {
    if (out_path.empty() || out_path == "-") {
        std::cout << data;
        std::cout.flush();
        if (!std::cout) throw wf::IoError("write to stdout failed");
    } else {
        wf::write_file(out_path, data);
    }
}

std::string command_line(int argc, char** argv) {
    std::string s = "# wavefront";
    for (int i = 1; i < argc; ++i) s += std::string(" ") + argv[i];
    return s + "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"Geodesic wave fronts on flat surfaces"};
    app.require_subcommand(1);
    std::string out;
    const std::string invocation = command_line(argc, argv);

    // simulate
    auto* sim = app.add_subcommand("simulate", "propagate a front and write a JSON snapshot");
    FrontOptions sim_opt;
    sim_opt.add(sim);
    double sim_t = 0.0;
    std::string sim_arc;
    sim->add_option("--t", sim_t, "target time")->required();
    sim->add_option("--arc", sim_arc, "direction interval LO,HI (default the full circle)");
    sim->add_option("--out", out, "output file (default stdout)");

    // density
    auto* den = app.add_subcommand("density", "density reports over a time grid (CSV)");
    FrontOptions den_opt;
    den_opt.add(den);
    std::string den_grid;
    double den_eps = 0.0;
    den->add_option("--t-grid", den_grid, "LO:HI:STEP")->required();
    den->add_option("--eps", den_eps, "grid cell side")->required();
    den->add_option("--out", out, "output file (default stdout)");

    // tau
    auto* tau = app.add_subcommand("tau", "density time tau(P, r) on a checkpoint grid");
    FrontOptions tau_opt;
    tau_opt.add(tau);
    double tau_r = 0.0, tau_tmax = 0.0, tau_dt = 0.0;
    tau->add_option("--r", tau_r, "ball radius")->required();
    tau->add_option("--t-max", tau_tmax, "last time")->required();
    tau->add_option("--dt", tau_dt, "checkpoint spacing")->required();
    tau->add_option("--out", out, "output file (default stdout)");

    // length
    auto* len = app.add_subcommand("length", "front length over a time grid with fitted slope (CSV)");
    FrontOptions len_opt;
    len_opt.add(len);
    std::string len_grid;
    len->add_option("--t-grid", len_grid, "LO:HI:STEP")->required();
    len->add_option("--out", out, "output file (default stdout)");

    // components
    auto* comp = app.add_subcommand("components", "component counts over a time grid, or of a snapshot (CSV)");
    FrontOptions comp_opt;
    comp_opt.add(comp, false);
    std::string comp_grid, comp_in;
    comp->add_option("--t-grid", comp_grid, "LO:HI:STEP");
    comp->add_option("--in", comp_in, "snapshot to count instead of propagating");
    comp->add_option("--out", out, "output file (default stdout)");

    // lattice
    auto* lat = app.add_subcommand("lattice", "Gauss circle counts over a time grid (CSV)");
    lat->set_help_flag("--help", "print this help message and exit");
    std::string lat_grid;
    std::optional<double> lat_h;
    lat->add_option("--t-grid", lat_grid, "LO:HI:STEP")->required();
    lat->add_option("--h", lat_h, "annulus width (default 1/sqrt(t))");
    lat->add_option("--out", out, "output file (default stdout)");

    // verify-theorem1
    auto* ver = app.add_subcommand("verify-theorem1", "check the rectangle argument of the torus density bound");
    std::string ver_grid;
    double ver_hmax = 0.005;
    double ver_query = 0.005;
    ver->add_option("--t-grid", ver_grid, "LO:HI:STEP")->required();
    ver->add_option("--hmax", ver_hmax, "graph sample spacing (default 0.005)");
    ver->add_option("--grid", ver_query, "covering-radius query grid spacing (default 0.005)");
    ver->add_option("--out", out, "output file (default stdout)");

    // render
    auto* ren = app.add_subcommand("render", "draw a snapshot as SVG");
    std::string ren_in;
    int ren_width = 1600;
    bool ren_mono = false;
    ren->add_option("--in", ren_in, "snapshot file")->required();
    ren->add_option("--out", out, "SVG file (default stdout)");
    ren->add_option("--width", ren_width, "image width in pixels");
    ren->add_flag("--mono", ren_mono, "draw every component in the same color");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error kind=usage message=\"" << quote(e.what()) << "\"\n";
        return 1;
    }

    if (!wf::parallel::configure_from_environment())
        throw wf::PreconditionError("WAVEFRONT_THREADS must be a positive integer");

    if (*sim) {
        const auto s = sim_opt.model();
        const auto p = wf::parse_point(s, sim_opt.point);
        const auto params = sim_opt.params(s);
        wf::require(std::isfinite(sim_t) && sim_t >= 0.0, "t must be finite and non-negative");
        const wf::ArcInterval arc = sim_arc.empty() ? wf::ArcInterval{} : parse_arc(sim_arc);
        wf::Front f = wf::init_front(s, p, arc, params);
        wf::propagate(f, sim_t);
        emit(out, wf::emit_snapshot(f));
        return 0;
    }

    if (*den) {
        const auto s = den_opt.model();
        const auto p = wf::parse_point(s, den_opt.point);
        const auto params = den_opt.params(s);
        const auto grid = parse_time_grid(den_grid);
        wf::require(std::isfinite(den_eps) && den_eps >= wf::kMinEpsOverHmax * params.h_max,
                    "eps must be at least " + wf::format_number(wf::kMinEpsOverHmax) + " h_max");
        wf::Front f = wf::init_front(s, p, wf::ArcInterval{}, params);
        std::vector<wf::DensityReport> rows;
        for (double t : grid) {
            wf::propagate(f, t);
            rows.push_back(wf::density_report(f, den_eps));
        }
        std::string text = invocation + den_opt.header(s, params) + "# eps=" + wf::format_number(den_eps) + "\n";
        if (wf::is_cube(s)) text += "# covering_radius uses unfolded distances and is an upper bound\n";
        emit(out, text + wf::emit_series(rows));
        return 0;
    }

    if (*tau) {
        const auto s = tau_opt.model();
        const auto p = wf::parse_point(s, tau_opt.point);
        const auto params = tau_opt.params(s);
        const auto est = wf::estimate_tau(s, p, tau_r, tau_tmax, tau_dt, params);
        std::string text = invocation + tau_opt.header(s, params);
        text += "# persistence is checked on the checkpoint grid only\n";
        text += "r,tau,t_max,delta_t,first_full_cover_time\n";
        text += wf::format_number(est.r) + "," + (est.achieved ? wf::format_number(est.tau) : "not_achieved") + "," +
                wf::format_number(est.t_max) + "," + wf::format_number(est.delta_t) + "," +
                (est.first_full_cover_time ? wf::format_number(*est.first_full_cover_time) : "never") + "\n";
        emit(out, text);
        std::cerr << "tau(r=" << wf::format_number(est.r) << ") = "
                  << (est.achieved ? wf::format_number(est.tau) : "not achieved by t_max=" + wf::format_number(est.t_max))
                  << "\n";
        return 0;
    }

    if (*len) {
        const auto s = len_opt.model();
        const auto p = wf::parse_point(s, len_opt.point);
        const auto params = len_opt.params(s);
        const auto curve = wf::length_growth_curve(s, p, parse_time_grid(len_grid), params);
        std::string text = invocation + len_opt.header(s, params) + "t,length\n";
        for (std::size_t i = 0; i < curve.t.size(); ++i)
            text += wf::format_number(curve.t[i]) + "," + wf::format_number(curve.length[i]) + "\n";
        text += "# slope=" + wf::format_number(curve.slope) + "\n";
        emit(out, text);
        return 0;
    }

    if (*comp) {
        std::string text = invocation;
        if (!comp_in.empty()) {
            const wf::Front f = wf::parse_snapshot(wf::read_file(comp_in));
            text += "t,components\n" + wf::format_number(f.t) + "," +
                    std::to_string(wf::component_count(f)) + "\n";
            emit(out, text);
            return 0;
        }
        wf::require(!comp_opt.surface.empty() && !comp_opt.point.empty() && !comp_grid.empty(),
                    "components needs --in SNAPSHOT or --surface, --p and --t-grid");
        const auto s = comp_opt.model();
        const auto p = wf::parse_point(s, comp_opt.point);
        const auto params = comp_opt.params(s);
        wf::Front f = wf::init_front(s, p, wf::ArcInterval{}, params);
        text += comp_opt.header(s, params) + "t,components\n";
        for (double t : parse_time_grid(comp_grid)) {
            wf::propagate(f, t);
            text += wf::format_number(t) + "," + std::to_string(wf::component_count(f)) + "\n";
        }
        emit(out, text);
        return 0;
    }

    if (*lat) {
        std::vector<wf::LatticeCount> rows;
        for (double t : parse_time_grid(lat_grid)) {
            wf::require(t > 0.0, "lattice times must be positive");
            rows.push_back(wf::lattice_count(t, lat_h ? *lat_h : 1.0 / std::sqrt(t)));
        }
        std::string text = invocation + "# h=" + (lat_h ? wf::format_number(*lat_h) : std::string("1/sqrt(t)")) + "\n";
        emit(out, text + wf::emit_series(rows));
        return 0;
    }

    if (*ver) {
        std::string text = invocation + "# h_max=" + wf::format_number(ver_hmax) +
                           " grid=" + wf::format_number(ver_query) + "\n";
        text += "t,a,b,height,slope_max,increment_max,projected_covering_radius,bound,passed\n";
        bool all = true;
        for (double t : parse_time_grid(ver_grid)) {
            const auto r = wf::theorem1_rectangle_check(t, ver_hmax, ver_query);
            all = all && r.passed;
            text += wf::format_number(r.t) + "," + wf::format_number(r.a) + "," + wf::format_number(r.b) + "," +
                    wf::format_number(r.height) + "," + wf::format_number(r.slope_max) + "," +
                    wf::format_number(r.increment_max) + "," + wf::format_number(r.projected_covering_radius) + "," +
                    wf::format_number(r.bound) + "," + (r.passed ? "true" : "false") + "\n";
        }
        emit(out, text);
        if (!all) throw VerificationFailure("at least one rectangle check failed");
        return 0;
    }

    if (*ren) {
        const wf::Front f = wf::parse_snapshot(wf::read_file(ren_in));
        emit(out, wf::render_svg(f, {ren_width, !ren_mono}));
        return 0;
    }
    return 1;
}

int exit_code(const wf::Error& e) {
    const std::string k = e.kind();
    if (k == "precondition") return 1;
    if (k == "numerical") return 2;
    if (k == "io" || k == "parse") return 3;
    if (k == "verification") return 4;
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const wf::Error& e) {
        std::cerr << "error kind=" << e.kind() << " message=\"" << quote(e.what()) << "\"\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error kind=numerical message=\"" << quote(e.what()) << "\"\n";
        return 2;
    }
}
