#pragma once
/**
 * @file frontier.hpp
 * @brief The wave front W_t(P) as adaptively refined polylines over
 *        intervals of initial directions.
 *
 * A Front holds, for the current time t, one or more components. Each
 * component is a theta-ordered run of samples exp_P(t (cos theta, sin theta)).
 * Propagation moves through checkpoints on the absolute grid k * delta_t_check
 * (so splitting one propagate call into several never changes the result
 * when the stops are on that grid). At every checkpoint all samples are
 * re-evaluated and every adjacent pair whose separation exceeds h_max is
 * bisected in theta, in increasing theta order.
 *
 * Separation between neighbours is measured in the universal cover where
 * one exists (torus, Klein bottle, rectangle, cube development). There it
 * is the exact chord of the lifted circle, so no wrap-around can hide an
 * unresolved arc. The disk uses the chord in the table.
 *
 * On the cube two neighbours whose face histories are not prefixes of one
 * another have a vertex between them. Such a pair is bisected until a
 * direction that runs into the vertex is found (it dies) or the theta gap
 * drops below theta_min; either way the component is split there.
 */

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wavefront/core.hpp"
#include "wavefront/parallel.hpp"
#include "wavefront/surfaces.hpp"

namespace wavefront {

struct ArcInterval {
    double theta_lo{0.0};
    double theta_hi{kTwoPi};

    bool full() const { return theta_hi - theta_lo >= kTwoPi; }
    double width() const { return theta_hi - theta_lo; }
    bool operator==(const ArcInterval&) const = default;
};

struct FrontSample {
    double theta{0.0};
    SurfacePoint pos;
    CoverPoint cover;
    bool alive{true};
    double death_time{std::numeric_limits<double>::infinity()};
    std::vector<Face> face_history;  // cube only
    Vec2 dir;                        // cached (cos theta, sin theta)
};

struct FrontComponent {
    ArcInterval interval;
    std::vector<FrontSample> samples;
    double split_time{0.0};
    bool closed{false};  // the whole circle of directions, last sample joins the first

    std::size_t live_count() const {
        return static_cast<std::size_t>(
            std::count_if(samples.begin(), samples.end(), [](const FrontSample& s) { return s.alive; }));
    }
};

struct DeadDirection {
    double theta{0.0};
    double death_time{0.0};
    bool operator==(const DeadDirection&) const = default;
};

struct PropagationParams {
    double h_max{0.005};
    double theta_min{1e-12};
    double delta_t_check{0.5};
    std::size_t sample_budget{std::size_t{1} << 22};
    std::size_t n0{1024};

    bool operator==(const PropagationParams&) const = default;

    static PropagationParams defaults_for(const SurfaceModel& s) {
        PropagationParams p;
        p.h_max = 0.005 * min_extent(s);
        if (const auto* c = std::get_if<CubeSurface>(&s)) p.delta_t_check = 0.1 * c->side;
        return p;
    }
};

struct Front {
    SurfaceModel surface;
    SurfacePoint source;
    double t{0.0};
    ArcInterval arc;
    std::vector<FrontComponent> components;
    std::vector<DeadDirection> dead_directions;
    PropagationParams params;
};

// ---------------------------------------------------------------------------

inline FrontSample make_sample(const SurfaceModel& s, const SurfacePoint& source, double theta, double t) {
    FrontSample out;
    out.theta = theta;
    out.dir = unit_direction(theta);
    ExpResult r = exp_ray(s, source, out.dir, t);
    out.pos = r.pos;
    out.cover = r.cover;
    out.alive = r.alive;
    out.death_time = r.death_time;
    out.face_history = std::move(r.face_history);
    return out;
}

inline void reevaluate(const SurfaceModel& s, const SurfacePoint& source, FrontSample& smp, double t) {
    ExpResult r = exp_ray(s, source, smp.dir, t);
    smp.pos = r.pos;
    smp.cover = r.cover;
    smp.alive = r.alive;
    smp.death_time = r.death_time;
    smp.face_history = std::move(r.face_history);
}

inline bool histories_compatible(const std::vector<Face>& a, const std::vector<Face>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    return std::equal(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n), b.begin());
}

/// Length of the polyline edge between two neighbouring live samples.
inline double sample_gap(const SurfaceModel& s, const FrontSample& a, const FrontSample& b) {
    if (is_disk(s)) return std::hypot(a.pos.x - b.pos.x, a.pos.y - b.pos.y);
    if (is_cube(s) && !histories_compatible(a.face_history, b.face_history))
        return std::numeric_limits<double>::infinity();
    return std::hypot(a.cover.x - b.cover.x, a.cover.y - b.cover.y);
}

inline void validate_params(const PropagationParams& p, const ArcInterval& arc) {
    require(std::isfinite(p.h_max) && p.h_max > 0.0, "h_max must be positive");
    require(std::isfinite(p.theta_min) && p.theta_min > 0.0, "theta_min must be positive");
    require(std::isfinite(p.delta_t_check) && p.delta_t_check > 0.0, "delta_t_check must be positive");
    require(p.sample_budget > 0, "sample budget must be positive");
    require(p.n0 >= 4, "n0 must be at least 4");
    require(std::isfinite(arc.theta_lo) && std::isfinite(arc.theta_hi) && arc.theta_lo <= arc.theta_hi &&
                arc.width() <= kTwoPi,
            "arc must satisfy lo <= hi and hi - lo <= 2pi");
    require(p.theta_min < arc.width(), "theta_min must be smaller than the arc width");
}

/**
 * Front at t = 0 with n0 equally spaced directions. A partial arc gets both
 * endpoints; the full circle gets n0 distinct directions spaced 2pi/n0 and a
 * closed component.
 */
inline Front init_front(const SurfaceModel& surface, const SurfacePoint& source, ArcInterval arc,
                        PropagationParams params) {
    validate_point(surface, source);
    validate_params(params, arc);
    Front f;
    f.surface = surface;
    f.source = source;
    f.arc = arc;
    f.params = params;

    FrontComponent c;
    c.interval = arc;
    c.closed = arc.full();
    const std::size_t n = params.n0;
    c.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double theta;
        if (c.closed) theta = arc.theta_lo + kTwoPi * static_cast<double>(i) / static_cast<double>(n);
        else if (i + 1 == n) theta = arc.theta_hi;
        else theta = arc.theta_lo + arc.width() * static_cast<double>(i) / static_cast<double>(n - 1);
        c.samples.push_back(make_sample(surface, source, theta, 0.0));
    }
    f.components.push_back(std::move(c));
    return f;
}

inline Front init_front(const SurfaceModel& surface, const SurfacePoint& source, ArcInterval arc, std::size_t n0) {
    PropagationParams p = PropagationParams::defaults_for(surface);
    p.n0 = n0;
    return init_front(surface, source, arc, p);
}

namespace detail {

struct Run {
    std::vector<FrontSample> samples;
    double lo{0.0};
    double hi{0.0};
    double split_time{0.0};
};

/// Rebuilds one component at the current time: bisects unresolved gaps and
/// cuts at dead samples and at tears.
class ComponentRefiner {
public:
    ComponentRefiner(const Front& front, std::size_t& sample_total, std::vector<DeadDirection>& dead)
        : front_(front), total_(sample_total), dead_(dead) {}

    std::vector<FrontComponent> refine(FrontComponent& comp) {
        comp_ = &comp;
        runs_.clear();
        splits_ = 0;
        runs_.push_back(Run{{}, comp.interval.theta_lo, comp.interval.theta_hi, comp.split_time});

        auto& in = comp.samples;
        for (std::size_t i = 0; i < in.size(); ++i) step(in[i], true);

        if (comp.closed && !in.empty()) {
            FrontSample wrap = in.front();
            wrap.theta += kTwoPi;
            step(wrap, false);
        }
        return assemble(comp);
    }

private:
    void split(double boundary_theta, double when) {
        ++splits_;
        runs_.back().hi = boundary_theta;
        runs_.back().split_time = std::max(runs_.back().split_time, when);
        runs_.push_back(Run{{}, boundary_theta, comp_->interval.theta_hi, when});
    }

    void kill(const FrontSample& s, bool record) {
        if (record) dead_.push_back({s.theta, s.death_time});
        split(s.theta, s.death_time);
    }

    void step(FrontSample& b, bool record_dead) {
        if (!b.alive) {
            if (record_dead) --total_;  // dead samples leave the front
            kill(b, record_dead);
            return;
        }
        bridge(b);
        runs_.back().samples.push_back(std::move(b));
    }

    // Resolves the gap between the current run's last sample and b.
    void bridge(const FrontSample& b) {
        const auto& cur = runs_.back().samples;
        if (cur.empty()) return;
        const FrontSample& a = cur.back();
        if (sample_gap(front_.surface, a, b) <= front_.params.h_max) return;
        if (b.theta - a.theta < front_.params.theta_min) {
            split(0.5 * (a.theta + b.theta), front_.t);
            return;
        }
        const double mid = 0.5 * (a.theta + b.theta);
        if (++total_ > front_.params.sample_budget)
            throw NumericalFailure("sample budget exceeded in component [" + format_number(comp_->interval.theta_lo) +
                                   ", " + format_number(comp_->interval.theta_hi) + "] at t=" +
                                   format_number(front_.t));
        FrontSample m = make_sample(front_.surface, front_.source, mid, front_.t);
        if (!m.alive) {
            --total_;
            kill(m, true);
            return;
        }
        bridge(m);
        runs_.back().samples.push_back(std::move(m));
        bridge(b);
    }

    std::vector<FrontComponent> assemble(const FrontComponent& comp) {
        std::vector<FrontComponent> out;
        if (comp.closed) {
            Run& last = runs_.back();
            if (splits_ == 0) {
                last.samples.pop_back();  // the wrapped copy of the first sample
                out.push_back({comp.interval, std::move(last.samples), comp.split_time, true});
                return out;
            }
            const bool first_alive = comp.samples.front().alive;
            if (first_alive && last.samples.size() == 1 && runs_.size() > 1) {
                // cut inside the wrap gap: the first run starts at that boundary
                runs_.front().lo = last.lo - kTwoPi;
                runs_.front().split_time = std::max(runs_.front().split_time, last.split_time);
                runs_.pop_back();
            } else if (first_alive) {
                // the wrapped copy ends the last run: glue the last run onto the first one
                last.samples.pop_back();
                Run& first = runs_.front();
                for (auto& s : first.samples) {
                    // keep dir == unit_direction(theta) so a sample is a function of theta alone
                    s.theta += kTwoPi;
                    s.dir = unit_direction(s.theta);
                    reevaluate(front_.surface, front_.source, s, front_.t);
                    last.samples.push_back(std::move(s));
                }
                last.hi = first.hi + kTwoPi;
                last.split_time = std::max(last.split_time, first.split_time);
                runs_.erase(runs_.begin());
            }
        }
        for (auto& r : runs_) {
            if (r.samples.empty()) continue;
            out.push_back({{r.lo, r.hi}, std::move(r.samples), r.split_time, false});
        }
        return out;
    }

    const Front& front_;
    std::size_t& total_;
    std::vector<DeadDirection>& dead_;
    FrontComponent* comp_{nullptr};
    std::vector<Run> runs_;
    std::size_t splits_{0};
};

inline void advance_to(Front& f, double t) {
    f.t = t;
    for (auto& c : f.components) {
        auto& smp = c.samples;
        parallel::for_each_index(
            smp.size(), [&](std::size_t i) { reevaluate(f.surface, f.source, smp[i], t); }, 1024);
    }

    std::size_t total = 0;
    for (const auto& c : f.components) total += c.samples.size();

    std::vector<FrontComponent> next;
    ComponentRefiner refiner(f, total, f.dead_directions);
    for (auto& c : f.components) {
        auto parts = refiner.refine(c);
        for (auto& p : parts) next.push_back(std::move(p));
    }
    std::stable_sort(next.begin(), next.end(), [](const FrontComponent& a, const FrontComponent& b) {
        return a.interval.theta_lo < b.interval.theta_lo;
    });
    f.components = std::move(next);
}

}  // namespace detail

/// Advances the front to t_target through the checkpoint grid.
inline void propagate(Front& f, double t_target) {
    require(std::isfinite(t_target) && t_target >= f.t, "target time must be finite and not before the front");
    const double dt = f.params.delta_t_check;
    while (f.t < t_target) {
        double k = std::floor(f.t / dt) + 1.0;
        double next = k * dt;
        if (next <= f.t) next = (k + 1.0) * dt;
        detail::advance_to(f, std::min(next, t_target));
    }
}

inline Front propagated(Front f, double t_target) {
    propagate(f, t_target);
    return f;
}

/// Immersed length: sum of the polyline edges over all components, counted
/// with multiplicity.
inline double front_length(const Front& f) {
    double total = 0.0;
    for (const auto& c : f.components) {
        const auto& s = c.samples;
        for (std::size_t i = 1; i < s.size(); ++i)
            if (s[i - 1].alive && s[i].alive) total += sample_gap(f.surface, s[i - 1], s[i]);
        if (c.closed && s.size() > 1) total += sample_gap(f.surface, s.back(), s.front());
    }
    return total;
}

/// Components with at least two live samples.
inline std::size_t component_count(const Front& f) {
    return static_cast<std::size_t>(std::count_if(f.components.begin(), f.components.end(),
                                                  [](const FrontComponent& c) { return c.live_count() >= 2; }));
}

inline std::size_t sample_count(const Front& f) {
    std::size_t n = 0;
    for (const auto& c : f.components) n += c.samples.size();
    return n;
}

}  // namespace wavefront
