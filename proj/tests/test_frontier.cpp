#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "wavefront/frontier.hpp"
#include "wavefront/parallel.hpp"

using namespace wavefront;

namespace {

Front run(const SurfaceModel& s, SurfacePoint p, double t, PropagationParams params) {
    Front f = init_front(s, p, ArcInterval{}, params);
    propagate(f, t);
    return f;
}

Front run(const SurfaceModel& s, SurfacePoint p, double t) { return run(s, p, t, PropagationParams::defaults_for(s)); }

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void expect_identical(const Front& a, const Front& b) {
    ASSERT_EQ(a.components.size(), b.components.size());
    for (std::size_t c = 0; c < a.components.size(); ++c) {
        const auto& x = a.components[c];
        const auto& y = b.components[c];
        ASSERT_EQ(x.samples.size(), y.samples.size());
        EXPECT_TRUE(same_bits(x.interval.theta_lo, y.interval.theta_lo));
        EXPECT_TRUE(same_bits(x.interval.theta_hi, y.interval.theta_hi));
        EXPECT_TRUE(same_bits(x.split_time, y.split_time));
        for (std::size_t i = 0; i < x.samples.size(); ++i) {
            EXPECT_TRUE(same_bits(x.samples[i].theta, y.samples[i].theta));
            EXPECT_TRUE(same_bits(x.samples[i].pos.x, y.samples[i].pos.x));
            EXPECT_TRUE(same_bits(x.samples[i].pos.y, y.samples[i].pos.y));
        }
    }
    EXPECT_EQ(a.dead_directions, b.dead_directions);
}

void expect_resolved(const Front& f) {
    for (const auto& c : f.components) {
        const auto& s = c.samples;
        for (std::size_t i = 1; i < s.size(); ++i) {
            EXPECT_LT(s[i - 1].theta, s[i].theta);
            if (s[i - 1].alive && s[i].alive)
                EXPECT_LE(surface_distance(f.surface, s[i - 1].pos, s[i].pos), f.params.h_max + 1e-12);
        }
        if (c.closed && s.size() > 1)
            EXPECT_LE(surface_distance(f.surface, s.back().pos, s.front().pos), f.params.h_max + 1e-12);
    }
}

const SurfacePoint kCubeCenter{0.5, 0.5, Face::U};

}  // namespace

TEST(InitFront, FullCircleAtTimeZero) {
    const Front f = init_front(Torus{1, 1}, {0, 0}, ArcInterval{}, std::size_t{8});
    ASSERT_EQ(f.components.size(), 1u);
    ASSERT_EQ(f.components[0].samples.size(), 8u);
    EXPECT_TRUE(f.components[0].closed);
    for (const auto& s : f.components[0].samples) {
        EXPECT_EQ(s.pos.x, 0.0);
        EXPECT_EQ(s.pos.y, 0.0);
    }
    EXPECT_EQ(front_length(f), 0.0);
}

TEST(InitFront, PartialArcIncludesEndpoints) {
    const Front f = init_front(Torus{1, 1}, {0.5, 0.5}, ArcInterval{0.0, kPi}, std::size_t{4});
    const auto& s = f.components.at(0).samples;
    ASSERT_EQ(s.size(), 4u);
    EXPECT_DOUBLE_EQ(s[0].theta, 0.0);
    EXPECT_DOUBLE_EQ(s[1].theta, kPi / 3);
    EXPECT_DOUBLE_EQ(s[2].theta, 2 * kPi / 3);
    EXPECT_DOUBLE_EQ(s[3].theta, kPi);
    EXPECT_FALSE(f.components[0].closed);
}

TEST(InitFront, RejectsBadInput) {
    EXPECT_THROW(init_front(CubeSurface{1}, {0, 0, Face::U}, ArcInterval{}, std::size_t{8}), PreconditionError);
    EXPECT_THROW(init_front(Torus{1, 1}, {0, 0}, ArcInterval{}, std::size_t{3}), PreconditionError);
    EXPECT_THROW(init_front(Torus{1, 1}, {0, 0}, ArcInterval{1.0, 0.5}, std::size_t{8}), PreconditionError);
    PropagationParams p;
    p.h_max = 0.0;
    EXPECT_THROW(init_front(Torus{1, 1}, {0, 0}, ArcInterval{}, p), PreconditionError);
}

TEST(Propagate, TorusBeforeWrapIsARoundCircle) {
    const Front f = run(Torus{1, 1}, {0, 0}, 0.25);
    EXPECT_EQ(component_count(f), 1u);
    for (const auto& s : f.components[0].samples)
        EXPECT_NEAR(surface_distance(f.surface, {0, 0}, s.pos), 0.25, 1e-12);
    expect_resolved(f);
}

TEST(Propagate, CannotGoBackInTime) {
    Front f = run(Torus{1, 1}, {0, 0}, 1.0);
    EXPECT_THROW(propagate(f, 0.5), PreconditionError);
}

TEST(Propagate, SamplesAreExactlyTheExponentialMapOfTheirDirection) {
    for (const SurfaceModel& s : {SurfaceModel{Torus{1, 1}}, SurfaceModel{DiskBilliard{1}}, SurfaceModel{CubeSurface{1}}}) {
        const SurfacePoint p = is_cube(s) ? SurfacePoint{0.3, 0.6, Face::U} : SurfacePoint{0.3, 0.2};
        const Front f = run(s, p, 2.3);
        for (const auto& c : f.components)
            for (const auto& smp : c.samples) {
                const FrontSample ref = make_sample(s, p, smp.theta, f.t);
                EXPECT_TRUE(same_bits(ref.pos.x, smp.pos.x));
                EXPECT_TRUE(same_bits(ref.pos.y, smp.pos.y));
                EXPECT_EQ(ref.pos.face, smp.pos.face);
            }
    }
}

TEST(Propagate, ResolutionContractOnEverySurface) {
    const std::vector<std::pair<SurfaceModel, SurfacePoint>> cases{
        {Torus{1, 1}, {0.37, 0.61}}, {Torus{1.5, 0.7}, {0.1, 0.1}}, {KleinBottle{}, {0.2, 0.3}},
        {RectBilliard{1, 1}, {0.3, 0.7}}, {DiskBilliard{1}, {0.5, 0.0}}, {CubeSurface{1}, {0.3, 0.6, Face::F}}};
    for (const auto& [s, p] : cases) {
        const Front f = run(s, p, 7.0);
        expect_resolved(f);
        EXPECT_LE(sample_count(f), f.params.sample_budget);
    }
}

TEST(Propagate, FlowOnFlatSurfacesAndDiskStaysConnected) {
    const std::vector<std::pair<SurfaceModel, SurfacePoint>> cases{
        {Torus{1, 1}, {0, 0}}, {KleinBottle{}, {0.2, 0.3}}, {RectBilliard{2, 1}, {0.3, 0.7}}, {DiskBilliard{1}, {0.5, 0.2}}};
    for (const auto& [s, p] : cases) {
        Front f = init_front(s, p, ArcInterval{}, PropagationParams::defaults_for(s));
        for (double t : {0.3, 1.0, 4.0, 12.0}) {
            propagate(f, t);
            EXPECT_EQ(component_count(f), 1u) << format_surface(s) << " t=" << t;
            EXPECT_EQ(f.components.size(), 1u);
            EXPECT_TRUE(f.components[0].closed);
        }
    }
}

TEST(Propagate, DiskCenterRefocusesOnTheSource) {
    const Front f = run(DiskBilliard{1}, {0, 0}, 2.0);
    EXPECT_EQ(component_count(f), 1u);
    for (const auto& s : f.components[0].samples) EXPECT_LE(std::hypot(s.pos.x, s.pos.y), f.params.h_max);
}

TEST(Propagate, PartialArcKeepsItsInterval) {
    Front f = init_front(Torus{1, 1}, {0.5, 0.5}, ArcInterval{0.2, 1.4}, std::size_t{16});
    propagate(f, 5.0);
    ASSERT_EQ(f.components.size(), 1u);
    EXPECT_EQ(f.components[0].interval, (ArcInterval{0.2, 1.4}));
    EXPECT_EQ(f.components[0].samples.front().theta, 0.2);
    EXPECT_EQ(f.components[0].samples.back().theta, 1.4);
    EXPECT_NEAR(front_length(f), 1.2 * 5.0, 1.2 * 5.0 * 1e-3);
}

TEST(Propagate, BudgetExhaustionNamesTheComponent) {
    PropagationParams p = PropagationParams::defaults_for(Torus{1, 1});
    p.sample_budget = 5000;
    Front f = init_front(Torus{1, 1}, {0, 0}, ArcInterval{}, p);
    try {
        propagate(f, 10.0);
        FAIL() << "expected a numerical failure";
    } catch (const NumericalFailure& e) {
        EXPECT_NE(std::string(e.what()).find("component [0, 6.28"), std::string::npos) << e.what();
    }
}

TEST(CubeComponents, FaceCentreTearsIntoFour) {
    EXPECT_EQ(component_count(run(CubeSurface{1}, kCubeCenter, 0.5)), 1u);
    const Front f = run(CubeSurface{1}, kCubeCenter, 1.0);
    EXPECT_EQ(component_count(f), 4u);
    expect_resolved(f);
    // the four corner directions are bracketed by dead directions or tears
    for (int k = 0; k < 4; ++k) {
        const double corner = kPi / 4 + k * kPi / 2;
        bool separated = false;
        for (const auto& c : f.components) {
            const double lo = c.interval.theta_lo, hi = c.interval.theta_hi;
            if (std::abs(wrap_centered(lo - corner, kTwoPi)) < 1e-6 || std::abs(wrap_centered(hi - corner, kTwoPi)) < 1e-6)
                separated = true;
        }
        EXPECT_TRUE(separated) << "corner " << k;
    }
}

TEST(CubeComponents, CountIsNondecreasingUpToOneAndAHalf) {
    Front f = init_front(CubeSurface{1}, kCubeCenter, ArcInterval{}, PropagationParams::defaults_for(CubeSurface{1}));
    std::size_t prev = 1;
    for (int k = 1; k <= 15; ++k) {
        const double t = 0.1 * k;
        propagate(f, t);
        const std::size_t n = component_count(f);
        EXPECT_GE(n, prev) << "t=" << t;
        EXPECT_EQ(n, t < std::sqrt(0.5) ? 1u : 4u) << "t=" << t;
        prev = n;
    }
}

TEST(CubeComponents, OffCentreSourceTearsOnceperCorner) {
    // corners of U at distances 0.5, 0.671, 0.806, 0.922 from (0.3, 0.6);
    // the first cut opens the ring, each later one adds a component
    const std::vector<std::pair<double, std::size_t>> expected{{0.45, 1}, {0.55, 1}, {0.7, 2}, {0.85, 3}, {0.95, 4}};
    Front f = init_front(CubeSurface{1}, {0.3, 0.6, Face::U}, ArcInterval{}, PropagationParams::defaults_for(CubeSurface{1}));
    for (const auto& [t, n] : expected) {
        propagate(f, t);
        EXPECT_EQ(component_count(f), n) << "t=" << t;
    }
    EXPECT_FALSE(f.components.front().closed);
}

TEST(CubeComponents, ComponentsAreDisjointAndOrdered) {
    const Front f = run(CubeSurface{1}, {0.3, 0.6, Face::U}, 3.0);
    for (std::size_t i = 1; i < f.components.size(); ++i)
        EXPECT_LE(f.components[i - 1].interval.theta_hi, f.components[i].interval.theta_lo);
    for (const auto& c : f.components) {
        EXPECT_LE(c.interval.theta_lo, c.samples.front().theta);
        EXPECT_GE(c.interval.theta_hi, c.samples.back().theta);
        EXPECT_GT(c.split_time, 0.0);
    }
    EXPECT_LE(f.components.back().interval.theta_hi - f.components.front().interval.theta_lo, kTwoPi);
}

TEST(FrontLength, TorusGrowsLikeTwoPiT) {
    PropagationParams p = PropagationParams::defaults_for(Torus{1, 1});
    p.h_max = 0.01;
    const Front f = run(Torus{1, 1}, {0, 0}, 10.0, p);
    EXPECT_NEAR(front_length(f), kTwoPi * 10, kTwoPi * 10 * 1e-3);
    EXPECT_LE(front_length(f), kTwoPi * 10 * (1 + 1e-12));
}

TEST(FrontLength, DiskRimAtTimeOne) {
    const Front f = run(DiskBilliard{1}, {0, 0}, 1.0);
    EXPECT_NEAR(front_length(f), kTwoPi, kTwoPi * 1e-3);
}

TEST(FrontLength, FlatLawWithinResolutionBand) {
    const std::vector<std::pair<SurfaceModel, SurfacePoint>> cases{
        {Torus{1, 1}, {0.37, 0.61}}, {KleinBottle{}, {0.2, 0.3}}, {RectBilliard{1, 1}, {0.3, 0.7}}, {CubeSurface{1}, {0.3, 0.6, Face::U}}};
    for (const auto& [s, p] : cases) {
        const Front f = run(s, p, 6.0);
        const double ratio = front_length(f) / (kTwoPi * 6.0);
        EXPECT_GE(ratio, 1.0 - 10 * f.params.h_max) << format_surface(s);
        EXPECT_LE(ratio, 1.0 + 1e-12) << format_surface(s);
    }
}

TEST(FrontLength, RefinementOnlyAddsLength) {
    for (const SurfaceModel& s : {SurfaceModel{Torus{1, 1}}, SurfaceModel{DiskBilliard{1}}, SurfaceModel{KleinBottle{}}}) {
        PropagationParams fine = PropagationParams::defaults_for(s), coarse = fine;
        coarse.h_max *= 2;
        const SurfacePoint p{0.3, 0.4};
        EXPECT_GE(front_length(run(s, p, 5.0, fine)), front_length(run(s, p, 5.0, coarse)) - 1e-9) << format_surface(s);
    }
}

TEST(Determinism, IndependentOfWorkerCount) {
    const std::vector<std::pair<SurfaceModel, SurfacePoint>> cases{
        {Torus{1, 1}, {0.37, 0.61}}, {DiskBilliard{1}, {0.5, 0.0}}, {CubeSurface{1}, {0.3, 0.6, Face::U}}};
    for (const auto& [s, p] : cases) {
        parallel::set_max_workers(1);
        const Front a = run(s, p, 9.0);
        parallel::set_max_workers(4);
        const Front b = run(s, p, 9.0);
        parallel::set_max_workers(0);
        expect_identical(a, b);
    }
}

TEST(Determinism, StoppingAtAnIntermediateTimeChangesNothing) {
    for (const SurfaceModel& s : {SurfaceModel{Torus{1, 1}}, SurfaceModel{CubeSurface{1}}}) {
        const SurfacePoint p = is_cube(s) ? SurfacePoint{0.3, 0.6, Face::U} : SurfacePoint{0.3, 0.6};
        Front a = init_front(s, p, ArcInterval{}, PropagationParams::defaults_for(s));
        propagate(a, 2.0);
        propagate(a, 4.0);
        expect_identical(a, run(s, p, 4.0));
    }
}
