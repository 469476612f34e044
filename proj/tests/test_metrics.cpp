#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "wavefront/metrics.hpp"

using namespace wavefront;

namespace {

Front run(const SurfaceModel& s, SurfacePoint p, double t, double h_max = 0.005) {
    PropagationParams params = PropagationParams::defaults_for(s);
    params.h_max = h_max;
    Front f = init_front(s, p, ArcInterval{}, params);
    propagate(f, t);
    return f;
}

// Covering radius of the exact front, sampled at arclength spacing `ds`,
// over the centres of an n x n grid of the fundamental domain.
enum class Quotient { Torus, Klein, Square };

double brute_covering_radius(Quotient kind, oracle::P2 p, double t, int n, double ds) {
    const bool klein = kind == Quotient::Klein;
    oracle::PointCloud cloud(1.0, klein ? 2.0 : 1.0, kind != Quotient::Square, klein ? 2 * n : n);
    const auto count = static_cast<long>(std::ceil(2 * M_PI * t / ds));
    for (long k = 0; k < count; ++k) {
        const double th = 2 * M_PI * static_cast<double>(k) / static_cast<double>(count);
        const double x = p.x + t * std::cos(th), y = p.y + t * std::sin(th);
        switch (kind) {
            case Quotient::Torus: cloud.add({x - std::floor(x), y - std::floor(y)}); break;
            case Quotient::Klein: cloud.add({x - std::floor(x), y - 2 * std::floor(y / 2)}); break;
            case Quotient::Square: cloud.add({tent(x, 1.0), tent(y, 1.0)}); break;
        }
    }
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const oracle::P2 q{(i + 0.5) / n, (j + 0.5) / n};
            double d = cloud.nearest(q);
            if (klein) d = std::min(d, cloud.nearest({1.0 - q.x, q.y + 1.0}));
            worst = std::max(worst, d);
        }
    return worst;
}

}  // namespace

TEST(Density, FrontAtTimeZeroHitsOneCell) {
    for (const SurfaceModel& s : {SurfaceModel{Torus{1, 1}}, SurfaceModel{KleinBottle{}}, SurfaceModel{RectBilliard{1, 1}},
                                  SurfaceModel{DiskBilliard{1}}}) {
        const Front f = run(s, {0.33, 0.41}, 0.0);
        EXPECT_EQ(density_report(f, 0.1).cells_hit, 1) << format_surface(s);
    }
    const Front cube = run(CubeSurface{1}, {0.33, 0.41, Face::B}, 0.0);
    EXPECT_EQ(density_report(cube, 0.1).cells_hit, 1);
}

TEST(Density, TorusAtHundredIsThreeOverRootTDense) {
    const auto rep = density_report(run(Torus{1, 1}, {0, 0}, 100.0), 0.05);
    EXPECT_LE(rep.covering_radius, 0.3);
    EXPECT_EQ(rep.cells_total, 400);
    EXPECT_EQ(rep.cells_hit, rep.cells_total);
    EXPECT_LE(rep.covering_radius, 0.05 * std::sqrt(2.0));
    EXPECT_TRUE(rep.distance_exact);
    EXPECT_EQ(rep.n_components, 1);
}

TEST(Density, DiskRimLeavesTheCentreUncovered) {
    const auto rep = density_report(run(DiskBilliard{1}, {0, 0}, 1.0), 0.02);
    // the farthest interior cell centre is the one nearest the origin
    EXPECT_NEAR(rep.covering_radius, 1.0 - std::hypot(0.01, 0.01), 0.005);
    EXPECT_LT(rep.cells_hit, rep.cells_total);
}

TEST(Density, RejectsTooFineGrid) {
    const Front f = run(Torus{1, 1}, {0, 0}, 1.0);
    EXPECT_THROW(density_report(f, 0.015), PreconditionError);
    EXPECT_NO_THROW(density_report(f, 0.02));
}

TEST(Density, CoveringRadiusMatchesBruteForceOnTorus) {
    for (double t : {7.3, 25.0}) {
        const auto rep = density_report(run(Torus{1, 1}, {0.37, 0.61}, t), 0.02);
        const double ref = brute_covering_radius(Quotient::Torus, {0.37, 0.61}, t, 50, 5e-4);
        EXPECT_NEAR(rep.covering_radius, ref, 1e-3) << "t=" << t;
    }
}

TEST(Density, CoveringRadiusMatchesBruteForceOnKleinBottle) {
    const auto rep = density_report(run(KleinBottle{}, {0.2, 0.3}, 12.0), 0.02);
    const double ref = brute_covering_radius(Quotient::Klein, {0.2, 0.3}, 12.0, 50, 5e-4);
    EXPECT_NEAR(rep.covering_radius, ref, 1e-3);
}

TEST(Density, CoveringRadiusMatchesBruteForceOnSquareTable) {
    const auto rep = density_report(run(RectBilliard{1, 1}, {0.3, 0.7}, 15.0), 0.02);
    const double ref = brute_covering_radius(Quotient::Square, {0.3, 0.7}, 15.0, 50, 5e-4);
    EXPECT_NEAR(rep.covering_radius, ref, 1e-3);
}

TEST(Density, CubeCoveringRadiusFromTheFaceCentre) {
    // at t = 0.5 the front is a circle of radius 0.5 on U: the centre of U is
    // 0.5 away, and the far side of D is the farthest from it
    const auto rep = density_report(run(CubeSurface{1}, {0.5, 0.5, Face::U}, 0.5), 0.05);
    EXPECT_FALSE(rep.distance_exact);
    EXPECT_GE(rep.covering_radius, 1.0);
    EXPECT_LE(rep.covering_radius, 2.0);
    EXPECT_EQ(rep.cells_total, 6 * 400);
}

TEST(Density, HalvingHmaxDoesNotWorsenCoverage) {
    for (double t : {5.0, 20.0}) {
        const auto coarse = density_report(run(Torus{1, 1}, {0.37, 0.61}, t, 0.005), 0.02);
        const auto fine = density_report(run(Torus{1, 1}, {0.37, 0.61}, t, 0.0025), 0.02);
        EXPECT_LE(fine.covering_radius, coarse.covering_radius + 0.005) << "t=" << t;
    }
}

TEST(Density, TorusOccupancyMatchesADenseCircleScan) {
    // the front is the circle of radius t around the source, wrapped; scan it densely.
    // The count is not monotone in t: at eps 0.05 a cell or two can drop out again.
    const Vec2 src{0.37, 0.61};
    const double eps = 0.05;
    Front f = init_front(Torus{1, 1}, SurfacePoint{src.x, src.y}, ArcInterval{}, PropagationParams::defaults_for(Torus{1, 1}));
    int dips = 0;
    std::int64_t prev = 0;
    for (double t = 2.0; t <= 40.0; t += 2.0) {
        propagate(f, t);
        const auto hit = density_report(f, eps).cells_hit;
        std::vector<char> cells(400, 0);
        const auto n = static_cast<std::int64_t>(std::ceil(kTwoPi * t / 5e-5));
        for (std::int64_t k = 0; k < n; ++k) {
            const double th = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
            const double x = src.x + t * std::cos(th), y = src.y + t * std::sin(th);
            const int i = std::min(19, static_cast<int>((x - std::floor(x)) / eps));
            const int j = std::min(19, static_cast<int>((y - std::floor(y)) / eps));
            cells[static_cast<std::size_t>(j * 20 + i)] = 1;
        }
        const auto expected = std::count(cells.begin(), cells.end(), 1);
        EXPECT_NEAR(static_cast<double>(hit), static_cast<double>(expected), 2.0) << "t=" << t;
        if (hit < prev) ++dips;
        prev = hit;
    }
    RecordProperty("occupancy_dips", dips);
}

TEST(FrontDistance, SourceDistanceOnTheDiskAndTorus) {
    EXPECT_NEAR(front_distance_to(run(DiskBilliard{1}, {0, 0}, 0.6), {0, 0}), 0.6, 1e-4);
    EXPECT_NEAR(front_distance_to(run(Torus{1, 1}, {0, 0}, 0.3), {0, 0}), 0.3, 1e-4);
    EXPECT_NEAR(front_distance_to(run(Torus{1, 1}, {0, 0}, 5.0), {0, 0}), 0.0, 1e-9);
}

TEST(Tau, TorusBallsAreCoveredBeforeSixty) {
    const auto est = estimate_tau(Torus{1, 1}, {0, 0}, 0.4, 60.0, 0.5, PropagationParams::defaults_for(Torus{1, 1}));
    ASSERT_TRUE(est.achieved);
    EXPECT_LE(est.tau, 57.0);
    EXPECT_TRUE(est.first_full_cover_time.has_value());
    EXPECT_LE(*est.first_full_cover_time, est.tau);
    EXPECT_EQ(est.checkpoints.size(), 121u);
}

TEST(Tau, LargeBallIsHitAtOnce) {
    const auto est = estimate_tau(Torus{1, 1}, {0, 0}, 2.0, 5.0, 0.5, PropagationParams::defaults_for(Torus{1, 1}));
    ASSERT_TRUE(est.achieved);
    EXPECT_EQ(est.tau, 0.0);
}

TEST(Tau, DiskCentreNeverCovers) {
    const auto est = estimate_tau(DiskBilliard{1}, {0, 0}, 0.1, 50.0, 0.5, PropagationParams::defaults_for(DiskBilliard{1}));
    EXPECT_FALSE(est.achieved);
    EXPECT_FALSE(est.first_full_cover_time.has_value());
}

TEST(Tau, HalvingTheStepDoesNotDelayTau) {
    const auto p = PropagationParams::defaults_for(Torus{1, 1});
    const auto a = estimate_tau(Torus{1, 1}, {0.37, 0.61}, 0.5, 40.0, 1.0, p);
    const auto b = estimate_tau(Torus{1, 1}, {0.37, 0.61}, 0.5, 40.0, 0.5, p);
    ASSERT_TRUE(a.achieved);
    ASSERT_TRUE(b.achieved);
    EXPECT_LE(b.tau, a.tau + 1.0);
}

TEST(Tau, Preconditions) {
    const auto p = PropagationParams::defaults_for(Torus{1, 1});
    EXPECT_THROW(estimate_tau(Torus{1, 1}, {0, 0}, 0.005, 1.0, 0.5, p), PreconditionError);
    EXPECT_THROW(estimate_tau(Torus{1, 1}, {0, 0}, 0.4, 1.0, 0.0, p), PreconditionError);
}

TEST(LengthCurve, OlsAndMedian) {
    EXPECT_DOUBLE_EQ(ols_slope({0, 1, 2, 3}, {1, 3, 5, 7}), 2.0);
    EXPECT_DOUBLE_EQ(median({5, 1, 3}), 3.0);
    EXPECT_DOUBLE_EQ(median({4, 1, 3, 2}), 2.5);
}

TEST(LengthCurve, TorusSlopeIsTwoPi) {
    std::vector<double> ts;
    for (int k = 1; k <= 10; ++k) ts.push_back(2.0 * k);
    const auto c = length_growth_curve(Torus{1, 1}, {0.37, 0.61}, ts, PropagationParams::defaults_for(Torus{1, 1}));
    EXPECT_NEAR(c.slope, kTwoPi, kTwoPi * 0.005);
    ASSERT_EQ(c.length.size(), ts.size());
}

TEST(LengthCurve, DiskCentreLengthStaysBounded) {
    std::vector<double> ts;
    for (int k = 0; k <= 40; ++k) ts.push_back(0.25 * k);
    const auto c = length_growth_curve(DiskBilliard{1}, {0, 0}, ts, PropagationParams::defaults_for(DiskBilliard{1}));
    for (double len : c.length) EXPECT_LE(len, kTwoPi + 1e-3);
}

TEST(LengthCurve, RejectsUnsortedTimes) {
    EXPECT_THROW(length_growth_curve(Torus{1, 1}, {0, 0}, {2.0, 1.0}, PropagationParams::defaults_for(Torus{1, 1})),
                 PreconditionError);
}
