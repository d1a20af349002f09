#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "subq/ensemble.hpp"
#include "subq/errors.hpp"

using namespace subq;

namespace {

struct Canon {
    Params p = canonical_params(1.0, 1.0);
    Derived d = derive_constants(p);
};

bool within(const EstimateWithError& e, double target) {
    return std::abs(e.value - target) <= std::max(3.0 * e.std_error, 1e-12);
}

}  // namespace

TEST(InitialSpeed, Examples) {
    const Canon c;
    EXPECT_NEAR(initial_u0(c.d, 1.0), 0.5, 1e-15);
    EXPECT_NEAR(initial_u0(c.d, 0.5), 1.0, 1e-15);
    const double w = matched_width(c.p, c.d);
    EXPECT_NEAR(w, 0.5, 1e-15);
    EXPECT_NEAR(initial_u0(c.d, w), c.p.zeta * w, 1e-15);
}

TEST(PrepareGaussian, SampleMoments) {
    const Canon c;
    const auto e = prepare_gaussian(GaussianPrep{1.0, 0.0, 0.0, 100000}, c.d, 8);
    const Eigen::ArrayXd x2 = e.positions.square();
    const Eigen::ArrayXd u2 = e.diff_velocities.square();
    const Eigen::ArrayXd xu = e.positions * e.diff_velocities;
    EXPECT_TRUE(within(mean_with_error(x2), 1.0));
    EXPECT_TRUE(within(mean_with_error(u2), 0.25));
    EXPECT_TRUE(within(mean_with_error(xu), 0.0));
}

TEST(PrepareGaussian, IndependentOfThreadCount) {
    const Canon c;
    const GaussianPrep prep{0.7, 1.0, 0.5, 10001};
    const auto a = prepare_gaussian(prep, c.d, 5, 1);
    const auto b = prepare_gaussian(prep, c.d, 5, 6);
    EXPECT_TRUE((a.positions == b.positions).all());
    EXPECT_TRUE((a.diff_velocities == b.diff_velocities).all());
}

TEST(OsmoticVelocity, Examples) {
    const Canon c;
    EXPECT_EQ(osmotic_velocity(2.0, 2.0, 1.0, c.p, c.d), 0.0);
    EXPECT_NEAR(osmotic_velocity(1.0, 0.0, 1.0, c.p, c.d), 0.5, 1e-15);
    EXPECT_NEAR(osmotic_velocity(-1.0, 0.0, 4.0, c.p, c.d), -0.125, 1e-15);
}

TEST(OsmoticVelocity, GaussianAverageOfSquare) {
    const Canon c;
    for (double sigma0 : {0.5, 1.0, 2.0}) {
        const auto e = prepare_gaussian(GaussianPrep{sigma0, 0.0, 0.0, 100000}, c.d, 21);
        Eigen::ArrayXd ke(e.positions.size());
        for (Eigen::Index i = 0; i < ke.size(); ++i) {
            const double u = osmotic_velocity(e.positions(i), 0.0, sigma0 * sigma0, c.p, c.d);
            ke(i) = 0.5 * c.p.m * u * u;
        }
        const double target = c.d.hbar * c.d.hbar / (8.0 * c.p.m * sigma0 * sigma0);
        EXPECT_TRUE(within(mean_with_error(ke), target)) << sigma0;
    }
}

TEST(HeatGradient, CanonicalComponentsAgree) {
    const Canon c;
    for (double x : {-3.0, -0.2, 0.0, 1.0, 4.5}) {
        const auto g = heat_gradient(x, 0.0, 1.0, c.p, c.d);
        EXPECT_NEAR(g.from_friction, g.from_boltzmann, 1e-15);
    }
    const auto g = heat_gradient(1.0, 0.0, 1.0, c.p, c.d);
    EXPECT_NEAR(g.from_friction, 1.0, 1e-15);
    EXPECT_NEAR(g.from_boltzmann, 1.0, 1e-15);
}

TEST(HeatGradient, FreeModeRatio) {
    Params p = canonical_params(1.0, 1.0);
    p.canonical = false;
    p.zeta = 1.0;
    const auto d = derive_constants(p);
    const auto g = heat_gradient(1.0, 0.0, 1.0, p, d);
    EXPECT_NEAR(g.from_friction / g.from_boltzmann, 0.5, 1e-15);
}

TEST(BallisticEvolve, Examples) {
    const Canon c;
    const auto e = prepare_gaussian(GaussianPrep{1.0, 0.0, 1.0, 100000}, c.d, 3);
    EXPECT_NEAR(ballistic_variance(1.0, 0.5, 2.0), 2.0, 1e-15);
    const auto later = ballistic_evolve(e, 2.0);
    EXPECT_TRUE(within(variance_about_center(later), 2.0));

    const auto same = ballistic_evolve(e, 0.0);
    EXPECT_TRUE((same.positions == e.positions).all());

    const auto moved = ballistic_evolve(e, 3.0);
    EXPECT_DOUBLE_EQ(moved.center(), 3.0);
    const Eigen::ArrayXd x = moved.positions;
    EXPECT_TRUE(within(mean_with_error(x), 3.0));

    EXPECT_THROW(ballistic_evolve(later, 1.0), WindowOutOfRange);
}

TEST(VarianceSeries, AnalyticCurves) {
    const Canon c;
    const auto series = variance_series(GaussianPrep{1.0, 0.0, 0.0, 1000}, c.d, {0, 1, 2}, 1);
    const double ballistic[] = {1.0, 1.25, 2.0};
    const double rest[] = {1.0, 2.0, 3.0};
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(series[std::size_t(k)].ballistic, ballistic[k], 1e-15);
        EXPECT_NEAR(series[std::size_t(k)].rest_frame, rest[k], 1e-15);
    }
    EXPECT_EQ(series[0].ballistic, series[0].rest_frame);
}

TEST(VarianceSeries, BallisticLawAndRestFrameDivergence) {
    const Canon c;
    for (double sigma0 : {0.5, 1.0, 2.0}) {
        const double t_star = crossover_time(sigma0, c.d.diffusion);
        EXPECT_NEAR(t_star, 2.0 * sigma0 * sigma0 / 0.5, 1e-14);
        std::vector<double> grid{0, 1, 2, 5, 2.0 * t_star};
        std::sort(grid.begin(), grid.end());
        const auto series = variance_series(GaussianPrep{sigma0, 0.0, 1.0, 100000}, c.d, grid, 77);
        for (const auto& s : series) EXPECT_TRUE(within(s.empirical, s.ballistic)) << s.t;
        const auto& late = *std::find_if(series.begin(), series.end(),
                                         [&](const auto& v) { return v.t == 2.0 * t_star; });
        EXPECT_GT(std::abs(late.empirical.value - late.rest_frame), 3.0 * late.empirical.std_error);
    }
}

TEST(KineticDecomposition, Examples) {
    const Canon c;
    auto k = kinetic_decomposition(c.d, c.p, 1.0, 0.0);
    EXPECT_EQ(k.convective, 0.0);
    EXPECT_NEAR(k.diffusive, c.d.hbar * c.d.hbar / 8.0, 1e-15);
    EXPECT_NEAR(k.diffusive, 0.5 * 0.25, 1e-15);

    k = kinetic_decomposition(c.d, c.p, 1.0, 2.0);
    EXPECT_NEAR(k.sigma_sq, 2.0, 1e-15);
    EXPECT_NEAR(k.diffusive, 0.0625, 1e-15);
    EXPECT_NEAR(k.convective, 0.0625, 1e-15);
    EXPECT_NEAR(k.total, 0.125, 1e-15);

    k = kinetic_decomposition(c.d, c.p, 1.0, 1e8);
    EXPECT_LT(k.diffusive, 1e-16);
    EXPECT_NEAR(k.convective, 0.125, 1e-15);
}

TEST(EnergyConservation, AnalyticSeriesExact) {
    const Canon c;
    for (double sigma0 : {0.3, 1.0, 2.5}) {
        std::vector<KineticSplit> series;
        for (double t : {0.0, 0.1, 1.0, 3.0, 10.0, 100.0})
            series.push_back(kinetic_decomposition(c.d, c.p, sigma0, t));
        const double u0 = initial_u0(c.d, sigma0);
        const auto r = check_energy_conservation(series, 0.5 * c.p.m * u0 * u0);
        EXPECT_TRUE(r.pass) << r.note;
        EXPECT_EQ(r.kind, CheckKind::algebraic);
        EXPECT_LE(r.rel_error, 1e-12);
    }
}

TEST(EnergyConservation, EmpiricalEnsemble) {
    const Canon c;
    const auto e0 = prepare_gaussian(GaussianPrep{1.0, 0.0, 1.0, 100000}, c.d, 4);
    std::vector<KineticSplit> series;
    for (double t : {0.0, 1.0, 2.0, 5.0}) series.push_back(empirical_kinetic_split(ballistic_evolve(e0, t), c.p));
    const auto r = check_energy_conservation(series, 0.125);
    EXPECT_TRUE(r.pass) << r.note;
    EXPECT_EQ(r.kind, CheckKind::statistical);
}

TEST(EnergyConservation, CorruptedSeriesFails) {
    const Canon c;
    std::vector<KineticSplit> series;
    for (double t : {0.0, 1.0, 2.0}) {
        auto k = kinetic_decomposition(c.d, c.p, 1.0, t);
        k.diffusive *= 2.0;
        k.total = k.convective + k.diffusive;
        series.push_back(k);
    }
    const auto r = check_energy_conservation(series, 0.125);
    EXPECT_FALSE(r.pass);
    EXPECT_NE(r.note.find("ConservationViolated"), std::string::npos);
}
