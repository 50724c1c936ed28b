#include <cmath>

#include <gtest/gtest.h>

#include "grushin/agmon.hpp"
#include "grushin/quadrature.hpp"

using namespace grushin;

namespace {
AgmonSpec spec_for(QProfile q, double E) { return AgmonSpec::make(std::move(q), E, {0.5, 0.7}, 1.0); }
}  // namespace

TEST(AgmonDistance, ClosedForms) {
    EXPECT_NEAR(agmon_distance(spec_for(QProfile::power(1), 0.0), 0.0, 0.5), 0.125, 1e-14);
    EXPECT_NEAR(agmon_distance(spec_for(QProfile::power(2), 0.0), 0.0, 1.0), 1.0 / 3.0, 1e-14);
}

TEST(AgmonDistance, SublevelSetAndShiftedEnergy) {
    const auto s = spec_for(QProfile::power(1), 0.04);
    EXPECT_NEAR(s.x_delta, 0.2, 1e-12);
    EXPECT_NEAR(sublevel_edge(QProfile::power(1), 0.04, 1.0), 0.2, 1e-12);
    EXPECT_LT(s.x_delta, s.omega.a);
    // independent oracle: antiderivative of sqrt(s^2 - c^2)
    auto F = [](double x) { return 0.5 * (x * std::sqrt(x * x - 0.04) - 0.04 * std::log(x + std::sqrt(x * x - 0.04))); };
    EXPECT_NEAR(agmon_distance(s, 0.2, 0.5), F(0.5) - F(0.2), 1e-10);
    const double fine = quad::adaptive([](double x) { return std::sqrt(std::max(0.0, x * x - 0.04)); }, 0.2, 0.5, 1e-13).value;
    EXPECT_NEAR(agmon_distance(s, 0.2, 0.5), fine, 1e-9);
}

TEST(AgmonDistance, ZeroEnergyLimit) {
    const double d0 = agmon_distance(spec_for(QProfile::power(1), 0.0), 0.0, 0.5);
    double prev_err = INFINITY;
    for (double E : {1e-2, 1e-3, 1e-4, 1e-6}) {
        const auto s = spec_for(QProfile::power(1), E);
        const double err = std::fabs(agmon_distance(s, s.x_delta, 0.5) - d0);
        EXPECT_LT(err, prev_err);
        prev_err = err;
    }
    EXPECT_LT(prev_err, 1e-5);
}

TEST(AgmonDistance, MonotoneAndAdditive) {
    for (const auto& q : {QProfile::power(1), QProfile::sine(), QProfile::cubic()}) {
        const auto s = spec_for(q, 0.0);
        double prev = 0.0;
        for (double x = 0.05; x <= 1.0; x += 0.05) {
            const double d = agmon_distance(s, 0.0, x);
            EXPECT_GE(d, prev);
            prev = d;
        }
        for (double x1 : {0.1, 0.3})
            for (double x2 : {0.5, 0.9})
                EXPECT_NEAR(agmon_distance(s, 0, x1) + agmon_distance(s, x1, x2), agmon_distance(s, 0, x2), 1e-12);
    }
    double prev = INFINITY;
    for (double E : {0.0, 0.01, 0.04, 0.09}) {
        const double d = agmon_distance(spec_for(QProfile::power(1), E), 0.0, 0.6);
        EXPECT_LE(d, prev);
        prev = d;
    }
}

TEST(AgmonDecay, ClassicalWindowRate) {
    const auto r = agmon_decay_rate(OperatorSpec::make_power_law(1, 1, 1), {0.5, 0.7}, {40, 60, 80, 100, 120, 140, 160});
    EXPECT_NEAR(r.predicted_rate, -0.25, 1e-12);
    EXPECT_LE(std::fabs(r.fitted_rate - r.predicted_rate), 0.1 * 0.25);
    EXPECT_TRUE(r.inequality_holds);
    for (const auto& s : r.samples) EXPECT_LE(s.log_mass, s.bound_log + 1e-9);
}

TEST(AgmonDecay, NearWindowRate) {
    std::vector<double> xis;
    for (double xi = 200; xi <= 2000; xi += 300) xis.push_back(xi);
    const auto r = agmon_decay_rate(OperatorSpec::make_power_law(1, 1, 1), {0.2, 0.3}, xis);
    EXPECT_NEAR(r.predicted_rate, -0.04, 1e-12);
    EXPECT_LE(std::fabs(r.fitted_rate - r.predicted_rate), 0.1 * 0.04);
}

TEST(AgmonDecay, SineProfileDirection) {
    const auto spec = OperatorSpec::make_generalized(1.0, 1.0, QProfile::sine());
    const auto r = agmon_decay_rate(spec, {0.5, 0.7}, {40, 60, 80, 100, 120, 140, 160});
    EXPECT_LE(r.fitted_rate, -2.0 * (1.0 - r.delta) * r.d_agm_delta + 0.01);
    EXPECT_TRUE(r.inequality_holds);
}
