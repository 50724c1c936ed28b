#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "grushin/errors.hpp"
#include "grushin/fit.hpp"
#include "grushin/observability.hpp"
#include "grushin/quadrature.hpp"

using namespace grushin;

namespace {

const OperatorSpec& classical() {
    static const OperatorSpec s = OperatorSpec::make_power_law(1.0, 1.0, 1.0);
    return s;
}

std::vector<long long> range(long long lo, long long hi) {
    std::vector<long long> v;
    for (long long n = lo; n <= hi; ++n) v.push_back(n);
    return v;
}

const Interval kWindow{0.5, 0.7};

}  // namespace

TEST(MinimalTime, Formulas) {
    EXPECT_DOUBLE_EQ(predicted_minimal_time(classical(), 0.5), 0.03125);
    EXPECT_TRUE(std::isinf(predicted_minimal_time(OperatorSpec::make_power_law(1.0, 1.0, 2.0), 0.3)));
    // nu = (d_y + 1)/2 with d_y = 1
    EXPECT_DOUBLE_EQ(predicted_minimal_time(classical(), 0.4), 0.4 * 0.4 / (6 + 2 * 1));
    const auto s = OperatorSpec::make_generalized(1.0, 1.0, QProfile::sine());
    EXPECT_NEAR(predicted_minimal_time(s, 0.5), (1 - std::cos(0.5)) / 4.0, 1e-15);
    EXPECT_THROW(predicted_minimal_time(classical(), 0.0), DomainError);
}

TEST(ModeSystem, BasisInvariants) {
    const auto sys = ModeSystem::build(classical(), 12);
    EXPECT_EQ(sys.xi_n, 12.0);
    EXPECT_GE(sys.trunc_dim, 8);
    for (int k = 1; k < sys.trunc_dim; ++k) EXPECT_GT(sys.eigenbasis[k].lambda, sys.eigenbasis[k - 1].lambda);
    ModeSystemOptions small;
    small.trunc_dim = 4;
    EXPECT_THROW(ModeSystem::build(classical(), 12, small), DomainError);
}

TEST(ModeSolution, IdentityAtZeroAndSingleMode) {
    const auto sys = ModeSystem::build(classical(), 10);
    std::vector<double> c(sys.trunc_dim, 0.0);
    c[2] = 0.7;
    c[5] = -0.3;
    const auto f0 = mode_solution(sys, c, 0.0);
    const auto& u2 = sys.eigenbasis[2].samples();
    const auto& u5 = sys.eigenbasis[5].samples();
    for (std::size_t j = 0; j < f0.values.size(); j += 37)
        EXPECT_NEAR(f0.values[j], 0.7 * u2.values[j] - 0.3 * u5.values[j], 1e-12);
    EXPECT_NEAR(log_norm_sq(sys, f0), std::log(0.49 + 0.09), 1e-10);

    std::vector<double> e0(sys.trunc_dim, 0.0);
    e0[0] = 1.0;
    for (double t : {0.0, 0.01, 0.1}) {
        const double lam = sys.eigenbasis[0].lambda;
        EXPECT_NEAR(0.5 * log_norm_sq(sys, mode_solution(sys, e0, t)), -lam * t, 1e-10);
    }
}

TEST(ModeSolution, DissipationForRandomData) {
    const auto sys = ModeSystem::build(classical(), 15);
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> N;
    const double lam0 = sys.eigenbasis[0].lambda;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> c(sys.trunc_dim);
        for (auto& v : c) v = N(rng);
        const double T0 = 0.002 * (trial % 5), T = T0 + 0.01 + 0.003 * (trial % 7);
        const double a = log_norm_sq(sys, mode_solution(sys, c, T0));
        const double b = log_norm_sq(sys, mode_solution(sys, c, T));
        EXPECT_LE(b, a - 2.0 * lam0 * (T - T0) + 1e-10);
    }
}

TEST(ModeSolution, ParsevalTwoModes) {
    // f(x, y) = u_20(x) sin 20y + u_25(x) sin 25y with u_n the ground state of mode n.
    const auto p1 = interval_eigenvalue_kummer(classical(), 20.0, 0);
    const auto p2 = interval_eigenvalue_kummer(classical(), 25.0, 0);
    auto f = [&](double x, double y) {
        return interval_eigenfunction_eval(p1, x) * std::sin(20 * y) + interval_eigenfunction_eval(p2, x) * std::sin(25 * y);
    };
    std::vector<double> ybreaks;
    for (int i = 0; i <= 50; ++i) ybreaks.push_back(M_PI * i / 50);
    auto over_y = [&](double x) {
        double s = 0.0;
        for (int i = 0; i < 50; ++i) s += quad::gauss([&](double y) { return f(x, y) * f(x, y); }, ybreaks[i], ybreaks[i + 1], 20);
        return s;
    };
    const double lhs = quad::gauss(over_y, kWindow.a, kWindow.b, 30);
    auto m = [&](const EigenPair& p) {
        return quad::gauss([&](double x) { return std::pow(interval_eigenfunction_eval(p, x), 2); }, kWindow.a, kWindow.b, 30);
    };
    EXPECT_NEAR(lhs, M_PI / 2 * (m(p1) + m(p2)), 1e-12 * lhs);
}

TEST(Ratio, ClosedFormAgainstTimeQuadrature) {
    const auto sys = ModeSystem::build(classical(), 20);
    const double T = 0.05;
    const auto r = observability_ratio(sys, kWindow, T);
    const double mass = std::exp(r.log_mass);
    const double denom = quad::adaptive([&](double t) { return std::exp(-2 * r.lambda * t) * mass; }, 0.0, T, 1e-15).value;
    const double direct = std::log(std::exp(-2 * r.lambda * T) / denom);
    EXPECT_NEAR(r.log_ratio, direct, 1e-12 * std::fabs(direct));
    EXPECT_NEAR(log_ratio_formula(r.lambda, r.log_mass, T), r.log_ratio, 1e-14);
    // The shooting mass agrees with the discrete eigenvector's window mass.
    std::vector<double> e0(sys.trunc_dim, 0.0);
    e0[0] = 1.0;
    EXPECT_NEAR(r.log_mass, log_window_mass(sys, mode_solution(sys, e0, 0.0), kWindow), 1e-3);
}

TEST(Ratio, StrictlyDecreasingInT) {
    const auto sys = ModeSystem::build(classical(), 25);
    double prev = INFINITY;
    for (double T : {0.005, 0.01, 0.02, 0.05, 0.1, 0.5}) {
        const double lr = observability_ratio(sys, kWindow, T).log_ratio;
        EXPECT_LT(lr, prev);
        prev = lr;
    }
}

TEST(ObsSweep, BelowMinimalTimeNotObservable) {
    const double T = 0.015625;
    const auto r = obs_sweep(classical(), kWindow, T, range(5, 40));
    EXPECT_EQ(r.classification, Classification::NotObservable);
    EXPECT_GE(r.fit_r_squared, 0.95);
    EXPECT_NEAR(r.fitted_growth_rate, 4 * 2 * (0.03125 - T), 0.2 * 4 * 2 * (0.03125 - T));
    EXPECT_TRUE(r.stability_checked);
    EXPECT_TRUE(r.stable);
    EXPECT_DOUBLE_EQ(r.predicted_T_star, predicted_minimal_time(classical(), 0.5));
    // Gramian evidence: log value falls roughly linearly in n.
    std::vector<double> n, g;
    for (const auto& row : r.per_mode)
        if (row.log_gramian) n.push_back(row.n), g.push_back(*row.log_gramian);
    ASSERT_GE(n.size(), 10u);
    const auto f = fit::linear(n, g);
    EXPECT_LT(f.slope, 0.0);
    EXPECT_GT(f.r_squared, 0.9);
}

TEST(ObsSweep, AboveMinimalTimeObservable) {
    const auto r = obs_sweep(classical(), kWindow, 0.0625, range(5, 40));
    EXPECT_EQ(r.classification, Classification::ObservableAtDeskScale);
    EXPECT_TRUE(r.stable);
    for (std::size_t i = 1; i < r.per_mode.size(); ++i)
        EXPECT_LE(r.per_mode[i].log_ratio, r.per_mode[i - 1].log_ratio + 1e-9);
}

TEST(ObsSweep, GammaTwoNeverObservable) {
    std::vector<long long> ns;
    for (int i = 0; i < 12; ++i) ns.push_back(std::llround(1e9 * std::pow(10.0, i / 11.0)));
    const auto r = obs_sweep(OperatorSpec::make_power_law(1, 1, 2), kWindow, 5.0, ns);
    EXPECT_EQ(r.classification, Classification::NotObservable);
    EXPECT_GE(r.fit_r_squared, 0.95);
    EXPECT_TRUE(std::isinf(r.predicted_T_star));
}

TEST(ObsSweep, NeedsEnoughModes) {
    EXPECT_THROW(obs_sweep(classical(), kWindow, 0.1, range(5, 9)), DomainError);
}

TEST(Gramian, FullWindowPositiveAndGrowing) {
    const auto sys = ModeSystem::build(classical(), 10);
    double prev = 0.0;
    for (double T : {0.25, 0.5, 1.0, 2.0}) {
        const auto g = gramian_min_eig(sys, {0.0, 1.0}, T);
        EXPECT_GT(g.value, 0.0);
        EXPECT_GE(g.value, prev * (1 - 1e-10));
        prev = g.value;
    }
    const auto g1 = gramian_min_eig(sys, {0.0, 1.0}, 1.0);
    // Against the final-time Gram matrix the full-window problem is diagonal.
    const double l0 = sys.eigenbasis[0].lambda;
    EXPECT_NEAR(g1.value, std::expm1(2 * l0) / (2 * l0), 1e-6 * g1.value);
    EXPECT_FALSE(g1.rank_warning);
}

TEST(Transition, SineProfileBracket) {
    const auto s = OperatorSpec::make_generalized(1.0, 1.0, QProfile::sine());
    const auto tr = empirical_transition_time(s, kWindow, range(5, 40));
    EXPECT_GE(tr.T, 0.5 * tr.predicted);
    EXPECT_LE(tr.T, 2.0 * tr.predicted);
}
