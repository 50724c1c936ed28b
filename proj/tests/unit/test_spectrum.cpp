#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "grushin/errors.hpp"
#include "grushin/halfline.hpp"
#include "grushin/quadrature.hpp"
#include "grushin/specfun.hpp"
#include "grushin/spectrum.hpp"

using namespace grushin;

namespace {
double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }
OperatorSpec classical(double nu, double L = 1.0) { return OperatorSpec::make_power_law(nu, L, 1.0); }
}  // namespace

TEST(OperatorSpec, HardyConstantsAndGuards) {
    EXPECT_DOUBLE_EQ(classical(1.0).hardy, 0.25);
    EXPECT_DOUBLE_EQ(OperatorSpec::make_power_law(1.0, 1.0, 1.0, 3).hardy, 0.25);
    EXPECT_DOUBLE_EQ(OperatorSpec::make_power_law(1.0, 1.0, 1.0, 5).hardy, 2.25);
    EXPECT_THROW(OperatorSpec::make_power_law(1.0, 1.0, 1.0, 2), DomainError);
    EXPECT_THROW(OperatorSpec::make_power_law(-1.0, 1.0, 1.0), DomainError);
    EXPECT_THROW(OperatorSpec::make_power_law(0.0, 1.0, 1.0), DomainError);
    EXPECT_THROW(OperatorSpec::make_power_law(1.0, 0.0, 1.0), DomainError);
}

TEST(OperatorSpec, QProfileHypotheses) {
    for (const auto& q : {QProfile::power(1), QProfile::power(2), QProfile::sine(), QProfile::cubic()}) {
        EXPECT_EQ(q(0.0), 0.0);
        EXPECT_NO_THROW(q.validate(1.0));
        const double h = 1e-5;
        EXPECT_NEAR(q(h) / std::pow(h, q.smoothness_order), q.leading_coefficient(), 1e-3);
    }
    QProfile bad = QProfile::sine();
    EXPECT_THROW(bad.validate(4.0), DomainError);  // sin changes sign before 4
    EXPECT_THROW(QProfile::from_name("cosh"), DomainError);
}

TEST(Grid1D, OffsetGradedInvariants) {
    const auto g = Grid1D::graded(500, 2.0, 2.0);
    double sum = 0.0;
    for (int j = 0; j < g.n_cells; ++j) {
        EXPECT_NEAR(g.nodes[j], 2.0 * std::pow((j + 0.5) / 500.0, 2.0), 1e-15);
        if (j) EXPECT_GT(g.nodes[j], g.nodes[j - 1]);
        sum += g.quad_weights[j];
    }
    EXPECT_NEAR(sum, 2.0, 1e-12 * 2.0);
    EXPECT_GT(g.nodes.front(), 0.0);
    EXPECT_EQ(g.faces.front(), 0.0);
    EXPECT_DOUBLE_EQ(g.faces.back(), 2.0);
}

TEST(FdOracle, DirichletLaplacianLimit) {
    const auto spec = OperatorSpec::make_power_law(0.5, M_PI, 1.0);
    const auto r = fd_eigs_oracle(spec, 0.0, Grid1D::graded(4000, M_PI), 3, {1e-6, false, false});
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(r.pairs[k].lambda, (k + 1.0) * (k + 1.0), 1e-4);
}

TEST(FdOracle, BracketAndKummerAgreement) {
    const auto spec = classical(1.0);
    const auto r = fd_eigs_oracle(spec, 50.0, Grid1D::graded(4000, 1.0), 3);
    EXPECT_GT(r.best(0) / 50.0, 4.0);
    EXPECT_LT(r.best(0) / 50.0, 4.01);
    // the gap (~1e-18 here) is below double resolution of lambda; the discrete value may sit either side
    EXPECT_NEAR(r.pairs[0].lambda / 50.0, 4.0, 1e-5);
    EXPECT_LE(rel(r.best(0), interval_eigenvalue_kummer(spec, 50.0, 0).lambda), 1e-6);
    for (int k = 1; k < 3; ++k) EXPECT_GT(r.pairs[k].lambda, r.pairs[k - 1].lambda);
}

TEST(FdOracle, ConvergenceOrder) {
    const auto spec = classical(1.0);
    auto lam = [&](int n) { return fd_eigs_oracle(spec, 20.0, Grid1D::graded(n, 1.0), 1, {1e-6, false, false}).pairs[0].lambda; };
    const double a = lam(500), b = lam(1000), c = lam(2000);
    const double order = std::log2(std::fabs(a - b) / std::fabs(b - c));
    EXPECT_GE(order, 1.5);
}

TEST(FdOracle, SpectralDistanceBound) {
    const auto spec = classical(0.8);
    const auto grid = Grid1D::graded(120, 1.0);
    const auto A = assemble_operator(spec, 10.0, grid);
    const auto eigs = tridiag::lowest_eigenvalues(A, A.size());
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double lambda = eigs[0] + (eigs.back() - eigs[0]) * (0.5 + 0.5 * U(rng));
        std::vector<double> u(A.size());
        for (auto& v : u) v = U(rng);
        auto Au = tridiag::multiply(A, u);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < A.size(); ++i) {
            num += (Au[i] - lambda * u[i]) * (Au[i] - lambda * u[i]);
            den += u[i] * u[i];
        }
        double dist = INFINITY;
        for (double e : eigs) dist = std::min(dist, std::fabs(e - lambda));
        EXPECT_LE(dist, std::sqrt(num / den) * (1 + 1e-10));
    }
}

TEST(Kummer, LocalizationExamples) {
    const auto s1 = classical(1.0);
    const auto p80 = interval_eigenvalue_kummer(s1, 80.0, 0), p100 = interval_eigenvalue_kummer(s1, 100.0, 0);
    EXPECT_GT(-p80.kummer().a_offset, 0.0);
    EXPECT_GE(p80.lambda / 80.0, 4.0);
    EXPECT_LE(p80.lambda / 80.0, 4.01);
    EXPECT_LT(-p100.kummer().a_offset, -p80.kummer().a_offset);
    EXPECT_GT(-p100.kummer().a_offset, 0.0);
    const auto p = interval_eigenvalue_kummer(classical(0.3), 60.0, 1);
    // mu_1 = 4 + 2(1 + 0.3)
    EXPECT_GT(-p.kummer().a_offset, 0.0);
    EXPECT_GE(p.lambda / 60.0, 6.6);
    EXPECT_LE(p.lambda / 60.0, 6.61);
}

TEST(Kummer, RootResidual) {
    const auto p = interval_eigenvalue_kummer(classical(1.0), 50.0, 0);
    EXPECT_LE(p.kummer().residual_ratio, 1e-10);
    const auto& kf = p.kummer();
    specfun::KummerOptions ko;
    ko.throw_on_precision_loss = false;
    const auto s = specfun::kummer_series(kf.a_int, kf.a_offset, 2.0, 50.0, ko);
    EXPECT_LE(std::exp(s.value.log_magnitude - s.log_max_partial), 1e-10);
}

TEST(Kummer, AgreesWithOracleOnGrid) {
    for (double nu : {0.3, 1.0, 2.5})
        for (double xi : {40.0, 70.0, 100.0}) {
            const auto spec = classical(nu);
            const auto fd = fd_eigs_adapted(spec, xi, 4000, 2, {1e-6, false, true});
            for (int k : {0, 1})
                EXPECT_LE(rel(fd.best(k), interval_eigenvalue_kummer(spec, xi, k).lambda), 1e-5) << nu << " " << xi << " " << k;
        }
}

TEST(Kummer, BracketStrictAndDecreasing) {
    for (double nu : {0.3, 1.0, 2.5})
        for (int k = 0; k <= 2; ++k) {
            double prev = INFINITY;
            for (double xi : {40.0, 60.0, 80.0, 100.0}) {
                const double gap = -4.0 * interval_eigenvalue_kummer(classical(nu), xi, k).kummer().a_offset;
                EXPECT_GT(gap, 0.0);
                EXPECT_LE(gap, 0.05);
                EXPECT_LT(gap, prev);
                prev = gap;
            }
        }
}

TEST(Kummer, OutOfBudgetRefuses) {
    EXPECT_THROW(interval_eigenvalue_kummer(classical(1.0), 500.0, 0), Error);
    EXPECT_THROW(interval_eigenvalue_kummer(OperatorSpec::make_power_law(1.0, 1.0, 2.0), 50.0, 0), Error);
}

TEST(KummerEigenfunction, BoundaryAndOrigin) {
    const auto p = interval_eigenvalue_kummer(classical(1.0), 30.0, 1);
    const double peak = std::fabs(interval_eigenfunction_eval(p, 0.2));
    EXPECT_LE(std::fabs(interval_eigenfunction_eval(p, 1.0)), 1e-9 * peak);
    const double a = interval_eigenfunction_eval(p, 1e-4), b = interval_eigenfunction_eval(p, 2e-4);
    EXPECT_NEAR(b / a, std::pow(2.0, 1.5), 1e-3);
}

TEST(KummerEigenfunction, GroundStateBracket) {
    const auto p = interval_eigenvalue_kummer(classical(1.0), 80.0, 0);
    const auto& kf = p.kummer();
    specfun::KummerOptions ko;
    ko.throw_on_precision_loss = false;
    for (int i = 1; i < 100; ++i) {
        const double x = i / 100.0;
        const double M = specfun::kummer_series(kf.a_int, kf.a_offset, 2.0, 80.0 * x * x, ko).value.value();
        EXPECT_LE(M, 1.0 + 1e-12);
        EXPECT_GE(M, 1.0 - x - 1e-12);
    }
}

TEST(KummerEigenfunction, NormalizedAgainstQuadrature) {
    const auto p = interval_eigenvalue_kummer(classical(1.0), 40.0, 1);
    std::vector<double> br = quad::geometric_breakpoints(0.0, 1.0, 30, 0.5);
    const double lm = quad::log_integral(
        [&](double x) { return 2.0 * interval_eigenfunction_log(p, x).log_magnitude; }, br);
    EXPECT_NEAR(lm, 0.0, 1e-9);
}

TEST(MonotoneConcave, Examples) {
    EXPECT_TRUE(monotone_concave_check(interval_eigenvalue_kummer(classical(1.0), 80.0, 0)));
    EXPECT_TRUE(monotone_concave_check(interval_eigenvalue_kummer(classical(0.3), 60.0, 0)));
    EigenPair synthetic = interval_eigenvalue_kummer(classical(1.0), 40.0, 0);
    synthetic.a_param = -0.75;
    EXPECT_THROW(monotone_concave_check(synthetic), RegimeError);
}

TEST(GroundScaling, GammaTwoExponentAndLowerBound) {
    const auto r = gamma_ground_scaling(OperatorSpec::make_power_law(1.0, 1.0, 2.0), {50, 100, 200, 400});
    EXPECT_NEAR(r.fitted_exponent, 2.0 / 3.0, 0.05);
    EXPECT_TRUE(r.lower_bound_holds);
    for (std::size_t i = 0; i < r.samples.size(); ++i)
        EXPECT_GE(r.samples[i].second, r.mu_bar * std::pow(r.samples[i].first, 2.0 / 3.0) - r.tolerances[i]);
}

TEST(GroundScaling, ClassicalDegenerateUse) {
    const auto r = gamma_ground_scaling(classical(1.0), {40, 60, 80, 100, 120});
    EXPECT_NEAR(r.fitted_exponent, 1.0, 0.02);
    EXPECT_NEAR(r.fitted_prefactor, 4.0, 0.05);
}

TEST(MuBar, ClosedFormsAndConvergence) {
    EXPECT_NEAR(halfline_mu_bar(0.5, 1.0), 3.0, 1e-6);
    EXPECT_NEAR(halfline_mu_bar(2.0, 1.0), 6.0, 1e-6);
    const auto d = halfline_mu_bar_detail(1.0, 3.0);
    EXPECT_LE(d.last_change, 1e-6 * d.value);
    EXPECT_GT(d.doublings, 0);
}

TEST(Radial, WeightedOracleMatchesReduced) {
    const auto d3 = OperatorSpec::make_power_law(1.0, 1.0, 1.0, 3);
    const auto fd = fd_eigs_adapted(d3, 50.0, 4000, 1, {1e-6, false, true});
    const auto reduced = radial_reduce(d3);
    EXPECT_EQ(reduced.dim, 1);
    EXPECT_LE(rel(fd.best(0), interval_eigenvalue_kummer(reduced, 50.0, 0).lambda), 1e-5);
    const auto r5 = radial_reduce(OperatorSpec::make_power_law(1.0, 1.0, 1.0, 5));
    EXPECT_EQ(interval_eigenvalue_kummer(reduced, 50.0, 0).lambda, interval_eigenvalue_kummer(r5, 50.0, 0).lambda);
    EXPECT_THROW(radial_reduce(classical(1.0)), DomainError);
}

TEST(Radial, MonotoneInRadius) {
    double prev = INFINITY;
    for (double L : {0.8, 1.0, 1.2, 1.5}) {
        // small xi L^2: far from the localized regime, so use the discrete oracle
        const double lam = fd_eigs_oracle(classical(1.0, L), 3.0, Grid1D::graded(2000, L), 1, {1e-6, false, false}).pairs[0].lambda;
        EXPECT_LE(lam, prev);
        prev = lam;
    }
}

TEST(GeneralizedGap, ClassicalProfileIsExact) {
    const auto g = generalized_eigenvalue_near(classical(1.0), 100.0);
    EXPECT_LE(rel(g.Lambda, 400.0), 1e-6);
    EXPECT_LT(g.gap_over_sqrt_xi, 1e-4);
}

TEST(GeneralizedGap, BoundedForSineAndCubic) {
    auto slope_of = [](const OperatorSpec& s) {
        std::vector<double> lx, ly;
        for (double xi : {100.0, 200.0, 400.0, 800.0}) {
            lx.push_back(std::log(xi));
            ly.push_back(std::log(generalized_eigenvalue_near(s, xi).gap_over_sqrt_xi));
        }
        double mx = 0, my = 0;
        for (int i = 0; i < 4; ++i) mx += lx[i] / 4, my += ly[i] / 4;
        double sxy = 0, sxx = 0;
        for (int i = 0; i < 4; ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
        return sxy / sxx;
    };
    EXPECT_LE(slope_of(OperatorSpec::make_generalized(1.0, 1.0, QProfile::sine())), 0.05);
    EXPECT_LE(slope_of(OperatorSpec::make_generalized(0.5, 1.0, QProfile::cubic())), 0.05);
}

TEST(Hardy, InequalityOnTestFunctions) {
    for (double s : {0.6, 1.0, 2.0}) {
        auto u = [s](double x) { return std::pow(x, s) * (1.0 - x); };
        auto du = [s](double x) { return s * std::pow(x, s - 1) * (1.0 - x) - std::pow(x, s); };
        const auto br = quad::geometric_breakpoints(0.0, 1.0, 40, 0.5);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i + 1 < br.size(); ++i) {
            lhs += quad::gauss([&](double x) { return 0.25 * u(x) * u(x) / (x * x); }, br[i], br[i + 1], 30);
            rhs += quad::gauss([&](double x) { return du(x) * du(x); }, br[i], br[i + 1], 30);
        }
        EXPECT_GT(rhs - lhs, 0.0) << s;
    }
}
