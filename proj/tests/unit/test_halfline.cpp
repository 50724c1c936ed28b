#include <cmath>

#include <gtest/gtest.h>

#include "grushin/halfline.hpp"
#include "grushin/quadrature.hpp"

using namespace grushin;
using namespace grushin::halfline;

namespace {
double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

double kernel(double t, double x, double y, double xi, double nu) {
    return heat_kernel_closed(t, x, y, xi, nu).value.value();
}
}  // namespace

TEST(HalflineSpectrum, EigenvalueFormula) {
    EXPECT_DOUBLE_EQ(halfline_eigenvalue(10, 0.5, 0), 30.0);
    EXPECT_DOUBLE_EQ(halfline_eigenvalue(1, 1, 2), 12.0);
    EXPECT_DOUBLE_EQ(halfline_eigenvalue(7, 2, 0), 42.0);
    for (int k = 0; k < 6; ++k) EXPECT_DOUBLE_EQ(mu(0.7, k + 1) - mu(0.7, k), 4.0);
    const auto p = halfline_eigenpair(3.0, 1.5, 2);
    EXPECT_DOUBLE_EQ(p.eigenvalue, 3.0 * p.mu_k);
}

TEST(HalflineSpectrum, EigenfunctionSmallX) {
    const double a = halfline_eigenfunction(4, 1, 0, 1e-3), b = halfline_eigenfunction(4, 1, 0, 2e-3);
    EXPECT_NEAR(b / a, std::pow(2.0, 1.5), 1e-4);
    EXPECT_LT(std::fabs(halfline_eigenfunction(4, 1, 0, 1e-9)), 1e-12);
}

TEST(HalflineSpectrum, NormalizationAndOrthogonality) {
    auto f0 = [](double x) { return halfline_eigenfunction(4, 1, 0, x); };
    auto f1 = [](double x) { return halfline_eigenfunction(4, 1, 1, x); };
    const double n0 = quad::adaptive([&](double x) { return f0(x) * f0(x); }, 0.0, 8.0, 1e-13).value;
    const double n1 = quad::adaptive([&](double x) { return f1(x) * f1(x); }, 0.0, 8.0, 1e-13).value;
    const double o = quad::adaptive([&](double x) { return f0(x) * f1(x); }, 0.0, 8.0, 1e-13, 1e-14).value;
    EXPECT_NEAR(n0, 1.0, 1e-8);
    EXPECT_NEAR(n1, 1.0, 1e-8);
    EXPECT_NEAR(o, 0.0, 1e-8);
}

TEST(HalflineSpectrum, EigenRelationResidualConverges) {
    const double xi = 3.0, nu = 0.8;
    for (int k : {0, 2}) {
        auto residual = [&](double h) {
            double worst = 0.0;
            for (double x : {0.3, 0.6, 0.9, 1.3}) {
                const double u = halfline_eigenfunction(xi, nu, k, x);
                const double upp = (halfline_eigenfunction(xi, nu, k, x + h) - 2 * u +
                                    halfline_eigenfunction(xi, nu, k, x - h)) / (h * h);
                const double gu = -upp + (xi * xi * x * x + (nu * nu - 0.25) / (x * x)) * u;
                worst = std::max(worst, std::fabs(gu - xi * mu(nu, k) * u) / (xi * mu(nu, k)));
            }
            return worst;
        };
        const double r1 = residual(4e-3), r2 = residual(2e-3);
        EXPECT_LT(r2, r1);
        EXPECT_GT(r1 / r2, 3.0);  // second order
        EXPECT_LT(r2, 1e-4);
    }
}

TEST(HeatKernel, SymmetryAndPositivity) {
    EXPECT_EQ(kernel(0.2, 0.4, 1.1, 3.0, 0.7), kernel(0.2, 1.1, 0.4, 3.0, 0.7));
    for (double t : {1e-4, 0.05, 1.0, 4.0})
        for (double x : {0.05, 0.5, 2.0})
            for (double y : {0.1, 0.9}) EXPECT_EQ(heat_kernel_closed(t, x, y, 2.0, 1.3).value.sign, 1);
}

TEST(HeatKernel, ClosedMatchesMehler) {
    const auto c = heat_kernel_closed(0.5, 0.8, 0.8, 2.0, 1.0);
    const auto m = heat_kernel_mehler(0.5, 0.8, 0.8, 2.0, 1.0, 60);
    EXPECT_LE(rel(m.value.value(), c.value.value()), 1e-10);
    const auto c2 = heat_kernel_closed(0.1, 0.5, 0.5, 2.0, 1.0);
    const auto m2 = heat_kernel_mehler(0.1, 0.5, 0.5, 2.0, 1.0, 60);
    EXPECT_LE(rel(m2.value.value(), c2.value.value()), 1e-8);
}

TEST(HeatKernel, LargeTimeLeadingMode) {
    const double t = 3.0, xi = 2.0, nu = 1.0, x = 0.6, y = 0.9;
    const double scaled = kernel(t, x, y, xi, nu) * std::exp(2 * xi * (1 + nu) * t);
    EXPECT_LE(rel(scaled, halfline_eigenfunction(xi, nu, 0, x) * halfline_eigenfunction(xi, nu, 0, y)), 1e-6);
    const auto one = heat_kernel_mehler(t, x, y, xi, nu, 1);
    EXPECT_LE(rel(one.value.value(), kernel(t, x, y, xi, nu)), 1e-6);
}

TEST(HeatKernel, MehlerErrorNonIncreasingInTerms) {
    const double ref = kernel(0.2, 0.5, 0.7, 2.0, 1.0);
    double prev = INFINITY;
    for (int terms : {5, 10, 20, 40, 60}) {
        const double err = std::fabs(heat_kernel_mehler(0.2, 0.5, 0.7, 2.0, 1.0, terms).value.value() - ref);
        EXPECT_LE(err, prev * (1 + 1e-12) + 1e-17);
        prev = err;
    }
    EXPECT_GE(mehler_default_terms(0.2, 2.0), 1);
}

TEST(HeatKernel, SemigroupLaw) {
    struct Case {
        double xi, nu, t, s, x, y;
    };
    for (const Case c : {Case{2, 1, 0.1, 0.2, 0.5, 0.8}, Case{5, 0.5, 0.05, 0.05, 0.3, 0.4},
                         Case{1, 2, 0.3, 0.4, 1.0, 1.5}, Case{3, 0.7, 0.2, 0.1, 0.6, 0.2}}) {
        auto integrand = [&](double z) { return kernel(c.t, c.x, z, c.xi, c.nu) * kernel(c.s, z, c.y, c.xi, c.nu); };
        const double cut = 12.0 / std::sqrt(c.xi) + 3.0;
        const double lhs = quad::adaptive(integrand, 0.0, cut, 1e-12).value;
        EXPECT_LE(rel(lhs, kernel(c.t + c.s, c.x, c.y, c.xi, c.nu)), 1e-6);
    }
}

TEST(HeatKernel, SmallTimeGuard) {
    const auto k = heat_kernel_closed(1e-12, 0.5, 0.5, 1.0, 1.0);
    EXPECT_EQ(k.value.sign, 1);
    EXPECT_TRUE(std::isfinite(k.value.log_magnitude));
}

TEST(Hyperbolic, SinhCothIdentity) {
    for (double s = 0.1; s <= 20.0; s += 0.1) {
        const double sh = std::exp(log_sinh(s));
        EXPECT_NEAR(1.0 / (sh * sh) - coth(s) * coth(s), -1.0, 1e-14 * std::max(1.0, coth(s) * coth(s)));
    }
    EXPECT_NEAR(1.0 / std::pow(std::sinh(0.7), 2) - coth(0.7) * coth(0.7), -1.0, 1e-14);
}
