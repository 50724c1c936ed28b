#include "grushin/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "grushin/errors.hpp"
#include "grushin/signed_log.hpp"

namespace grushin::quad {

namespace {

GaussRule build_rule(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.nodes[i] = -x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

double panel(const std::function<double(double)>& f, double a, double b, const GaussRule& rule) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(c + h * rule.nodes[i]);
    return s * h;
}

void adaptive_rec(const std::function<double(double)>& f, double a, double b, double coarse,
                  double tol, int depth, AdaptiveResult& out) {
    const double fine = panel(f, a, b, gauss_legendre(20));
    const double err = std::fabs(fine - coarse);
    if (err <= tol || depth == 0 || b - a < 1e-15 * (std::fabs(a) + std::fabs(b))) {
        out.value += fine;
        out.error += err;
        ++out.panels;
        return;
    }
    const double m = 0.5 * (a + b);
    const auto& g10 = gauss_legendre(10);
    adaptive_rec(f, a, m, panel(f, a, m, g10), 0.5 * tol, depth - 1, out);
    adaptive_rec(f, m, b, panel(f, m, b, g10), 0.5 * tol, depth - 1, out);
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
    return *slot;
}

double gauss(const std::function<double(double)>& f, double a, double b, int order) {
    return panel(f, a, b, gauss_legendre(order));
}

AdaptiveResult adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                        double abs_tol, int max_depth) {
    AdaptiveResult out;
    if (a == b) return out;
    const double coarse = panel(f, a, b, gauss_legendre(10));
    const double scale = std::fabs(panel(f, a, b, gauss_legendre(20)));
    const double tol = std::max(abs_tol, rel_tol * scale);
    adaptive_rec(f, a, b, coarse, tol, max_depth, out);
    return out;
}

std::vector<double> geometric_breakpoints(double a, double b, int levels, double ratio) {
    std::vector<double> pts;
    pts.reserve(levels + 2);
    pts.push_back(a);
    for (int i = levels; i >= 1; --i) pts.push_back(a + (b - a) * std::pow(ratio, i));
    pts.push_back(b);
    return pts;
}

double log_integral(const std::function<double(double)>& log_f, const std::vector<double>& breaks,
                    int order) {
    const auto& rule = gauss_legendre(order);
    LogSumExp acc;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p], b = breaks[p + 1];
        if (!(b > a)) continue;
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            acc.add(std::log(rule.weights[i] * h) + log_f(c + h * rule.nodes[i]));
    }
    return acc.value();
}

}  // namespace grushin::quad
