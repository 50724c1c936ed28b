#include "grushin/halfline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>
#include <numbers>

#include "grushin/errors.hpp"
#include "grushin/specfun.hpp"

namespace grushin::halfline {

using specfun::log_gamma;

double mu(double nu, int k) { return 4.0 * k + 2.0 * (1.0 + nu); }

double halfline_eigenvalue(double xi, double nu, int k) {
    if (!(xi > 0.0) || !(nu > 0.0)) throw DomainError("halfline", "xi and nu must be > 0");
    if (k < 0) throw DomainError("halfline", "k must be >= 0");
    return xi * mu(nu, k);
}

HalflineEigenpair halfline_eigenpair(double xi, double nu, int k) {
    return {k, xi, nu, halfline_eigenvalue(xi, nu, k), mu(nu, k)};
}

SignedLogValue halfline_eigenfunction_log(double xi, double nu, int k, double x) {
    if (!(x > 0.0)) throw DomainError("halfline", "eigenfunction needs x > 0");
    const double log_pre = 0.5 * (std::numbers::ln2 + (1.0 + nu) * std::log(xi) + log_gamma(k + 1.0) -
                                  log_gamma(1.0 + nu + k));
    const double lag = specfun::laguerre(k, nu, xi * x * x);
    return SignedLogValue::from_double(lag).scaled_log(log_pre - 0.5 * xi * x * x + (0.5 + nu) * std::log(x));
}

double halfline_eigenfunction(double xi, double nu, int k, double x) {
    return halfline_eigenfunction_log(xi, nu, k, x).value();
}

double log_sinh(double s) {
    if (s < 1e-8) return std::log(s);
    if (s > 20.0) return s - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * s));
    return std::log(std::sinh(s));
}

double coth(double s) {
    if (s < 1e-8) return 1.0 / s;
    return 1.0 / std::tanh(s);
}

KernelEval heat_kernel_closed(double t, double x, double x_prime, double xi, double nu) {
    if (!(t > 0.0)) throw DomainError("halfline", "heat kernel needs t > 0");
    if (!(x > 0.0) || !(x_prime > 0.0)) throw DomainError("halfline", "heat kernel needs x, x' > 0");
    const double s = 2.0 * xi * t;
    const double lsh = log_sinh(s);
    const double log_z = std::log(xi) + std::log(x) + std::log(x_prime) - lsh;
    const double z = std::exp(log_z);
    // The exponent z - (xi/2)(x^2+x'^2)coth(s) regrouped to avoid cancellation.
    const double d = x - x_prime;
    const double tanh_half = s < 1e-8 ? 0.5 * s : std::tanh(0.5 * s);
    const double expo = -0.5 * xi * d * d * coth(s) - xi * x * x_prime * tanh_half;
    double log_bessel_minus_z;
    if (z > 0.0) {
        log_bessel_minus_z = specfun::log_bessel_i_scaled(nu, z);
    } else {
        log_bessel_minus_z = nu * (log_z - std::numbers::ln2) - log_gamma(nu + 1.0);
    }
    KernelEval out{t, x, x_prime, xi, nu, {}, 0.0};
    const double log_val = std::log(xi) + 0.5 * (std::log(x) + std::log(x_prime)) - lsh +
                           log_bessel_minus_z + expo;
    out.value = SignedLogValue::from_log(1, log_val);
    return out;
}

KernelEval heat_kernel_mehler(double t, double x, double x_prime, double xi, double nu, int terms) {
    if (!(t > 0.0)) throw DomainError("halfline", "heat kernel needs t > 0");
    if (terms < 1) throw DomainError("halfline", "Mehler sum needs terms >= 1");
    std::vector<SignedLogValue> parts;
    parts.reserve(terms);
    double max_log = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < terms; ++k) {
        const SignedLogValue p = halfline_eigenfunction_log(xi, nu, k, x) *
                                 halfline_eigenfunction_log(xi, nu, k, x_prime);
        const SignedLogValue term = p.scaled_log(-xi * mu(nu, k) * t);
        parts.push_back(term);
        if (!term.is_zero()) max_log = std::max(max_log, term.log_magnitude);
    }
    double sum = 0.0, comp = 0.0;
    for (const auto& p : parts) {
        const double v = p.is_zero() ? 0.0 : p.sign * std::exp(p.log_magnitude - max_log);
        const double s2 = sum + v;
        comp += std::fabs(sum) >= std::fabs(v) ? (sum - s2) + v : (v - s2) + sum;
        sum = s2;
    }
    KernelEval out{t, x, x_prime, xi, nu, {}, 0.0};
    out.value = SignedLogValue::from_double(sum + comp).scaled_log(max_log);
    out.last_term = parts.back().is_zero() ? 0.0 : std::exp(parts.back().log_magnitude);
    return out;
}

int mehler_default_terms(double t, double xi) {
    const double n = 16.0 * std::log(10.0) / (4.0 * xi * t);
    return static_cast<int>(std::ceil(n)) + 1;
}

}  // namespace grushin::halfline
