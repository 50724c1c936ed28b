#include "grushin/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "grushin/errors.hpp"

namespace grushin::specfun {

namespace {

constexpr double kRescaleThreshold = 1e280;
// 2^-600, applied to every running quantity when one of them gets too large.
const double kRescaleFactor = std::ldexp(1.0, -600);
const double kRescaleLog = 600.0 * std::numbers::ln2;

bool is_nonpositive_integer(double b) { return b <= 0.0 && b == std::floor(b); }

// Neumaier's variant of Kahan summation.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double total() const { return sum + comp; }
    void scale(double f) {
        sum *= f;
        comp *= f;
    }
};

}  // namespace

double pochhammer(double a, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= a + i;
    return r;
}

double log_gamma(double x) {
    int sign = 0;
    return lgamma_r(x, &sign);
}

KummerSeries kummer_series(long a_int, double a_offset, double b, double z,
                           const KummerOptions& opts) {
    if (is_nonpositive_integer(b))
        throw DomainError("specfun", "kummer_m: b must not be zero or a negative integer");
    if (!(z >= 0.0) || !std::isfinite(z))
        throw DomainError("specfun", "kummer_m: z must be finite and >= 0");

    KummerSeries out;
    if (z == 0.0) {
        out.value = SignedLogValue::from_double(1.0);
        out.terms = 1;
        return out;
    }

    double log_scale = 0.0;
    double term = 1.0;
    double max_abs = 1.0;
    CompensatedSum acc;
    int small_run = 0;
    long j = 0;
    for (;; ++j) {
        acc.add(term);
        max_abs = std::max({max_abs, std::fabs(acc.total()), std::fabs(term)});

        const double factor = static_cast<double>(a_int + j) + a_offset;
        if (factor == 0.0) break;  // polynomial: every later term vanishes
        const double ratio = factor * z / ((b + static_cast<double>(j)) * static_cast<double>(j + 1));
        term *= ratio;

        // Small terms only count once they have started to shrink for good.
        if (std::fabs(term) <= 1e-18 * max_abs && std::fabs(ratio) < 1.0) {
            if (++small_run >= 3) break;
        } else {
            small_run = 0;
        }
        if (j > opts.max_terms)
            throw ConvergenceError("specfun", "kummer_m: series did not terminate");

        if (max_abs > kRescaleThreshold) {
            term *= kRescaleFactor;
            acc.scale(kRescaleFactor);
            max_abs *= kRescaleFactor;
            log_scale += kRescaleLog;
        }
    }

    const double total = acc.total();
    out.terms = static_cast<int>(j + 1);
    out.log_max_partial = std::log(max_abs) + log_scale;
    out.value = SignedLogValue::from_double(total).scaled_log(log_scale);
    if (total == 0.0) {
        out.precision_loss = true;
    } else {
        out.precision_loss =
            out.log_max_partial - out.value.log_magnitude > std::log(opts.cancellation_budget);
    }
    return out;
}

KummerSeries kummer_series_dz(long a_int, double a_offset, double b, double z,
                              const KummerOptions& opts) {
    if (is_nonpositive_integer(b))
        throw DomainError("specfun", "kummer_m_dz: b must not be zero or a negative integer");
    const double a = static_cast<double>(a_int) + a_offset;
    if (a == 0.0) {
        KummerSeries out;
        out.terms = 1;
        return out;
    }
    KummerSeries s = kummer_series(a_int + 1, a_offset, b + 1.0, z, opts);
    const SignedLogValue pre = SignedLogValue::from_double(a / b);
    s.value = s.value * pre;
    s.log_max_partial += pre.log_magnitude;
    return s;
}

SignedLogValue kummer_m(double a, double b, double z, const KummerOptions& opts) {
    const KummerSeries s = kummer_series(0, a, b, z, opts);
    if (s.precision_loss && opts.throw_on_precision_loss)
        throw PrecisionLoss("specfun", "kummer_m: cancellation exceeds budget");
    return s.value;
}

SignedLogValue kummer_m_dz(double a, double b, double z, const KummerOptions& opts) {
    const KummerSeries s = kummer_series_dz(0, a, b, z, opts);
    if (s.precision_loss && !s.value.is_zero() && opts.throw_on_precision_loss)
        throw PrecisionLoss("specfun", "kummer_m_dz: cancellation exceeds budget");
    return s.value;
}

double laguerre(int k, double nu, double x) {
    if (k == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 + nu - x;
    for (int i = 1; i < k; ++i) {
        const double next = ((2.0 * i + 1.0 + nu - x) * cur - (i + nu) * prev) / (i + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double log_bessel_i_series(double nu, double z) {
    if (z <= 0.0) throw DomainError("specfun", "bessel series needs z > 0");
    const double q = 0.25 * z * z;
    double term = 1.0;
    double sum = 1.0;
    double log_scale = 0.0;
    for (int k = 0; k < 100000; ++k) {
        term *= q / ((k + 1.0) * (k + 1.0 + nu));
        sum += term;
        if (term < 1e-17 * sum && k + 1 > 0.5 * z) break;
        if (sum > kRescaleThreshold) {
            term *= kRescaleFactor;
            sum *= kRescaleFactor;
            log_scale += kRescaleLog;
        }
    }
    return nu * std::log(0.5 * z) - log_gamma(nu + 1.0) + std::log(sum) + log_scale;
}

double log_bessel_i_asymptotic_scaled(double nu, double z, bool* ok) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0;
    double sum = 1.0;
    bool converged = false;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu - odd * odd) / (k * 8.0 * z);
        if (std::fabs(next) > std::fabs(term)) break;  // divergent tail reached
        term = next;
        sum += term;
        if (std::fabs(term) < 1e-17 * std::fabs(sum)) {
            converged = true;
            break;
        }
    }
    if (ok) *ok = converged;
    return -0.5 * std::log(2.0 * std::numbers::pi * z) + std::log(sum);
}

double log_bessel_i_scaled(double nu, double z) {
    if (!(z > 0.0)) throw DomainError("specfun", "log_bessel_i_scaled needs z > 0");
    if (z > kBesselSwitch) {
        bool ok = false;
        const double v = log_bessel_i_asymptotic_scaled(nu, z, &ok);
        if (ok) return v;
    }
    return log_bessel_i_series(nu, z) - z;
}

SignedLogValue bessel_i(double nu, double z) {
    if (nu < 0.0) throw DomainError("specfun", "bessel_i: nu must be >= 0");
    if (z < 0.0) throw DomainError("specfun", "bessel_i: z must be >= 0");
    if (z == 0.0) return nu == 0.0 ? SignedLogValue::from_double(1.0) : SignedLogValue::zero();
    return SignedLogValue::from_log(1, log_bessel_i_scaled(nu, z) + z);
}

}  // namespace grushin::specfun
