#pragma once

#include "grushin/signed_log.hpp"

namespace grushin::specfun {

// Rising factorial (a)_k = a(a+1)...(a+k-1).
double pochhammer(double a, int k);

// Thread-safe log|Gamma(x)|.
double log_gamma(double x);

struct KummerOptions {
    double cancellation_budget = 1e12;
    int max_terms = 200000;
    bool throw_on_precision_loss = true;
};

// Raw series outcome with cancellation diagnostics.
struct KummerSeries {
    SignedLogValue value;
    double log_max_partial = 0.0;  // log of the largest |partial sum| or |term|
    int terms = 0;
    bool precision_loss = false;
};

// M(a,b,z) with a = a_int + a_offset. Pochhammer factors are formed as
// double(a_int + i) + a_offset so that a near a non-positive integer keeps
// full relative accuracy in the offset. Never throws PrecisionLoss.
KummerSeries kummer_series(long a_int, double a_offset, double b, double z,
                           const KummerOptions& opts = {});

// Derivative in z through M' = (a/b) M(a+1, b+1, z), same splitting of a.
KummerSeries kummer_series_dz(long a_int, double a_offset, double b, double z,
                              const KummerOptions& opts = {});

SignedLogValue kummer_m(double a, double b, double z, const KummerOptions& opts = {});
SignedLogValue kummer_m_dz(double a, double b, double z, const KummerOptions& opts = {});

// Generalized Laguerre polynomial by three-term recurrence in k.
double laguerre(int k, double nu, double x);

// Modified Bessel function of the first kind.
SignedLogValue bessel_i(double nu, double z);

// log(I_nu(z)) - z, for z > 0. Cancellation-free piece of kernel formulas.
double log_bessel_i_scaled(double nu, double z);

// Ascending series in log form, valid for any z > 0 (slow for large z).
double log_bessel_i_series(double nu, double z);
// Hankel large-argument expansion of log(I_nu(z)) - z. Sets ok = false if the
// asymptotic terms never fall below round-off.
double log_bessel_i_asymptotic_scaled(double nu, double z, bool* ok = nullptr);

inline constexpr double kBesselSwitch = 30.0;

}  // namespace grushin::specfun
