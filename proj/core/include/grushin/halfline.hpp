#pragma once

#include "grushin/signed_log.hpp"

namespace grushin::halfline {

struct HalflineEigenpair {
    int k = 0;
    double xi = 0.0;
    double nu = 0.0;
    double eigenvalue = 0.0;
    double mu_k = 0.0;
};

// mu_k = 4k + 2(1+nu).
double mu(double nu, int k);
double halfline_eigenvalue(double xi, double nu, int k);
HalflineEigenpair halfline_eigenpair(double xi, double nu, int k);

// L2(0, inf)-normalized eigenfunction of -d2 + xi^2 x^2 + (nu^2 - 1/4)/x^2.
double halfline_eigenfunction(double xi, double nu, int k, double x);
SignedLogValue halfline_eigenfunction_log(double xi, double nu, int k, double x);

struct KernelEval {
    double t = 0.0;
    double x = 0.0;
    double x_prime = 0.0;
    double xi = 0.0;
    double nu = 0.0;
    SignedLogValue value;
    double last_term = 0.0;  // |last included Mehler term|, 0 for the closed form
};

KernelEval heat_kernel_closed(double t, double x, double x_prime, double xi, double nu);
KernelEval heat_kernel_mehler(double t, double x, double x_prime, double xi, double nu, int terms);

// Smallest term count whose first omitted weight is below 1e-16 of the leading one.
int mehler_default_terms(double t, double xi);

// Helpers shared with the Carleman weights.
double log_sinh(double s);
double coth(double s);

}  // namespace grushin::halfline
