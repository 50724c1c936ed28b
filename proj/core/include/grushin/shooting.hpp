#pragma once

#include <vector>

#include "grushin/operator_spec.hpp"

namespace grushin {

// Ground state of -u'' + V u on (0, L), u(L) = 0, sampled in log form.
// Obtained by piecewise-constant-potential shooting from a Frobenius start
// near 0 and from L, matched at the right turning point. Masses of order
// e^{-10^8} stay representable because only log|u| is ever stored.
struct LogProfile {
    std::vector<double> x;
    std::vector<double> log_abs;  // log|u|, normalized so that int_0^L u^2 = 1
    std::vector<int> sign;
    double lambda = 0.0;          // shooting eigenvalue
    double x_match = 0.0;
    double log_head_mass = 0.0;   // log int_0^{x[0]} u^2
    int iterations = 0;

    // log int_a^b u^2 dx, exponential-fit rule per cell.
    double log_mass(double a, double b) const;
    double log_value(double x) const;
};

struct ShootingOptions {
    double eta = 2e-3;               // relative step h = eta * x
    double rel_tol = 1e-14;          // on lambda
    int max_iter = 300;
    std::vector<double> required_nodes;  // e.g. window end points
};

LogProfile ground_state_profile(const OperatorSpec& spec, double xi, double lambda_guess,
                                const ShootingOptions& opts = {});

}  // namespace grushin
