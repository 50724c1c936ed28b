#pragma once

#include <functional>
#include <vector>

namespace grushin::quad {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

// Fixed-order Gauss rule on [a, b].
double gauss(const std::function<double(double)>& f, double a, double b, int order = 20);

struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
    int panels = 0;
};

// Recursive bisection comparing 10- and 20-point Gauss rules per panel.
AdaptiveResult adaptive(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-12, double abs_tol = 0.0, int max_depth = 40);

// Panels [a, b] into pieces geometrically graded toward a (ratio < 1 shrinks
// panel size as the left end is approached). Used for x^s-type endpoint behavior.
std::vector<double> geometric_breakpoints(double a, double b, int levels, double ratio = 0.25);

// log of the integral of exp(log_f) over [a, b], composite Gauss on the given
// breakpoints. The integrand is never exponentiated unshifted.
double log_integral(const std::function<double(double)>& log_f, const std::vector<double>& breaks,
                    int order = 20);

}  // namespace grushin::quad
