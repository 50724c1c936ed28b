#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "grushin/agmon.hpp"
#include "grushin/observability.hpp"

namespace grushin {

// phi = (xi/2)(L^2 - x^2) coth(2 xi t)
struct CothWeight {
    double xi = 1.0;
    double L = 1.0;
    double T = std::numeric_limits<double>::infinity();
};

// psi = (M theta(t)/2)(L^2 - x^2), theta blowing up like (t/T)^{-k} at both ends.
struct NearSingularityWeight {
    double M = 1.0;
    double T = 1.0;
    double k = 2.0;
    double L = 1.0;
};

// psi = A xi theta + theta - sqrt(xi) theta ((x-a)^2/2 - 2L(x-a)), theta = 1/t near 0.
struct AwayWeight {
    double A = 0.05;
    double xi = 1.0;
    double T = 1.0;
    double a = 0.5;
    double L = 1.0;
};

using CarlemanWeightSpec = std::variant<CothWeight, NearSingularityWeight, AwayWeight>;

struct WeightValues {
    double psi = 0.0;
    double psi_x = 0.0;
    double psi_t = 0.0;
    double psi_xx = 0.0;
};

WeightValues weight_eval(const CarlemanWeightSpec& spec, double t, double x);
// Largest relative mismatch between the analytic derivatives and centered
// differences with step h (debug self-check).
double weight_derivative_residual(const CarlemanWeightSpec& spec, double t, double x, double h = 1e-5);

struct ThetaValues {
    double theta = 1.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// Smoothstep partition eta_1 + eta_2 + eta_3 = 1 on [0, 1] with plateaus
// (0,1/5), (2/5,3/5), (4/5,1).
struct Partition {
    double eta[3] = {0, 0, 0};
    double d1[3] = {0, 0, 0};
    double d2[3] = {0, 0, 0};
};
Partition partition_of_unity(double s);

ThetaValues near_singularity_theta(const NearSingularityWeight& w, double t);
// Needs T <= 3 so that the blend between 1/t and 1 stays >= 1.
ThetaValues away_theta(const AwayWeight& w, double t);

// F = psi_t - psi_x^2 + xi^2 x^2 and G = 2 psi_x F_x - F_t + psi_xxxx.
double away_F(const AwayWeight& w, double t, double x);
double away_G(const AwayWeight& w, double t, double x);
// Same G from centered differences of F (independent of the expanded formula).
double away_G_numeric(const AwayWeight& w, double t, double x);

struct ThetaConstants {
    double c1 = 0.0;  // max |theta'| / theta^{p1}
    double c2 = 0.0;  // max |theta''| / theta^{p2}
};
// Near-singularity weight: p1 = 1 + 1/k, p2 = 1 + 2/k.
ThetaConstants theta_constants(const NearSingularityWeight& w, const std::vector<double>& t_grid);
// Away weight: p1 = 2, p2 = 3.
ThetaConstants theta_constants(const AwayWeight& w, const std::vector<double>& t_grid);

struct SignTableResult {
    bool psi_x_positive = true;
    bool psi_xx_negative = true;
    double max_boundary_slope_error = 0.0;  // |psi_x(t,a) - 2 L sqrt(xi) theta| / that
    bool holds() const { return psi_x_positive && psi_xx_negative && max_boundary_slope_error < 1e-12; }
};
SignTableResult away_sign_table(const AwayWeight& w, const std::vector<double>& t_grid,
                                const std::vector<double>& x_grid);

// G >= 2 (L+a)^2 xi^{3/2} theta^3 on the grid; threshold is the smallest
// candidate xi from which the bound holds at every larger candidate.
struct GLowerBoundResult {
    double threshold = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> xi;
    std::vector<double> min_ratio;  // min over grid of G / bound
};
GLowerBoundResult g_psi_lower_bound(const AwayWeight& base, const std::vector<double>& xi_candidates,
                                    const std::vector<double>& t_grid, const std::vector<double>& x_grid);

// g = f e^{-scale * phi} on the basis grid.
GridSamples conjugate_solution(const ModeSystem& sys, const std::vector<double>& coeffs, const CothWeight& w,
                               double t, double weight_scale = 1.0);

struct ConjugateLimit {
    std::vector<double> t;
    std::vector<double> log_norm;  // log ||g(t)||
    bool decreasing = true;
};
ConjugateLimit conjugate_limit_check(const ModeSystem& sys, const std::vector<double>& coeffs, const CothWeight& w,
                                     double T, int j_from = 4, int j_to = 12);

struct InequalityMargin {
    double lhs_log = 0.0;
    double rhs_log = 0.0;
    double margin = 0.0;
    double discretization_error_estimate = 0.0;
    double log_observation = 0.0;  // log of the observation integral
    std::string method;            // basis used for the primary evaluation
    bool passes() const { return margin >= -discretization_error_estimate; }
};

struct CostCheckOptions {
    double eps = 0.05;
    double delta = 0.05;
    bool prefer_kummer = true;
};

// ||f(T)||^2 <= C xi e^{L^2/2T} e^{xi L^2} int_0^T |f_x(t,L)|^2 dt
InequalityMargin boundary_cost_check(const ModeSystem& sys, const std::vector<double>& coeffs, double T,
                                     double log_C, const CostCheckOptions& opts = {});

// ||f(T)||^2 <= C (e^{xi (a+eps/2)^2 / sqrt(1-3 delta/2)} + e^{2 eps xi}) int_0^T int_a^b |f|^2
InequalityMargin interior_cost_check(const ModeSystem& sys, const std::vector<double>& coeffs, Interval omega,
                                     double T, double log_C, const CostCheckOptions& opts = {});
double interior_cost_exponent(double xi, Interval omega, double eps, double delta);

// Global boundary estimate for g = f e^{-phi}, all left-hand terms at t = T:
// int g_x^2 - xi^2 L^2/sinh^2(2 xi T) g^2 + (nu^2-1/4)/x^2 g^2
//   <= xi L int_0^T sinh(4 xi t)/sinh^2(2 xi T) |g_x(t,L)|^2 dt.
// Closed-form eigenfunctions only (gamma = 1).
InequalityMargin global_boundary_carleman_check(const OperatorSpec& spec, double xi,
                                                const std::vector<double>& coeffs, double T);

std::vector<double> random_coefficients(int count, std::uint64_t seed);

}  // namespace grushin
