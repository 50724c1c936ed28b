#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "grushin/agmon.hpp"
#include "grushin/operator_spec.hpp"
#include "grushin/spectrum.hpp"

namespace grushin {

struct ModeSystemOptions {
    int trunc_dim = 8;
    int n_cells = 2000;
    double grading = 2.0;
};

// Fourier mode n of the Grushin heat equation on (0, L) x (0, pi), xi_n = n.
// The basis is the discrete (FD) eigenbasis, so dynamics in it are exact.
struct ModeSystem {
    OperatorSpec spec;
    long long n = 1;
    double xi_n = 1.0;
    int trunc_dim = 8;
    std::vector<EigenPair> eigenbasis;    // discrete eigenpairs on `grid`
    std::vector<double> lambda_refined;   // Richardson-improved eigenvalues
    std::shared_ptr<const Grid1D> grid;
    std::vector<double> log_inner_weight;  // discrete L2 inner product weights (log)

    static ModeSystem build(const OperatorSpec& spec, long long n, const ModeSystemOptions& opts = {});
};

// sum_k c_k e^{-lambda_k t} u_k on the grid.
GridSamples mode_solution(const ModeSystem& sys, const std::vector<double>& coeffs, double t);
// log ||f||^2 in the discrete inner product of the basis.
double log_norm_sq(const ModeSystem& sys, const GridSamples& f);
// log int_a^b f^2 on the grid, cells clipped to the window.
double log_window_mass(const ModeSystem& sys, const GridSamples& f, Interval omega);

double predicted_minimal_time(const OperatorSpec& spec, double a);

struct RatioResult {
    double log_ratio = 0.0;
    double lambda = 0.0;     // refined ground eigenvalue
    double log_mass = 0.0;   // log int_omega u_0^2 (shooting profile)
    double ratio() const;    // may be 0 or +inf; the log value is authoritative
};

// log R_n = log(2 lambda) - 2 lambda T - log(1 - e^{-2 lambda T}) - log m_omega.
double log_ratio_formula(double lambda, double log_mass, double T);

// Ground mass is taken from a log-domain shooting profile at the refined
// eigenvalue. eta is the relative shooting step.
RatioResult observability_ratio(const ModeSystem& sys, Interval omega, double T, double eta = 2e-3);

enum class Classification { ObservableAtDeskScale, NotObservable, Inconclusive };
std::string to_string(Classification c);

struct ModeRow {
    long long n = 0;
    double lambda = 0.0;
    double lambda_error = 0.0;
    double log_mass = 0.0;
    double log_ratio = 0.0;
    double ratio = 0.0;
    std::optional<double> log_gramian;  // only when the basis resolves the window
};

struct ObsSweepOptions {
    ModeSystemOptions resolution;
    double shooting_eta = 2e-3;
    double r2_min = 0.95;
    double sigma_margin = 2.0;
    double bound_tol = 1.0;  // allowed rise of log R in the top half when observable
    bool stability_check = true;
    bool gramian = true;
    int threads = 0;
};

struct ObservabilityReport {
    Interval omega;
    double T = 0.0;
    double predicted_T_star = 0.0;
    std::vector<ModeRow> per_mode;  // sorted by n
    double fitted_growth_rate = 0.0;
    double fit_intercept = 0.0;
    double fit_r_squared = 0.0;
    double fit_slope_stderr = 0.0;
    double predicted_growth_rate = 0.0;
    Classification classification = Classification::Inconclusive;
    bool stability_checked = false;
    bool stable = true;
    Classification refined_classification = Classification::Inconclusive;
};

// Slope of log R_n per unit n predicted from the Agmon rate and the dissipation.
double predicted_growth_rate(const OperatorSpec& spec, Interval omega, double T);

ObservabilityReport obs_sweep(const OperatorSpec& spec, Interval omega, double T,
                              const std::vector<long long>& n_list, const ObsSweepOptions& opts = {});

struct GramianResult {
    double value = 0.0;       // generalized min eigenvalue of W against M
    double log_value = 0.0;
    double spec_ratio = 0.0;  // lambda_min(W) / lambda_min(M), may underflow
    double log_spec_ratio = 0.0;
    bool rank_warning = false;
};

GramianResult gramian_min_eig(const ModeSystem& sys, Interval omega, double T);

// T at which the fitted slope of log R_n over n_list vanishes.
struct TransitionResult {
    double T = 0.0;
    double predicted = 0.0;
    std::vector<ModeRow> rows;
};
TransitionResult empirical_transition_time(const OperatorSpec& spec, Interval omega,
                                           const std::vector<long long>& n_list, const ObsSweepOptions& opts = {});

}  // namespace grushin
