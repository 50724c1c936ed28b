#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "grushin/operator_spec.hpp"
#include "grushin/signed_log.hpp"
#include "grushin/tridiagonal.hpp"

namespace grushin {

// Offset graded mesh on (0, L]: node_j = L((j+1/2)/N)^p, faces L(j/N)^p.
struct Grid1D {
    int n_cells = 0;
    double grading_exponent = 2.0;
    double L = 1.0;
    std::vector<double> nodes;
    std::vector<double> faces;         // n_cells + 1 entries, faces[0] = 0, faces[N] = L
    std::vector<double> quad_weights;  // cell lengths, sum to L

    static Grid1D graded(int n_cells, double L, double p = 2.0);
};

// u(x) = A e^{-xi x^2/2} x^{1/2+nu} M(a, 1+nu, xi x^2), a = a_int + a_offset.
struct KummerForm {
    long a_int = 0;
    double a_offset = 0.0;
    double nu = 1.0;
    double xi = 1.0;
    double L = 1.0;
    double log_prefactor = 0.0;  // log A
    double log_norm = 0.0;       // log of the squared L2 norm when A = 1
    double residual_ratio = 0.0; // |M(a, b, xi L^2)| / max partial sum
};

// Values on a grid, with a log-domain copy that keeps exponentially small tails.
struct GridSamples {
    std::shared_ptr<const Grid1D> grid;
    std::vector<double> values;
    std::vector<int> sign;
    std::vector<double> log_abs;
};

struct EigenPair {
    int k = 0;
    double xi = 0.0;
    double lambda = 0.0;
    double a_param = 0.0;
    std::variant<KummerForm, GridSamples> representation;
    bool normalized = false;

    bool is_kummer() const { return std::holds_alternative<KummerForm>(representation); }
    const KummerForm& kummer() const { return std::get<KummerForm>(representation); }
    const GridSamples& samples() const { return std::get<GridSamples>(representation); }
};

// a = -(lambda - 2 xi (1+nu)) / (4 xi)
double a_parameter(double lambda, double xi, double nu);

// Factored: u = x^{1/2+nu} v with v discretized in the weight x^{1+2nu}
// (exact similarity, smooth v, second order for every nu > 0).
// Direct: -u'' + V u with the inverse-square term sampled at nodes.
enum class FdScheme { Factored, Direct };

struct FdOptions {
    double rel_tol = 1e-6;     // threshold for the resolution warning
    bool eigenvectors = true;
    bool richardson = true;    // also solve on n_cells/2
    FdScheme scheme = FdScheme::Factored;
};

struct FdResult {
    std::vector<EigenPair> pairs;        // discrete eigenpairs on the given grid
    std::vector<double> coarse;          // eigenvalues on n_cells/2 (if richardson)
    std::vector<double> richardson;      // (4 lambda_N - lambda_{N/2}) / 3
    std::vector<double> error_estimate;  // |lambda_N - richardson|
    bool resolution_warning = false;

    double best(int k) const { return richardson.empty() ? pairs[k].lambda : richardson[k]; }
};

// Symmetric (W^{-1/2} K W^{-1/2}) tridiagonal matrix of the finite-volume
// discretization. dim >= 3 uses the radial measure r^{d-1} dr.
tridiag::SymTridiag assemble_operator(const OperatorSpec& spec, double xi, const Grid1D& grid,
                                     FdScheme scheme = FdScheme::Factored);
// Cell masses used by the discrete inner product.
std::vector<double> mass_weights(const OperatorSpec& spec, const Grid1D& grid,
                                 FdScheme scheme = FdScheme::Factored);
// Exponent s with u = x^s v in the factored scheme (0 for the direct scheme).
double factor_exponent(const OperatorSpec& spec, FdScheme scheme);

FdResult fd_eigs_oracle(const OperatorSpec& spec, double xi, const Grid1D& grid, int count,
                        const FdOptions& opts = {});

// Truncation extent X <= L beyond which the lowest `count` modes are below
// e^{-60} of their peak. Verified a posteriori by fd_eigs_adapted.
double suggest_extent(const OperatorSpec& spec, double xi, int count);
FdResult fd_eigs_adapted(const OperatorSpec& spec, double xi, int n_cells, int count,
                         const FdOptions& opts = {}, double grading = 2.0);

struct KummerRootOptions {
    double cancellation_budget = 1e12;
    double max_xi_L2 = 120.0;
    double tau = 0.9;
    bool normalize = true;
};

EigenPair interval_eigenvalue_kummer(const OperatorSpec& spec, double xi, int k,
                                     const KummerRootOptions& opts = {});

double interval_eigenfunction_eval(const EigenPair& pair, double x);
SignedLogValue interval_eigenfunction_log(const EigenPair& pair, double x);
// Derivative of the eigenfunction at x (Kummer form only).
SignedLogValue interval_eigenfunction_dx_log(const EigenPair& pair, double x);

bool monotone_concave_check(const EigenPair& pair, int samples = 400);

struct GroundScalingResult {
    double mu_bar = 0.0;
    std::vector<std::pair<double, double>> samples;  // (xi, lambda0)
    std::vector<double> tolerances;
    double fitted_exponent = 0.0;
    double fitted_prefactor = 0.0;
    bool lower_bound_holds = true;
    std::vector<double> sandwich_upper;  // (1+eps)(mu_bar+eps) xi^{2/(1+gamma)}
    int sandwich_violations = 0;
};

GroundScalingResult gamma_ground_scaling(const OperatorSpec& spec, const std::vector<double>& xi_list,
                                         int n_cells = 4000, double sandwich_eps = 0.1);

struct MuBarResult {
    double value = 0.0;
    double R = 0.0;
    int doublings = 0;
    double last_change = 0.0;
};
MuBarResult halfline_mu_bar_detail(double nu, double gamma, int n_cells = 4000);
double halfline_mu_bar(double nu, double gamma);

OperatorSpec radial_reduce(const OperatorSpec& spec);

struct GeneralizedGap {
    double Lambda = 0.0;
    double gap_over_sqrt_xi = 0.0;
};
GeneralizedGap generalized_eigenvalue_near(const OperatorSpec& spec, double xi, int n_cells = 4000);

}  // namespace grushin
