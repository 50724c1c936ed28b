#include "grushin/observability.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "grushin/errors.hpp"
#include "grushin/fit.hpp"
#include "grushin/parallel.hpp"
#include "grushin/shooting.hpp"
#include "grushin/signed_log.hpp"

namespace grushin {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_window(const OperatorSpec& spec, Interval omega) {
    if (!(omega.a >= 0.0 && omega.a < omega.b && omega.b <= spec.L))
        throw DomainError("observability", "omega must satisfy 0 <= a < b <= L");
}

// Fraction of cell j of the grid lying inside the window.
double cell_fraction(const Grid1D& g, std::size_t j, Interval w) {
    const double lo = std::max(w.a, g.faces[j]), hi = std::min(w.b, g.faces[j + 1]);
    return hi > lo ? (hi - lo) / (g.faces[j + 1] - g.faces[j]) : 0.0;
}

}  // namespace

ModeSystem ModeSystem::build(const OperatorSpec& spec, long long n, const ModeSystemOptions& opts) {
    if (n < 1) throw DomainError("observability", "mode index n must be >= 1");
    if (opts.trunc_dim < 8) throw DomainError("observability", "trunc_dim must be >= 8");
    if (spec.dim != 1) throw DomainError("observability", "mode systems are one-dimensional; reduce radially first");
    ModeSystem sys;
    sys.spec = spec;
    sys.n = n;
    sys.xi_n = static_cast<double>(n);
    sys.trunc_dim = opts.trunc_dim;
    FdResult fd = fd_eigs_adapted(spec, sys.xi_n, opts.n_cells, opts.trunc_dim, {1e-6, true, true}, opts.grading);
    sys.eigenbasis = std::move(fd.pairs);
    for (int k = 0; k < opts.trunc_dim; ++k) sys.lambda_refined.push_back(fd.best(k));
    sys.grid = sys.eigenbasis.front().samples().grid;
    const auto w = mass_weights(spec, *sys.grid);
    const double s = factor_exponent(spec, FdScheme::Factored);
    sys.log_inner_weight.resize(w.size());
    for (std::size_t j = 0; j < w.size(); ++j)
        sys.log_inner_weight[j] = std::log(w[j]) - 2.0 * s * std::log(sys.grid->nodes[j]);
    return sys;
}

GridSamples mode_solution(const ModeSystem& sys, const std::vector<double>& coeffs, double t) {
    if (static_cast<int>(coeffs.size()) != sys.trunc_dim)
        throw DomainError("observability", "coeffs length must equal trunc_dim");
    if (!(t >= 0.0)) throw DomainError("observability", "t must be >= 0");
    const std::size_t m = sys.grid->nodes.size();
    GridSamples out;
    out.grid = sys.grid;
    out.values.assign(m, 0.0);
    out.sign.assign(m, 0);
    out.log_abs.assign(m, kNegInf);
    for (std::size_t j = 0; j < m; ++j) {
        SignedLogValue acc;
        for (int k = 0; k < sys.trunc_dim; ++k) {
            if (coeffs[k] == 0.0) continue;
            const auto& u = sys.eigenbasis[k].samples();
            const auto term = SignedLogValue::from_double(coeffs[k]).scaled_log(-sys.eigenbasis[k].lambda * t) *
                              SignedLogValue::from_log(u.sign[j], u.log_abs[j]);
            acc = acc + term;
        }
        out.sign[j] = acc.sign;
        out.log_abs[j] = acc.log_magnitude;
        out.values[j] = acc.value();
    }
    return out;
}

double log_norm_sq(const ModeSystem& sys, const GridSamples& f) {
    LogSumExp acc;
    for (std::size_t j = 0; j < f.log_abs.size(); ++j) acc.add(sys.log_inner_weight[j] + 2.0 * f.log_abs[j]);
    return acc.value();
}

double log_window_mass(const ModeSystem& sys, const GridSamples& f, Interval omega) {
    LogSumExp acc;
    for (std::size_t j = 0; j < f.log_abs.size(); ++j) {
        const double frac = cell_fraction(*sys.grid, j, omega);
        if (frac > 0.0) acc.add(std::log(frac) + sys.log_inner_weight[j] + 2.0 * f.log_abs[j]);
    }
    return acc.value();
}

double predicted_minimal_time(const OperatorSpec& spec, double a) {
    if (!(a > 0.0)) throw DomainError("observability", "a must be > 0");
    if (spec.order() > 1) return kInf;
    const double nu = spec.nu;
    if (spec.power_law) return a * a / (4.0 * (1.0 + nu));
    const AgmonSpec level = AgmonSpec::make(spec.q_profile, 0.0, {0.0, std::min(a, spec.L)}, spec.L);
    const double d = agmon_distance(level, 0.0, a);
    return d / (2.0 * spec.q_profile.derivative_at_zero * (1.0 + nu));
}

double RatioResult::ratio() const { return std::exp(log_ratio); }

double log_ratio_formula(double lambda, double log_mass, double T) {
    const double x = 2.0 * lambda * T;
    return std::log(2.0 * lambda) - x - std::log(-std::expm1(-x)) - log_mass;
}

RatioResult observability_ratio(const ModeSystem& sys, Interval omega, double T, double eta) {
    check_window(sys.spec, omega);
    if (!(T > 0.0)) throw DomainError("observability", "T must be > 0");
    ShootingOptions so;
    so.eta = eta;
    so.required_nodes = {omega.a, omega.b};
    const LogProfile prof = ground_state_profile(sys.spec, sys.xi_n, sys.lambda_refined.front(), so);
    RatioResult r;
    r.lambda = sys.lambda_refined.front();
    r.log_mass = prof.log_mass(omega.a, omega.b);
    if (!std::isfinite(r.log_mass)) throw DegenerateWindow("observability", "ground-state mass on omega vanishes");
    r.log_ratio = log_ratio_formula(r.lambda, r.log_mass, T);
    return r;
}

std::string to_string(Classification c) {
    switch (c) {
        case Classification::ObservableAtDeskScale: return "ObservableAtDeskScale";
        case Classification::NotObservable: return "NotObservable";
        default: return "Inconclusive";
    }
}

double predicted_growth_rate(const OperatorSpec& spec, Interval omega, double T) {
    const AgmonSpec level = AgmonSpec::make(spec.q_profile, 0.0, omega, spec.L);
    const double d = agmon_distance(level, 0.0, omega.a);
    if (spec.order() > 1) return 2.0 * d;  // the dissipation 2 lambda_0 T is sublinear in n
    return 2.0 * d - 4.0 * spec.q_profile.derivative_at_zero * (1.0 + spec.nu) * T;
}

GramianResult gramian_min_eig(const ModeSystem& sys, Interval omega, double T) {
    check_window(sys.spec, omega);
    if (!(T > 0.0)) throw DomainError("observability", "T must be > 0");
    const int m = sys.trunc_dim;
    if (m > 64) throw DomainError("observability", "gramian needs trunc_dim <= 64");
    const Grid1D& g = *sys.grid;
    const std::size_t cells = g.nodes.size();

    // Per-mode log scale on the window, so overlaps are formed from O(1) numbers.
    std::vector<double> scale(m, kNegInf);
    for (int k = 0; k < m; ++k) {
        const auto& u = sys.eigenbasis[k].samples();
        for (std::size_t j = 0; j < cells; ++j)
            if (cell_fraction(g, j, omega) > 0.0) scale[k] = std::max(scale[k], u.log_abs[j]);
        if (!std::isfinite(scale[k])) throw DegenerateWindow("observability", "basis does not resolve the window");
    }
    Eigen::MatrixXd O = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t j = 0; j < cells; ++j) {
        const double frac = cell_fraction(g, j, omega);
        if (frac == 0.0) continue;
        Eigen::VectorXd v(m);
        for (int k = 0; k < m; ++k) {
            const auto& u = sys.eigenbasis[k].samples();
            v[k] = u.sign[j] * std::exp(u.log_abs[j] - scale[k]);
        }
        O.noalias() += frac * std::exp(sys.log_inner_weight[j]) * v * v.transpose();
    }

    // W~ = M^{-1/2} W M^{-1/2} = S B S with S = diag(e^{scale_k + lambda_k T}).
    std::vector<double> lam(m);
    for (int k = 0; k < m; ++k) lam[k] = sys.eigenbasis[k].lambda;
    Eigen::MatrixXd B(m, m);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            const double s = lam[j] + lam[k];
            B(j, k) = O(j, k) * (-std::expm1(-s * T)) / s;
        }
    // Diagonal equilibration: B = D C D, W~ = E C E with E = S D.
    std::vector<double> e(m);
    Eigen::MatrixXd C(m, m);
    for (int k = 0; k < m; ++k) e[k] = scale[k] + lam[k] * T + 0.5 * std::log(B(k, k));
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) C(j, k) = B(j, k) / std::sqrt(B(j, j) * B(k, k));

    GramianResult out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ces(C);
    const double cmin = ces.eigenvalues()(0), cmax = ces.eigenvalues()(m - 1);

    // log lambda_min(E C E) and the same for W = E' C E' with E' = E e^{-lambda T}.
    auto log_min_eig = [&](const std::vector<double>& ex) {
        const double emin = *std::min_element(ex.begin(), ex.end());
        if (cmin > 1e-13 * cmax) {
            // lambda_min(E C E) = 1 / lambda_max(E^{-1} C^{-1} E^{-1}), accurate for graded E.
            Eigen::MatrixXd Ci = ces.eigenvectors() * ces.eigenvalues().cwiseInverse().asDiagonal() *
                                 ces.eigenvectors().transpose();
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) Ci(j, k) *= std::exp(-(ex[j] - emin) - (ex[k] - emin));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ci, Eigen::EigenvaluesOnly);
            return 2.0 * emin - std::log(es.eigenvalues()(m - 1));
        }
        out.rank_warning = true;
        // Log-scaled fallback: the smallest scale times the floor of C.
        return 2.0 * emin + std::log(std::max(cmin, 1e-16 * cmax));
    };
    out.log_value = log_min_eig(e);
    out.value = std::exp(out.log_value);
    std::vector<double> ew(m);
    double lam_max = 0.0;
    for (int k = 0; k < m; ++k) {
        ew[k] = e[k] - lam[k] * T;
        lam_max = std::max(lam_max, lam[k]);
    }
    out.log_spec_ratio = log_min_eig(ew) + 2.0 * lam_max * T;
    out.spec_ratio = std::exp(out.log_spec_ratio);
    return out;
}

namespace {

ModeRow compute_row(const OperatorSpec& spec, Interval omega, double T, long long n, const ObsSweepOptions& opts) {
    const ModeSystem sys = ModeSystem::build(spec, n, opts.resolution);
    ModeRow row;
    row.n = n;
    const RatioResult r = observability_ratio(sys, omega, T, opts.shooting_eta);
    row.lambda = r.lambda;
    row.lambda_error = std::fabs(sys.eigenbasis.front().lambda - r.lambda);
    row.log_mass = r.log_mass;
    row.log_ratio = r.log_ratio;
    row.ratio = r.ratio();
    if (opts.gramian && sys.trunc_dim <= 64 && sys.grid->L >= omega.b) {
        try {
            row.log_gramian = gramian_min_eig(sys, omega, T).log_value;
        } catch (const DegenerateWindow&) {
        }
    }
    return row;
}

std::vector<ModeRow> compute_rows(const OperatorSpec& spec, Interval omega, double T,
                                  std::vector<long long> n_list, const ObsSweepOptions& opts) {
    std::sort(n_list.begin(), n_list.end());
    n_list.erase(std::unique(n_list.begin(), n_list.end()), n_list.end());
    std::vector<ModeRow> rows(n_list.size());
    parallel_for(n_list.size(), opts.threads,
                 [&](std::size_t i) { rows[i] = compute_row(spec, omega, T, n_list[i], opts); });
    return rows;
}

fit::LinearFit top_half_fit(const std::vector<ModeRow>& rows) {
    const std::size_t half = rows.size() / 2;
    std::vector<double> x, y;
    for (std::size_t i = half; i < rows.size(); ++i) {
        x.push_back(static_cast<double>(rows[i].n));
        y.push_back(rows[i].log_ratio);
    }
    return fit::linear(x, y);
}

Classification classify(const std::vector<ModeRow>& rows, const fit::LinearFit& f, const ObsSweepOptions& opts) {
    const double margin = opts.sigma_margin * f.slope_stderr;
    if (f.slope > 0.0 && f.slope > margin && f.r_squared >= opts.r2_min) return Classification::NotObservable;
    const std::size_t half = rows.size() / 2;
    double low_max = kNegInf, high_max = kNegInf;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double& slot = i < half ? low_max : high_max;
        slot = std::max(slot, rows[i].log_ratio);
    }
    const bool bounded = high_max <= low_max + opts.bound_tol;
    if (f.slope <= 0.0 && bounded) return Classification::ObservableAtDeskScale;
    return Classification::Inconclusive;
}

}  // namespace

ObservabilityReport obs_sweep(const OperatorSpec& spec, Interval omega, double T, const std::vector<long long>& n_list,
                              const ObsSweepOptions& opts) {
    check_window(spec, omega);
    if (!(omega.a > 0.0)) throw DomainError("observability", "omega must satisfy a > 0");
    if (!(T > 0.0)) throw DomainError("observability", "T must be > 0");
    if (n_list.size() < 8) throw DomainError("observability", "n_range needs at least 8 modes");

    ObservabilityReport rep;
    rep.omega = omega;
    rep.T = T;
    rep.predicted_T_star = predicted_minimal_time(spec, omega.a);
    rep.predicted_growth_rate = predicted_growth_rate(spec, omega, T);
    rep.per_mode = compute_rows(spec, omega, T, n_list, opts);
    if (rep.per_mode.size() < 8) throw DomainError("observability", "n_range needs at least 8 distinct modes");
    const auto f = top_half_fit(rep.per_mode);
    rep.fitted_growth_rate = f.slope;
    rep.fit_intercept = f.intercept;
    rep.fit_r_squared = f.r_squared;
    rep.fit_slope_stderr = f.slope_stderr;
    rep.classification = classify(rep.per_mode, f, opts);

    if (opts.stability_check) {
        ObsSweepOptions fine = opts;
        fine.stability_check = false;
        fine.gramian = false;
        fine.resolution.trunc_dim *= 2;
        fine.resolution.n_cells *= 2;
        fine.shooting_eta *= 0.5;
        const auto rows = compute_rows(spec, omega, T, n_list, fine);
        rep.refined_classification = classify(rows, top_half_fit(rows), fine);
        rep.stability_checked = true;
        rep.stable = rep.refined_classification == rep.classification;
    }
    return rep;
}

TransitionResult empirical_transition_time(const OperatorSpec& spec, Interval omega,
                                           const std::vector<long long>& n_list, const ObsSweepOptions& opts) {
    check_window(spec, omega);
    if (!(omega.a > 0.0)) throw DomainError("observability", "omega must satisfy a > 0");
    TransitionResult out;
    out.predicted = predicted_minimal_time(spec, omega.a);
    if (!std::isfinite(out.predicted)) throw RegimeError("observability", "no finite minimal time to bracket");
    if (n_list.size() < 8) throw DomainError("observability", "n_range needs at least 8 modes");
    ObsSweepOptions o = opts;
    o.gramian = false;
    // Eigenvalues and masses do not depend on T; only the closed-form ratio does.
    out.rows = compute_rows(spec, omega, out.predicted, n_list, o);
    auto slope = [&](double T) {
        std::vector<ModeRow> rows = out.rows;
        for (auto& r : rows) r.log_ratio = log_ratio_formula(r.lambda, r.log_mass, T);
        return top_half_fit(rows).slope;
    };
    double lo = out.predicted / 16.0, hi = out.predicted * 16.0;
    for (int i = 0; i < 20 && slope(lo) <= 0.0; ++i) lo *= 0.5;
    for (int i = 0; i < 20 && slope(hi) >= 0.0; ++i) hi *= 2.0;
    if (!(slope(lo) > 0.0 && slope(hi) < 0.0))
        throw BracketError("observability", "fitted slope does not change sign in T");
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = std::sqrt(lo * hi);
        (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    out.T = std::sqrt(lo * hi);
    for (auto& r : out.rows) {
        r.log_ratio = log_ratio_formula(r.lambda, r.log_mass, out.T);
        r.ratio = std::exp(r.log_ratio);
    }
    return out;
}

}  // namespace grushin
