#include "grushin/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "grushin/errors.hpp"
#include "grushin/fit.hpp"
#include "grushin/quadrature.hpp"
#include "grushin/specfun.hpp"

namespace grushin {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double face_measure(int dim, double f) { return dim == 1 ? 1.0 : std::pow(f, dim - 1); }

}  // namespace

Grid1D Grid1D::graded(int n_cells, double L, double p) {
    if (n_cells < 4) throw DomainError("spectrum", "grid needs at least 4 cells");
    if (!(L > 0.0)) throw DomainError("spectrum", "grid extent must be > 0");
    if (!(p >= 1.0)) throw DomainError("spectrum", "grading exponent must be >= 1");
    Grid1D g;
    g.n_cells = n_cells;
    g.grading_exponent = p;
    g.L = L;
    g.nodes.resize(n_cells);
    g.faces.resize(n_cells + 1);
    g.quad_weights.resize(n_cells);
    const double n = n_cells;
    for (int j = 0; j <= n_cells; ++j) g.faces[j] = L * std::pow(j / n, p);
    g.faces[n_cells] = L;
    for (int j = 0; j < n_cells; ++j) {
        g.nodes[j] = L * std::pow((j + 0.5) / n, p);
        g.quad_weights[j] = g.faces[j + 1] - g.faces[j];
    }
    return g;
}

double a_parameter(double lambda, double xi, double nu) {
    if (xi == 0.0) return 0.0;
    return -(lambda - 2.0 * xi * (1.0 + nu)) / (4.0 * xi);
}

double factor_exponent(const OperatorSpec& spec, FdScheme scheme) {
    return spec.dim == 1 && scheme == FdScheme::Factored ? 0.5 + spec.nu : 0.0;
}

std::vector<double> mass_weights(const OperatorSpec& spec, const Grid1D& grid, FdScheme scheme) {
    const double s = factor_exponent(spec, scheme);
    if (spec.dim == 1 && s == 0.0) return grid.quad_weights;
    // Measure x^m dx with m = 2s (factored) or d-1 (radial).
    const double m1 = spec.dim == 1 ? 2.0 * s + 1.0 : static_cast<double>(spec.dim);
    std::vector<double> w(grid.n_cells);
    for (int j = 0; j < grid.n_cells; ++j)
        w[j] = (std::pow(grid.faces[j + 1], m1) - std::pow(grid.faces[j], m1)) / m1;
    return w;
}

namespace {

// 1 / int_{x0}^{x1} y^{-2 nu} dy, computed without cancellation.
double factored_flux(double nu, double x0, double x1) {
    const double e = 2.0 * nu;
    return e * std::pow(x0, e) / (-std::expm1(e * std::log(x0 / x1)));
}

}  // namespace

tridiag::SymTridiag assemble_operator(const OperatorSpec& spec, double xi, const Grid1D& grid, FdScheme scheme) {
    const int n = grid.n_cells;
    const auto& x = grid.nodes;
    const std::vector<double> w = mass_weights(spec, grid, scheme);
    const bool factored = factor_exponent(spec, scheme) > 0.0;
    // Flux coefficients on faces 0..n.
    std::vector<double> c(n + 1);
    if (factored) {
        c[0] = 0.0;
        for (int j = 1; j < n; ++j) c[j] = factored_flux(spec.nu, x[j - 1], x[j]);
        c[n] = factored_flux(spec.nu, x[n - 1], grid.L);
    } else {
        c[0] = spec.dim == 1 ? 1.0 / x[0] : 0.0;
        for (int j = 1; j < n; ++j) c[j] = face_measure(spec.dim, grid.faces[j]) / (x[j] - x[j - 1]);
        c[n] = face_measure(spec.dim, grid.L) / (grid.L - x[n - 1]);
    }

    const double sing = factored ? 0.0 : spec.singular_coefficient();
    tridiag::SymTridiag t;
    t.d.resize(n);
    t.e.resize(n - 1);
    for (int j = 0; j < n; ++j) {
        const double qx = spec.q(x[j]);
        const double v = xi * xi * qx * qx + sing / (x[j] * x[j]);
        t.d[j] = (c[j] + c[j + 1]) / w[j] + v;
    }
    for (int j = 0; j + 1 < n; ++j) t.e[j] = -c[j + 1] / std::sqrt(w[j] * w[j + 1]);
    return t;
}

FdResult fd_eigs_oracle(const OperatorSpec& spec, double xi, const Grid1D& grid, int count,
                        const FdOptions& opts) {
    if (count < 1 || count > grid.n_cells / 4)
        throw DomainError("spectrum", "fd oracle needs 1 <= count <= n_cells/4");
    auto shared_grid = std::make_shared<const Grid1D>(grid);
    const auto t = assemble_operator(spec, xi, grid, opts.scheme);
    const auto evals = tridiag::lowest_eigenvalues(t, count);
    const std::vector<double> w = mass_weights(spec, grid, opts.scheme);
    const double s_exp = factor_exponent(spec, opts.scheme);

    FdResult res;
    res.pairs.reserve(count);
    for (int k = 0; k < count; ++k) {
        if (k > 0 && !(evals[k] > evals[k - 1]))
            throw ConvergenceError("spectrum", "discrete eigenvalues not strictly increasing");
        EigenPair p;
        p.k = k;
        p.xi = xi;
        p.lambda = evals[k];
        p.a_param = a_parameter(evals[k], xi, spec.nu);
        GridSamples gs;
        gs.grid = shared_grid;
        if (opts.eigenvectors) {
            auto v = tridiag::eigenvector(t, evals[k]);
            gs.sign = std::move(v.sign);
            gs.log_abs = std::move(v.log_abs);
            gs.values.resize(grid.n_cells);
            for (int j = 0; j < grid.n_cells; ++j) {
                gs.log_abs[j] += s_exp * std::log(grid.nodes[j]) - 0.5 * std::log(w[j]);
                gs.values[j] = gs.sign[j] == 0 ? 0.0 : gs.sign[j] * std::exp(gs.log_abs[j]);
            }
            p.normalized = true;
        }
        p.representation = std::move(gs);
        res.pairs.push_back(std::move(p));
    }

    if (opts.richardson && grid.n_cells / 2 >= 4 * count) {
        const Grid1D coarse = Grid1D::graded(grid.n_cells / 2, grid.L, grid.grading_exponent);
        res.coarse = tridiag::lowest_eigenvalues(assemble_operator(spec, xi, coarse, opts.scheme), count);
        res.richardson.resize(count);
        res.error_estimate.resize(count);
        for (int k = 0; k < count; ++k) {
            res.richardson[k] = (4.0 * evals[k] - res.coarse[k]) / 3.0;
            res.error_estimate[k] = std::fabs(evals[k] - res.richardson[k]);
            if (res.error_estimate[k] > opts.rel_tol * std::fabs(res.richardson[k])) res.resolution_warning = true;
        }
    }
    return res;
}

double suggest_extent(const OperatorSpec& spec, double xi, int count) {
    if (xi <= 0.0) return spec.L;
    const double c = spec.q_profile.leading_coefficient();
    const int g = spec.order();
    const double scale = std::pow(xi * c, -1.0 / (1.0 + g));
    // Scaled problem: -u'' + s^{2g} u. Decay integral from the turning point.
    const double mu_est = 1.5 * (4.0 * (count - 1) + 2.0 * (1.0 + spec.nu)) + 2.0;
    const double st = std::pow(mu_est, 1.0 / (2.0 * g));
    double s = st, acc = 0.0;
    const double h = 1e-3 * st;
    while (acc < 60.0) {
        const double mid = s + 0.5 * h;
        acc += std::sqrt(std::max(0.0, std::pow(mid, 2.0 * g) - mu_est)) * h;
        s += h;
    }
    return std::min(spec.L, s * scale);
}

FdResult fd_eigs_adapted(const OperatorSpec& spec, double xi, int n_cells, int count, const FdOptions& opts,
                         double grading) {
    double X = suggest_extent(spec, xi, count);
    FdOptions o = opts;
    o.eigenvectors = true;
    for (int attempt = 0; attempt < 20; ++attempt) {
        const Grid1D grid = Grid1D::graded(n_cells, X, grading);
        FdResult res = fd_eigs_oracle(spec, xi, grid, count, o);
        if (X >= spec.L) return res;
        // Tail test on the highest mode over the outer 5% of the extent.
        const auto& gs = res.pairs.back().samples();
        const double peak = *std::max_element(gs.log_abs.begin(), gs.log_abs.end());
        double tail = kNegInf;
        for (int j = 0; j < grid.n_cells; ++j)
            if (grid.nodes[j] > 0.95 * X) tail = std::max(tail, gs.log_abs[j]);
        if (tail - peak < -50.0) return res;
        X = std::min(spec.L, 1.5 * X);
    }
    throw ConvergenceError("spectrum", "adapted extent did not settle");
}

// ---------------------------------------------------------------------------
// Kummer root-finding in the offset eps, a = -k - eps, lambda/xi = mu_k + 4 eps.

namespace {

struct KummerEval {
    int sign;
    double log_abs;
    double log_max_partial;
};

KummerEval eval_offset(int k, double eps, double b, double z) {
    specfun::KummerOptions ko;
    ko.throw_on_precision_loss = false;
    const auto s = specfun::kummer_series(-k, -eps, b, z, ko);
    return {s.value.sign, s.value.log_magnitude, s.log_max_partial};
}

}  // namespace

EigenPair interval_eigenvalue_kummer(const OperatorSpec& spec, double xi, int k, const KummerRootOptions& opts) {
    if (spec.dim != 1 || !spec.power_law || spec.gamma != 1.0)
        throw DomainError("spectrum", "Kummer characterization needs gamma = 1 and dim = 1");
    if (!(xi > 0.0)) throw DomainError("spectrum", "xi must be > 0");
    if (k < 0) throw DomainError("spectrum", "k must be >= 0");
    const double z = xi * spec.L * spec.L;
    if (z > opts.max_xi_L2) {
        std::ostringstream os;
        os << "xi L^2 = " << z << " exceeds the cancellation budget cap " << opts.max_xi_L2;
        throw PrecisionLoss("spectrum", os.str());
    }
    if (k > std::floor(opts.tau * z / 4.0))
        throw DomainError("spectrum", "k exceeds the asymptotic validity range tau xi L^2 / 4");
    const double b = 1.0 + spec.nu;

    const KummerEval f0 = eval_offset(k, 0.0, b, z);
    int s0 = f0.sign;
    if (s0 == 0) s0 = -eval_offset(k, 1e-300, b, z).sign;
    auto sign_at = [&](double eps) { return eval_offset(k, eps, b, z).sign; };

    // Large-z balance of the polynomial head against the exponential tail.
    const double log_est = (2.0 * k + b) * std::log(z) - z - specfun::log_gamma(k + 1.0) -
                           specfun::log_gamma(b + k);
    const double est = std::clamp(std::exp(log_est), 1e-300, 0.3);

    double lo = est / 1.5, hi = std::min(0.5, est * 1.5);
    bool found = false;
    for (int expansion = 0; expansion <= 8; ++expansion) {
        if (sign_at(lo) == s0 && sign_at(hi) == -s0) {
            found = true;
            break;
        }
        lo /= 1.5;
        hi = std::min(0.5, hi * 1.5);
    }
    if (!found) {
        // Geometric scan of (0, 0.5], then of [-0.5, 0).
        double prev = 0.0;
        for (int j = 320; j >= 0 && !found; --j) {
            const double e = 0.5 * std::pow(10.0, -j);
            if (sign_at(e) == -s0) {
                lo = prev > 0.0 ? prev : e * 1e-3;
                hi = e;
                found = sign_at(lo) == s0;
            }
            prev = e;
        }
        prev = 0.0;
        for (int j = 320; j >= 0 && !found; --j) {
            const double e = -0.5 * std::pow(10.0, -j);
            if (sign_at(e) == -s0) {
                hi = prev < 0.0 ? prev : e * 1e-3;
                lo = e;
                found = sign_at(hi) == s0;
                if (found) std::swap(lo, hi);
            }
            prev = e;
        }
    }
    if (!found)
        throw BracketError("spectrum", "no sign change of M within lambda/xi in [mu_k - 2, mu_k + 2]");

    // lo carries sign s0, hi carries -s0. Geometric bisection while the bracket
    // spans decades, Illinois regula falsi once it is tight.
    double f_lo = 0.0, f_hi = 0.0;
    auto value_at = [&](double eps) {
        const auto e = eval_offset(k, eps, b, z);
        return e.sign == 0 ? 0.0 : e.sign * std::exp(e.log_abs - f0.log_max_partial);
    };
    f_lo = value_at(lo);
    f_hi = value_at(hi);
    int side = 0;
    for (int it = 0; it < 400; ++it) {
        if (std::fabs(hi - lo) <= 1e-14 * std::max(std::fabs(lo), std::fabs(hi))) break;
        double mid;
        const bool same_sign = lo * hi > 0.0;
        if (same_sign && std::max(std::fabs(lo), std::fabs(hi)) > 4.0 * std::min(std::fabs(lo), std::fabs(hi))) {
            mid = std::copysign(std::sqrt(std::fabs(lo)) * std::sqrt(std::fabs(hi)), lo);
        } else {
            mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
            if (!(mid > std::min(lo, hi) && mid < std::max(lo, hi))) mid = 0.5 * (lo + hi);
        }
        const double fm = value_at(mid);
        if (fm == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((fm > 0) == (f_lo > 0)) {
            lo = mid;
            f_lo = fm;
            if (side == -1) f_hi *= 0.5;
            side = -1;
        } else {
            hi = mid;
            f_hi = fm;
            if (side == 1) f_lo *= 0.5;
            side = 1;
        }
    }
    const double eps = std::fabs(f_lo) < std::fabs(f_hi) ? lo : hi;

    EigenPair p;
    p.k = k;
    p.xi = xi;
    p.lambda = xi * (4.0 * k + 2.0 * (1.0 + spec.nu) + 4.0 * eps);
    p.a_param = -static_cast<double>(k) - eps;
    KummerForm kf;
    kf.a_int = -k;
    kf.a_offset = -eps;
    kf.nu = spec.nu;
    kf.xi = xi;
    kf.L = spec.L;
    const auto root = eval_offset(k, eps, b, z);
    kf.residual_ratio = root.sign == 0 ? 0.0 : std::exp(root.log_abs - root.log_max_partial);
    p.representation = kf;
    if (opts.normalize) {
        const double L = spec.L;
        auto log_u2 = [&](double x) {
            const auto m = eval_offset(k, eps, b, xi * x * x);
            if (m.sign == 0) return kNegInf;
            return 2.0 * (-0.5 * xi * x * x + (0.5 + spec.nu) * std::log(x) + m.log_abs);
        };
        std::vector<double> breaks = quad::geometric_breakpoints(0.0, 0.05 * L, 12, 0.5);
        for (int i = 1; i <= 190; ++i) breaks.push_back(0.05 * L + 0.95 * L * i / 190.0);
        std::get<KummerForm>(p.representation).log_norm = quad::log_integral(log_u2, breaks, 20);
        p.normalized = true;
    }
    return p;
}

SignedLogValue interval_eigenfunction_log(const EigenPair& pair, double x) {
    const auto& kf = pair.kummer();
    if (!(x > 0.0)) return {};
    specfun::KummerOptions ko;
    ko.throw_on_precision_loss = false;
    const auto m = specfun::kummer_series(kf.a_int, kf.a_offset, 1.0 + kf.nu, kf.xi * x * x, ko);
    double shift = kf.log_prefactor - 0.5 * kf.xi * x * x + (0.5 + kf.nu) * std::log(x);
    if (pair.normalized) shift -= 0.5 * kf.log_norm;
    return m.value.scaled_log(shift);
}

double interval_eigenfunction_eval(const EigenPair& pair, double x) {
    if (!pair.is_kummer()) throw DomainError("spectrum", "pointwise evaluation needs the Kummer form");
    return interval_eigenfunction_log(pair, x).value();
}

SignedLogValue interval_eigenfunction_dx_log(const EigenPair& pair, double x) {
    const auto& kf = pair.kummer();
    specfun::KummerOptions ko;
    ko.throw_on_precision_loss = false;
    const double b = 1.0 + kf.nu, z = kf.xi * x * x, s = 0.5 + kf.nu;
    const auto m = specfun::kummer_series(kf.a_int, kf.a_offset, b, z, ko);
    const auto mz = specfun::kummer_series_dz(kf.a_int, kf.a_offset, b, z, ko);
    // u' = e^{-xi x^2/2} x^s [ (s/x - xi x) M + 2 xi x M_z ]
    const SignedLogValue t1 = m.value * SignedLogValue::from_double(s / x - kf.xi * x);
    const SignedLogValue t2 = mz.value * SignedLogValue::from_double(2.0 * kf.xi * x);
    double shift = kf.log_prefactor - 0.5 * z + s * std::log(x);
    if (pair.normalized) shift -= 0.5 * kf.log_norm;
    return (t1 + t2).scaled_log(shift);
}

bool monotone_concave_check(const EigenPair& pair, int samples) {
    if (!(pair.a_param > -0.5 && pair.a_param < 0.0))
        throw RegimeError("spectrum", "monotone/concave check needs a in (-1/2, 0)");
    const auto& kf = pair.kummer();
    specfun::KummerOptions ko;
    ko.throw_on_precision_loss = false;
    std::vector<double> m(samples + 1);
    double scale = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double x = kf.L * i / samples;
        m[i] = specfun::kummer_series(kf.a_int, kf.a_offset, 1.0 + kf.nu, kf.xi * x * x, ko).value.value();
        scale = std::max(scale, std::fabs(m[i]));
    }
    const double tol = 1e-12 * scale;
    for (int i = 1; i <= samples; ++i)
        if (m[i] - m[i - 1] > tol) return false;
    for (int i = 1; i < samples; ++i)
        if (m[i + 1] - 2.0 * m[i] + m[i - 1] > tol) return false;
    return true;
}

// ---------------------------------------------------------------------------

MuBarResult halfline_mu_bar_detail(double nu, double gamma, int n_cells) {
    if (!(gamma >= 1.0)) throw DomainError("spectrum", "gamma must be >= 1");
    if (!(nu > 0.0)) throw DomainError("spectrum", "nu must be > 0");
    const double R0 = 3.0;
    auto solve = [&](double R) {
        const OperatorSpec s = OperatorSpec::make_power_law(nu, R, gamma);
        const int n = static_cast<int>(std::lround(n_cells * std::sqrt(R / R0)));
        const auto res = fd_eigs_oracle(s, 1.0, Grid1D::graded(n, R), 1, {1e-6, false, true});
        return res.best(0);
    };
    MuBarResult out;
    double R = R0;
    double prev = solve(R);
    for (int d = 1; d <= 8; ++d) {
        R *= 2.0;
        const double cur = solve(R);
        out.last_change = std::fabs(cur - prev) / std::fabs(cur);
        out.doublings = d;
        if (out.last_change < 1e-8) {
            out.value = cur;
            out.R = R;
            return out;
        }
        prev = cur;
    }
    throw ConvergenceError("spectrum", "mu_bar truncation did not stabilize in 8 doublings");
}

double halfline_mu_bar(double nu, double gamma) { return halfline_mu_bar_detail(nu, gamma).value; }

GroundScalingResult gamma_ground_scaling(const OperatorSpec& spec, const std::vector<double>& xi_list, int n_cells,
                                         double sandwich_eps) {
    if (xi_list.size() < 4) throw DomainError("spectrum", "xi_list needs at least 4 entries");
    for (std::size_t i = 1; i < xi_list.size(); ++i)
        if (!(xi_list[i] > xi_list[i - 1])) throw DomainError("spectrum", "xi_list must be increasing");
    GroundScalingResult out;
    const double g = spec.gamma;
    const MuBarResult mb = halfline_mu_bar_detail(spec.nu, g);
    out.mu_bar = mb.value;
    const double expo = 2.0 / (1.0 + g);
    std::vector<double> lx, ly;
    for (double xi : xi_list) {
        const FdResult r = fd_eigs_adapted(spec, xi, n_cells, 1, {1e-6, false, true});
        const double lam = r.best(0);
        const double scaled = std::pow(xi, expo);
        const double tol = 3.0 * r.error_estimate[0] + 3.0 * mb.last_change * out.mu_bar * scaled + 1e-9 * lam;
        out.samples.emplace_back(xi, lam);
        out.tolerances.push_back(tol);
        if (lam < out.mu_bar * scaled - tol) out.lower_bound_holds = false;
        const double upper = (1.0 + sandwich_eps) * (out.mu_bar + sandwich_eps) * scaled;
        out.sandwich_upper.push_back(upper);
        if (lam > upper) ++out.sandwich_violations;
        lx.push_back(std::log(xi));
        ly.push_back(std::log(lam));
    }
    const std::size_t half = xi_list.size() / 2;
    const auto fit = fit::linear(std::vector<double>(lx.begin() + half, lx.end()),
                                 std::vector<double>(ly.begin() + half, ly.end()));
    out.fitted_exponent = fit.slope;
    out.fitted_prefactor = std::exp(fit.intercept);
    return out;
}

OperatorSpec radial_reduce(const OperatorSpec& spec) {
    if (spec.dim == 2) throw DomainError("spectrum", "dim = 2 is excluded");
    if (spec.dim < 3) throw DomainError("spectrum", "radial reduction needs dim >= 3");
    OperatorSpec r = spec.power_law ? OperatorSpec::make_power_law(spec.nu, spec.L, spec.gamma, 1)
                                    : OperatorSpec::make_generalized(spec.nu, spec.L, spec.q_profile);
    return r;
}

GeneralizedGap generalized_eigenvalue_near(const OperatorSpec& spec, double xi, int n_cells) {
    if (spec.order() != 1) throw DomainError("spectrum", "generalized eigenvalue needs gamma = 1");
    const double target = 2.0 * spec.q_profile.derivative_at_zero * xi * (1.0 + spec.nu);
    const FdResult r = fd_eigs_adapted(spec, xi, n_cells, 3, {1e-6, false, true});
    GeneralizedGap out;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        const double lam = r.best(k);
        if (std::fabs(lam - target) < best) {
            best = std::fabs(lam - target);
            out.Lambda = lam;
        }
    }
    out.gap_over_sqrt_xi = best / std::sqrt(xi);
    return out;
}

}  // namespace grushin
