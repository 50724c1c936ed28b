#include "grushin/carleman.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "grushin/errors.hpp"
#include "grushin/halfline.hpp"
#include "grushin/quadrature.hpp"
#include "grushin/signed_log.hpp"
#include "grushin/spectrum.hpp"

namespace grushin {

using halfline::coth;
using halfline::log_sinh;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Quintic smoothstep and derivatives.
void smoothstep(double u, double& s, double& d1, double& d2) {
    if (u <= 0.0) {
        s = d1 = d2 = 0.0;
        return;
    }
    if (u >= 1.0) {
        s = 1.0;
        d1 = d2 = 0.0;
        return;
    }
    s = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
    d1 = 30.0 * u * u * (1.0 - u) * (1.0 - u);
    d2 = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
}

void require_open_time(double t, double T) {
    if (!(t > 0.0 && t < T)) throw DomainError("carleman", "t must lie in (0, T)");
}

ThetaValues left_away_theta(double t, double T) {
    const double w = T / 12.0;
    if (t <= T / 4.0) return {1.0 / t, -1.0 / (t * t), 2.0 / (t * t * t)};
    if (t >= T / 3.0) return {1.0, 0.0, 0.0};
    double s, s1, s2;
    smoothstep((t - T / 4.0) / w, s, s1, s2);
    s1 /= w;
    s2 /= w * w;
    const double inv = 1.0 / t;
    ThetaValues v;
    v.theta = (1.0 - s) * inv + s;
    v.d1 = s1 * (1.0 - inv) - (1.0 - s) * inv * inv;
    v.d2 = s2 * (1.0 - inv) + 2.0 * s1 * inv * inv + 2.0 * (1.0 - s) * inv * inv * inv;
    return v;
}

}  // namespace

Partition partition_of_unity(double s) {
    Partition p;
    double v, d1, d2;
    smoothstep((s - 0.2) / 0.2, v, d1, d2);
    p.eta[0] = 1.0 - v;
    p.d1[0] = -d1 / 0.2;
    p.d2[0] = -d2 / 0.04;
    smoothstep((s - 0.6) / 0.2, v, d1, d2);
    p.eta[2] = v;
    p.d1[2] = d1 / 0.2;
    p.d2[2] = d2 / 0.04;
    p.eta[1] = 1.0 - p.eta[0] - p.eta[2];
    p.d1[1] = -p.d1[0] - p.d1[2];
    p.d2[1] = -p.d2[0] - p.d2[2];
    return p;
}

ThetaValues near_singularity_theta(const NearSingularityWeight& w, double t) {
    require_open_time(t, w.T);
    if (!(w.k > 1.0)) throw DomainError("carleman", "k_exponent must be > 1");
    const double s = t / w.T, k = w.k;
    const Partition p = partition_of_unity(s);
    // theta~ = 1 + eta1 (h1 - 1) + eta3 (h3 - 1), h1 = s^{-k}, h3 = (1-s)^{-k}
    const double h1 = std::pow(s, -k), h1p = -k * h1 / s, h1pp = k * (k + 1.0) * h1 / (s * s);
    const double r = 1.0 - s;
    const double h3 = std::pow(r, -k), h3p = k * h3 / r, h3pp = k * (k + 1.0) * h3 / (r * r);
    ThetaValues v;
    v.theta = 1.0 + p.eta[0] * (h1 - 1.0) + p.eta[2] * (h3 - 1.0);
    const double d1 = p.d1[0] * (h1 - 1.0) + p.eta[0] * h1p + p.d1[2] * (h3 - 1.0) + p.eta[2] * h3p;
    const double d2 = p.d2[0] * (h1 - 1.0) + 2.0 * p.d1[0] * h1p + p.eta[0] * h1pp + p.d2[2] * (h3 - 1.0) +
                      2.0 * p.d1[2] * h3p + p.eta[2] * h3pp;
    v.d1 = d1 / w.T;
    v.d2 = d2 / (w.T * w.T);
    return v;
}

ThetaValues away_theta(const AwayWeight& w, double t) {
    require_open_time(t, w.T);
    if (w.T > 3.0) throw DomainError("carleman", "away weight needs T <= 3");
    if (t <= 0.5 * w.T) return left_away_theta(t, w.T);
    ThetaValues v = left_away_theta(w.T - t, w.T);
    v.d1 = -v.d1;
    return v;
}

WeightValues weight_eval(const CarlemanWeightSpec& spec, double t, double x) {
    WeightValues out;
    if (const auto* c = std::get_if<CothWeight>(&spec)) {
        require_open_time(t, c->T);
        if (!(x >= 0.0 && x <= c->L)) throw DomainError("carleman", "x must lie in [0, L]");
        const double s = 2.0 * c->xi * t, ct = coth(s), r = c->L * c->L - x * x;
        out.psi = 0.5 * c->xi * r * ct;
        out.psi_x = -c->xi * x * ct;
        out.psi_xx = -c->xi * ct;
        out.psi_t = -c->xi * c->xi * r * std::exp(-2.0 * log_sinh(s));
        return out;
    }
    if (const auto* n = std::get_if<NearSingularityWeight>(&spec)) {
        if (!(x >= 0.0 && x <= n->L)) throw DomainError("carleman", "x must lie in [0, L]");
        const ThetaValues th = near_singularity_theta(*n, t);
        const double r = n->L * n->L - x * x;
        out.psi = 0.5 * n->M * th.theta * r;
        out.psi_x = -n->M * th.theta * x;
        out.psi_xx = -n->M * th.theta;
        out.psi_t = 0.5 * n->M * th.d1 * r;
        return out;
    }
    const auto& a = std::get<AwayWeight>(spec);
    if (!(x >= 0.0 && x <= a.L)) throw DomainError("carleman", "x must lie in [0, L]");
    const ThetaValues th = away_theta(a, t);
    const double sq = std::sqrt(a.xi), y = x - a.a;
    const double P = 0.5 * y * y - 2.0 * a.L * y;
    const double base = a.A * a.xi + 1.0 - sq * P;
    out.psi = th.theta * base;
    out.psi_x = -sq * th.theta * (y - 2.0 * a.L);
    out.psi_xx = -sq * th.theta;
    out.psi_t = th.d1 * base;
    return out;
}

double weight_derivative_residual(const CarlemanWeightSpec& spec, double t, double x, double h) {
    const WeightValues c = weight_eval(spec, t, x);
    const double hx = h, ht = h * t;
    const WeightValues xp = weight_eval(spec, t, x + hx), xm = weight_eval(spec, t, x - hx);
    const WeightValues tp = weight_eval(spec, t + ht, x), tm = weight_eval(spec, t - ht, x);
    auto rel = [](double num, double ref) { return std::fabs(num - ref) / std::max(std::fabs(ref), 1e-300); };
    const double ex = rel((xp.psi - xm.psi) / (2.0 * hx), c.psi_x);
    const double exx = rel((xp.psi - 2.0 * c.psi + xm.psi) / (hx * hx), c.psi_xx);
    const double et = c.psi_t == 0.0 ? std::fabs(tp.psi - tm.psi) : rel((tp.psi - tm.psi) / (2.0 * ht), c.psi_t);
    return std::max({ex, exx, et});
}

double away_F(const AwayWeight& w, double t, double x) {
    const WeightValues v = weight_eval(w, t, x);
    return v.psi_t - v.psi_x * v.psi_x + w.xi * w.xi * x * x;
}

double away_G(const AwayWeight& w, double t, double x) {
    const ThetaValues th = away_theta(w, t);
    const double xi = w.xi, sq = std::sqrt(xi), y = x - w.a;
    const double r = 2.0 * w.L + w.a - x;
    const double P = 0.5 * y * y - 2.0 * w.L * y;
    const double t3 = th.theta * th.theta * th.theta;
    return r * r * (4.0 * xi * th.d1 * th.theta + 4.0 * xi * sq * t3) + 4.0 * xi * xi * sq * th.theta * x * r -
           w.A * xi * th.d2 - th.d2 + sq * th.d2 * P;
}

double away_G_numeric(const AwayWeight& w, double t, double x) {
    // Richardson-improved centered differences of F; psi is quadratic in x so psi_xxxx = 0.
    auto dx = [&](double h) { return (away_F(w, t, x + h) - away_F(w, t, x - h)) / (2.0 * h); };
    auto dt = [&](double h) { return (away_F(w, t + h, x) - away_F(w, t - h, x)) / (2.0 * h); };
    const double hx = 1e-3 * w.L;
    const double ht = 1e-3 * std::min(t, w.T - t);
    const double Fx = (4.0 * dx(0.5 * hx) - dx(hx)) / 3.0;
    const double Ft = (4.0 * dt(0.5 * ht) - dt(ht)) / 3.0;
    const double psi_x = weight_eval(w, t, x).psi_x;
    return 2.0 * psi_x * Fx - Ft;
}

ThetaConstants theta_constants(const NearSingularityWeight& w, const std::vector<double>& t_grid) {
    ThetaConstants c;
    for (double t : t_grid) {
        const ThetaValues v = near_singularity_theta(w, t);
        c.c1 = std::max(c.c1, std::fabs(v.d1) / std::pow(v.theta, 1.0 + 1.0 / w.k));
        c.c2 = std::max(c.c2, std::fabs(v.d2) / std::pow(v.theta, 1.0 + 2.0 / w.k));
    }
    return c;
}

ThetaConstants theta_constants(const AwayWeight& w, const std::vector<double>& t_grid) {
    ThetaConstants c;
    for (double t : t_grid) {
        const ThetaValues v = away_theta(w, t);
        c.c1 = std::max(c.c1, std::fabs(v.d1) / (v.theta * v.theta));
        c.c2 = std::max(c.c2, std::fabs(v.d2) / (v.theta * v.theta * v.theta));
    }
    return c;
}

SignTableResult away_sign_table(const AwayWeight& w, const std::vector<double>& t_grid,
                                const std::vector<double>& x_grid) {
    SignTableResult r;
    for (double t : t_grid) {
        const double theta = away_theta(w, t).theta;
        for (double x : x_grid) {
            if (!(x > w.a && x < w.L)) continue;
            const WeightValues v = weight_eval(w, t, x);
            r.psi_x_positive = r.psi_x_positive && v.psi_x > 0.0;
            r.psi_xx_negative = r.psi_xx_negative && v.psi_xx < 0.0;
        }
        const double expect = 2.0 * w.L * std::sqrt(w.xi) * theta;
        r.max_boundary_slope_error =
            std::max(r.max_boundary_slope_error, std::fabs(weight_eval(w, t, w.a).psi_x - expect) / expect);
    }
    return r;
}

GLowerBoundResult g_psi_lower_bound(const AwayWeight& base, const std::vector<double>& xi_candidates,
                                    const std::vector<double>& t_grid, const std::vector<double>& x_grid) {
    GLowerBoundResult res;
    std::vector<double> xs = xi_candidates;
    std::sort(xs.begin(), xs.end());
    for (double xi : xs) {
        AwayWeight w = base;
        w.xi = xi;
        double worst = kInf;
        for (double t : t_grid) {
            const double th = away_theta(w, t).theta;
            const double bound = 2.0 * (w.L + w.a) * (w.L + w.a) * std::pow(xi, 1.5) * th * th * th;
            for (double x : x_grid) {
                if (!(x > w.a && x < w.L)) continue;
                worst = std::min(worst, away_G(w, t, x) / bound);
            }
        }
        res.xi.push_back(xi);
        res.min_ratio.push_back(worst);
    }
    for (std::size_t i = res.xi.size(); i-- > 0;) {
        if (res.min_ratio[i] < 1.0) break;
        res.threshold = res.xi[i];
    }
    return res;
}

GridSamples conjugate_solution(const ModeSystem& sys, const std::vector<double>& coeffs, const CothWeight& w,
                               double t, double weight_scale) {
    require_open_time(t, w.T);
    GridSamples g = mode_solution(sys, coeffs, t);
    const double ct = coth(2.0 * w.xi * t);
    for (std::size_t j = 0; j < g.log_abs.size(); ++j) {
        const double x = g.grid->nodes[j];
        const double phi = weight_scale * 0.5 * w.xi * (w.L * w.L - x * x) * ct;
        if (g.sign[j] == 0) continue;
        g.log_abs[j] -= phi;
        g.values[j] = g.sign[j] * std::exp(g.log_abs[j]);
    }
    return g;
}

ConjugateLimit conjugate_limit_check(const ModeSystem& sys, const std::vector<double>& coeffs, const CothWeight& w,
                                     double T, int j_from, int j_to) {
    ConjugateLimit out;
    for (int j = j_from; j <= j_to; ++j) {
        const double t = T / std::ldexp(1.0, j);
        out.t.push_back(t);
        out.log_norm.push_back(0.5 * log_norm_sq(sys, conjugate_solution(sys, coeffs, w, t)));
    }
    for (std::size_t i = 1; i < out.log_norm.size(); ++i)
        out.decreasing = out.decreasing && out.log_norm[i] < out.log_norm[i - 1];
    return out;
}

namespace {

// Spectral data needed by the cost inequalities. Boundary derivatives and
// window overlaps carry per-mode log scales.
struct ModalData {
    std::vector<double> lambda;
    std::vector<double> dx;  // u_k'(L) e^{-dx_scale}
    double dx_scale = 0.0;
    Eigen::MatrixXd overlap;          // int_omega u_j u_k e^{-s_j - s_k}
    std::vector<double> ov_scale;     // s_k
    std::string method;
};

bool kummer_available(const OperatorSpec& spec, double xi, int m) {
    if (!(spec.power_law && spec.gamma == 1.0 && spec.dim == 1)) return false;
    const double z = xi * spec.L * spec.L;
    return z <= 120.0 && m - 1 <= static_cast<int>(std::floor(0.9 * z / 4.0));
}

ModalData modal_kummer(const OperatorSpec& spec, double xi, int m, const Interval* omega) {
    ModalData d;
    d.method = "kummer";
    std::vector<EigenPair> pairs;
    for (int k = 0; k < m; ++k) pairs.push_back(interval_eigenvalue_kummer(spec, xi, k));
    std::vector<SignedLogValue> dl(m);
    double top = kNegInf;
    for (int k = 0; k < m; ++k) {
        d.lambda.push_back(pairs[k].lambda);
        dl[k] = interval_eigenfunction_dx_log(pairs[k], spec.L);
        top = std::max(top, dl[k].log_magnitude);
    }
    d.dx_scale = top;
    for (int k = 0; k < m; ++k) d.dx.push_back(dl[k].scaled_log(-top).value());
    if (omega) {
        const int panels = 40, order = 20;
        const auto& rule = quad::gauss_legendre(order);
        std::vector<double> xs, ws;
        const double h = (omega->b - omega->a) / panels;
        for (int p = 0; p < panels; ++p)
            for (int i = 0; i < order; ++i) {
                xs.push_back(omega->a + h * (p + 0.5 * (rule.nodes[i] + 1.0)));
                ws.push_back(0.5 * h * rule.weights[i]);
            }
        std::vector<std::vector<SignedLogValue>> u(m, std::vector<SignedLogValue>(xs.size()));
        d.ov_scale.assign(m, kNegInf);
        for (int k = 0; k < m; ++k)
            for (std::size_t i = 0; i < xs.size(); ++i) {
                u[k][i] = interval_eigenfunction_log(pairs[k], xs[i]);
                d.ov_scale[k] = std::max(d.ov_scale[k], u[k][i].log_magnitude);
            }
        d.overlap = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd v(m);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            for (int k = 0; k < m; ++k) v[k] = u[k][i].scaled_log(-d.ov_scale[k]).value();
            d.overlap.noalias() += ws[i] * v * v.transpose();
        }
    }
    return d;
}

ModalData modal_fd(const ModeSystem& sys, int m, const Interval* omega) {
    const Grid1D& g = *sys.grid;
    if (std::fabs(g.L - sys.spec.L) > 1e-12 * sys.spec.L)
        throw DomainError("carleman", "basis grid is truncated before L; boundary trace unavailable");
    ModalData d;
    d.method = "fd_oracle";
    const std::size_t n = g.nodes.size();
    const double s = factor_exponent(sys.spec, FdScheme::Factored);
    const double L = g.L;
    std::vector<SignedLogValue> dl(m);
    std::vector<int> flip(m, 1);
    double top = kNegInf;
    for (int k = 0; k < m; ++k) {
        const auto& u = sys.eigenbasis[k].samples();
        // Align with the closed-form convention: positive next to the singularity.
        flip[k] = u.sign[0] < 0 ? -1 : 1;
        d.lambda.push_back(sys.lambda_refined[k]);
        // v = u x^{-s} vanishes at L; quadratic through the last two nodes and (L, 0).
        const double p0 = g.nodes[n - 2], p1 = g.nodes[n - 1];
        const double v0 = flip[k] * u.values[n - 2] * std::pow(p0, -s);
        const double v1 = flip[k] * u.values[n - 1] * std::pow(p1, -s);
        const double dv = v0 * (L - p1) / ((p0 - p1) * (p0 - L)) + v1 * (L - p0) / ((p1 - p0) * (p1 - L));
        dl[k] = SignedLogValue::from_double(dv * std::pow(L, s));
        top = std::max(top, dl[k].log_magnitude);
    }
    d.dx_scale = top;
    for (int k = 0; k < m; ++k) d.dx.push_back(dl[k].scaled_log(-top).value());
    if (omega) {
        d.ov_scale.assign(m, kNegInf);
        auto frac = [&](std::size_t j) {
            const double lo = std::max(omega->a, g.faces[j]), hi = std::min(omega->b, g.faces[j + 1]);
            return hi > lo ? (hi - lo) / (g.faces[j + 1] - g.faces[j]) : 0.0;
        };
        for (int k = 0; k < m; ++k)
            for (std::size_t j = 0; j < n; ++j)
                if (frac(j) > 0.0) d.ov_scale[k] = std::max(d.ov_scale[k], sys.eigenbasis[k].samples().log_abs[j]);
        d.overlap = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd v(m);
        for (std::size_t j = 0; j < n; ++j) {
            const double f = frac(j);
            if (f == 0.0) continue;
            for (int k = 0; k < m; ++k) {
                const auto& u = sys.eigenbasis[k].samples();
                v[k] = flip[k] * u.sign[j] * std::exp(u.log_abs[j] - d.ov_scale[k]);
            }
            d.overlap.noalias() += f * std::exp(sys.log_inner_weight[j]) * v * v.transpose();
        }
    }
    return d;
}

// (1 - e^{-Lambda T}) / Lambda
double decay_integral(double Lambda, double T) {
    if (Lambda * T < 1e-12) return T;
    return -std::expm1(-Lambda * T) / Lambda;
}

double log_final_norm(const ModalData& d, const std::vector<double>& c, double T) {
    LogSumExp acc;
    for (std::size_t k = 0; k < c.size(); ++k)
        if (c[k] != 0.0) acc.add(2.0 * std::log(std::fabs(c[k])) - 2.0 * d.lambda[k] * T);
    return acc.value();
}

// log of sum_jk c_j c_k a_j a_k K_jk with a_k e^{-scale_k} given, K symmetric.
double log_quadratic_form(const std::vector<double>& c, const std::vector<double>& lambda, double T,
                          const Eigen::MatrixXd& kernel, const std::vector<double>& scale) {
    const int m = static_cast<int>(c.size());
    // Shift by the largest diagonal contribution so the sum is O(1).
    double shift = kNegInf;
    for (int k = 0; k < m; ++k)
        if (c[k] != 0.0 && kernel(k, k) > 0.0)
            shift = std::max(shift, 2.0 * scale[k] + 2.0 * std::log(std::fabs(c[k])) + std::log(kernel(k, k)));
    if (!std::isfinite(shift)) return kNegInf;
    double sum = 0.0;
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            if (c[j] == 0.0 || c[k] == 0.0) continue;
            const double lg = scale[j] + scale[k] - shift;
            sum += c[j] * c[k] * kernel(j, k) * decay_integral(lambda[j] + lambda[k], T) * std::exp(lg);
        }
    return sum > 0.0 ? shift + std::log(sum) : kNegInf;
}

InequalityMargin boundary_margin(const ModalData& d, const std::vector<double>& c, double T, double xi, double L,
                                 double log_C) {
    const int m = static_cast<int>(c.size());
    Eigen::MatrixXd K(m, m);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) K(j, k) = d.dx[j] * d.dx[k];
    InequalityMargin r;
    r.method = d.method;
    r.lhs_log = log_final_norm(d, c, T);
    r.log_observation = log_quadratic_form(c, d.lambda, T, K, std::vector<double>(m, 0.0)) + 2.0 * d.dx_scale;
    r.rhs_log = log_C + std::log(xi) + L * L / (2.0 * T) + xi * L * L + r.log_observation;
    r.margin = r.rhs_log - r.lhs_log;
    return r;
}

InequalityMargin interior_margin(const ModalData& d, const std::vector<double>& c, double T, double xi, Interval omega,
                                 double log_C, const CostCheckOptions& opts) {
    InequalityMargin r;
    r.method = d.method;
    r.lhs_log = log_final_norm(d, c, T);
    r.log_observation = log_quadratic_form(c, d.lambda, T, d.overlap, d.ov_scale);
    r.rhs_log = log_C + interior_cost_exponent(xi, omega, opts.eps, opts.delta) + r.log_observation;
    r.margin = r.rhs_log - r.lhs_log;
    return r;
}

template <class Eval>
InequalityMargin run_check(const ModeSystem& sys, const std::vector<double>& coeffs, bool need_window,
                           const Interval* omega, const CostCheckOptions& opts, Eval eval) {
    const int m = static_cast<int>(coeffs.size());
    if (m < 1 || m > sys.trunc_dim) throw DomainError("carleman", "coeffs length must be in [1, trunc_dim]");
    const Interval* w = need_window ? omega : nullptr;
    const ModalData fd = modal_fd(sys, m, w);
    InequalityMargin fd_margin = eval(fd);
    if (opts.prefer_kummer && kummer_available(sys.spec, sys.xi_n, m)) {
        InequalityMargin r = eval(modal_kummer(sys.spec, sys.xi_n, m, w));
        r.discretization_error_estimate = std::fabs(r.margin - fd_margin.margin);
        return r;
    }
    ModeSystemOptions half;
    half.trunc_dim = sys.trunc_dim;
    half.n_cells = sys.grid->n_cells / 2;
    half.grading = sys.grid->grading_exponent;
    const ModeSystem coarse = ModeSystem::build(sys.spec, sys.n, half);
    const InequalityMargin c = eval(modal_fd(coarse, m, w));
    fd_margin.discretization_error_estimate = std::fabs(fd_margin.margin - c.margin);
    return fd_margin;
}

}  // namespace

double interior_cost_exponent(double xi, Interval omega, double eps, double delta) {
    if (!(delta > 0.0 && 1.0 - 1.5 * delta > 0.0)) throw DomainError("carleman", "delta must lie in (0, 2/3)");
    if (!(eps > 0.0)) throw DomainError("carleman", "eps must be > 0");
    const double h = omega.a + 0.5 * eps;
    const double e1 = xi * h * h / std::sqrt(1.0 - 1.5 * delta);
    const double e2 = 2.0 * eps * xi;
    return log_add_exp(e1, e2);
}

InequalityMargin boundary_cost_check(const ModeSystem& sys, const std::vector<double>& coeffs, double T, double log_C,
                                     const CostCheckOptions& opts) {
    if (!(T > 0.0)) throw DomainError("carleman", "T must be > 0");
    const double xi = sys.xi_n, L = sys.spec.L;
    return run_check(sys, coeffs, false, nullptr, opts,
                     [&](const ModalData& d) { return boundary_margin(d, coeffs, T, xi, L, log_C); });
}

InequalityMargin interior_cost_check(const ModeSystem& sys, const std::vector<double>& coeffs, Interval omega,
                                     double T, double log_C, const CostCheckOptions& opts) {
    if (!(T > 0.0)) throw DomainError("carleman", "T must be > 0");
    if (!(omega.a > 0.0 && omega.a < omega.b && omega.b <= sys.spec.L))
        throw DomainError("carleman", "omega must satisfy 0 < a < b <= L");
    const double xi = sys.xi_n;
    return run_check(sys, coeffs, true, &omega, opts,
                     [&](const ModalData& d) { return interior_margin(d, coeffs, T, xi, omega, log_C, opts); });
}

namespace {

struct GlobalTerms {
    double lhs_log = kNegInf;
    int lhs_sign = 0;
};

GlobalTerms global_lhs(const OperatorSpec& spec, const std::vector<EigenPair>& pairs, const std::vector<double>& c,
                       double xi, double T, int uniform_panels) {
    const double L = spec.L, lam0 = pairs.front().lambda;
    const double ct = coth(2.0 * xi * T);
    // f~ = f e^{lambda_0 T}, so every factor stays O(1) before the logs.
    auto fields = [&](double x, double& f, double& fx) {
        f = fx = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (c[k] == 0.0) continue;
            const double damp = std::exp(-(pairs[k].lambda - lam0) * T);
            f += c[k] * damp * interval_eigenfunction_log(pairs[k], x).value();
            fx += c[k] * damp * interval_eigenfunction_dx_log(pairs[k], x).value();
        }
    };
    auto phi = [&](double x) { return 0.5 * xi * (L * L - x * x) * ct; };
    std::vector<double> br = quad::geometric_breakpoints(0.0, 0.05 * L, 40, 0.5);
    br.pop_back();
    for (int p = 0; p <= uniform_panels; ++p) br.push_back(0.05 * L + 0.95 * L * p / uniform_panels);
    auto log_gx2 = [&](double x) {
        double f, fx;
        fields(x, f, fx);
        const double gx = fx + xi * x * ct * f;  // (f_x - phi_x f) without e^{-phi}
        return gx == 0.0 ? kNegInf : 2.0 * std::log(std::fabs(gx)) - 2.0 * phi(x) - 2.0 * lam0 * T;
    };
    auto log_g2 = [&](double x) {
        double f, fx;
        fields(x, f, fx);
        return f == 0.0 ? kNegInf : 2.0 * std::log(std::fabs(f)) - 2.0 * phi(x) - 2.0 * lam0 * T;
    };
    auto log_g2_over_x2 = [&](double x) { return log_g2(x) - 2.0 * std::log(x); };
    const double i1 = quad::log_integral(log_gx2, br);
    const double i2 = quad::log_integral(log_g2, br) + 2.0 * std::log(xi * L) - 2.0 * log_sinh(2.0 * xi * T);
    const double cnu = spec.c_nu;
    SignedLogValue acc = SignedLogValue::from_log(1, i1) + SignedLogValue::from_log(-1, i2);
    if (cnu != 0.0) {
        const double i3 = quad::log_integral(log_g2_over_x2, br) + std::log(std::fabs(cnu));
        acc = acc + SignedLogValue::from_log(cnu > 0 ? 1 : -1, i3);
    }
    return {acc.log_magnitude, acc.sign};
}

}  // namespace

InequalityMargin global_boundary_carleman_check(const OperatorSpec& spec, double xi, const std::vector<double>& coeffs,
                                                double T) {
    if (!(T > 0.0)) throw DomainError("carleman", "T must be > 0");
    const int m = static_cast<int>(coeffs.size());
    if (!kummer_available(spec, xi, m))
        throw RegimeError("carleman", "global Carleman check needs the closed-form basis (gamma = 1, xi L^2 <= 120)");
    std::vector<EigenPair> pairs;
    for (int k = 0; k < m; ++k) pairs.push_back(interval_eigenvalue_kummer(spec, xi, k));
    const double L = spec.L;

    InequalityMargin r;
    r.method = "kummer";
    const GlobalTerms fine = global_lhs(spec, pairs, coeffs, xi, T, 80);
    const GlobalTerms coarse = global_lhs(spec, pairs, coeffs, xi, T, 40);

    // g_x(t, L) = f_x(t, L) since phi(t, L) = 0 and f(t, L) = 0.
    std::vector<double> d(m);
    double top = kNegInf;
    std::vector<SignedLogValue> dl(m);
    for (int k = 0; k < m; ++k) {
        dl[k] = interval_eigenfunction_dx_log(pairs[k], L);
        top = std::max(top, dl[k].log_magnitude);
    }
    for (int k = 0; k < m; ++k) d[k] = dl[k].scaled_log(-top).value();
    // int_0^T sinh(4 xi t) e^{-Lambda t} dt = (E(4xi - Lambda) - E(-4xi - Lambda)) / 2, E(a) = (e^{aT}-1)/a
    auto E = [&](double a) { return std::fabs(a * T) < 1e-12 ? T : std::expm1(a * T) / a; };
    double sum = 0.0;
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            const double Lam = pairs[j].lambda + pairs[k].lambda;
            sum += coeffs[j] * coeffs[k] * d[j] * d[k] * 0.5 * (E(4.0 * xi - Lam) - E(-4.0 * xi - Lam));
        }
    r.log_observation = sum > 0.0 ? std::log(sum) + 2.0 * top : kNegInf;
    r.rhs_log = std::log(xi * L) - 2.0 * log_sinh(2.0 * xi * T) + r.log_observation;
    if (fine.lhs_sign <= 0) {
        // A nonpositive left side holds trivially.
        r.lhs_log = kNegInf;
        r.margin = kInf;
        return r;
    }
    r.lhs_log = fine.lhs_log;
    r.margin = r.rhs_log - r.lhs_log;
    r.discretization_error_estimate = coarse.lhs_sign == fine.lhs_sign ? std::fabs(fine.lhs_log - coarse.lhs_log) : kInf;
    return r;
}

std::vector<double> random_coefficients(int count, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<double> c(count);
    // Explicit 53-bit mapping so the values do not depend on the library's distributions.
    for (auto& v : c) v = 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0;
    return c;
}

}  // namespace grushin
