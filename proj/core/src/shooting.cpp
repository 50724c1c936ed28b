#include "grushin/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "grushin/errors.hpp"
#include "grushin/signed_log.hpp"

namespace grushin {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct State {
    double u = 0.0;
    double du = 0.0;
    double log_scale = 0.0;
};

void renormalize(State& s, double x) {
    const double n = std::fabs(s.u) + std::fabs(s.du) * x;
    if (n > 0.0) {
        s.u /= n;
        s.du /= n;
        s.log_scale += std::log(n);
    }
}

// Exact transfer over a step of length h with constant W = V - lambda.
// dir = +1 integrates forward, -1 backward.
void transfer(State& s, double W, double h, int dir) {
    if (W > 0.0) {
        const double k = std::sqrt(W), th = k * h;
        double c, sh;
        if (th < 20.0) {
            c = std::cosh(th);
            sh = std::sinh(th);
        } else {
            const double e = std::exp(-2.0 * th);
            c = 0.5 * (1.0 + e);
            sh = 0.5 * (1.0 - e);
            s.log_scale += th;
        }
        const double u = c * s.u + dir * sh / k * s.du;
        const double du = dir * k * sh * s.u + c * s.du;
        s.u = u;
        s.du = du;
    } else if (W < 0.0) {
        const double k = std::sqrt(-W), th = k * h;
        const double c = std::cos(th), sn = std::sin(th);
        const double u = c * s.u + dir * sn / k * s.du;
        const double du = -dir * k * sn * s.u + c * s.du;
        s.u = u;
        s.du = du;
    } else {
        s.u += dir * h * s.du;
    }
}

double log_u(const State& s) { return s.u == 0.0 ? kNegInf : std::log(std::fabs(s.u)) + s.log_scale; }

// log((e^d - 1)/d), stable for any real d.
double log_expm1_ratio(double d) {
    if (std::fabs(d) < 1e-12) return 0.5 * d;
    if (d > 0.0) return d + std::log(-std::expm1(-d)) - std::log(d);
    return std::log(-std::expm1(d)) - std::log(-d);
}

// log int_p^q exp(g) over a cell [x0, x1] where g is linear from g0 to g1.
double cell_log_integral(double x0, double g0, double x1, double g1, double p, double q) {
    if (!(q > p)) return kNegInf;
    if (g0 == kNegInf || g1 == kNegInf) {
        // Zero at an end: fall back to the trapezoid rule on the finite end.
        const double gm = std::max(g0, g1);
        if (gm == kNegInf) return kNegInf;
        return gm + std::log(0.5 * (q - p));
    }
    const double h = x1 - x0;
    const double slope = (g1 - g0) / h;
    const double gp = g0 + slope * (p - x0);
    return gp + std::log(q - p) + log_expm1_ratio(slope * (q - p));
}

}  // namespace

double LogProfile::log_mass(double a, double b) const {
    LogSumExp acc;
    if (a < x.front()) {
        // Head: u ~ C x^s, so the mass scales like x^{2s+1}; only the full head is used.
        if (a <= 0.0) acc.add(log_head_mass);
        a = x.front();
    }
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double p = std::max(a, x[i]), q = std::min(b, x[i + 1]);
        if (q <= p) continue;
        acc.add(cell_log_integral(x[i], 2.0 * log_abs[i], x[i + 1], 2.0 * log_abs[i + 1], p, q));
    }
    return acc.value();
}

double LogProfile::log_value(double xq) const {
    if (xq <= x.front()) return log_abs.front();
    if (xq >= x.back()) return log_abs.back();
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const double t = (xq - x[i]) / (x[i + 1] - x[i]);
    if (log_abs[i] == kNegInf || log_abs[i + 1] == kNegInf) return kNegInf;
    return (1.0 - t) * log_abs[i] + t * log_abs[i + 1];
}

LogProfile ground_state_profile(const OperatorSpec& spec, double xi, double lambda_guess, const ShootingOptions& opts) {
    if (spec.dim != 1) throw DomainError("spectrum", "shooting profile is one-dimensional");
    if (!(lambda_guess > 0.0)) throw DomainError("spectrum", "shooting needs a positive eigenvalue guess");
    const double L = spec.L;
    auto V = [&](double x) { return spec.potential(xi, x); };

    // Right turning point of the guess.
    double x_match = -1.0;
    {
        const int m = 4000;
        for (int i = m; i >= 1; --i) {
            const double x = L * std::pow(10.0, -8.0 * (m - i) / m);
            if (V(x) <= lambda_guess) {
                x_match = x;
                break;
            }
        }
        if (x_match < 0.0) throw ConvergenceError("spectrum", "no classically allowed region for shooting");
        if (x_match >= L) x_match = 0.5 * L;
    }

    const double x_start = std::min(1e-3 / std::sqrt(lambda_guess), 1e-3 * x_match);
    std::vector<double> xs;
    for (double x = x_start; x < L; x += opts.eta * x) xs.push_back(x);
    xs.push_back(L);
    for (double r : opts.required_nodes)
        if (r > x_start && r < L) xs.push_back(r);
    xs.push_back(x_match);
    std::sort(xs.begin(), xs.end());
    std::vector<double> nodes;
    for (double x : xs)
        if (nodes.empty() || x - nodes.back() > 1e-12 * x) nodes.push_back(x);
    nodes.back() = L;
    const std::size_t n = nodes.size();
    const std::size_t im =
        static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), x_match * (1.0 - 1e-13)) - nodes.begin());

    std::vector<double> v_node(n), v_mid(n - 1);
    for (std::size_t i = 0; i < n; ++i) v_node[i] = V(nodes[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) v_mid[i] = V(0.5 * (nodes[i] + nodes[i + 1]));

    // Effective constant potential per cell: Simpson mean of sqrt|W| when W keeps
    // its sign, so the WKB phase/exponent is integrated to fourth order.
    auto w_eff = [&](std::size_t i, double lam) {
        const double w0 = v_node[i] - lam, w1 = v_node[i + 1] - lam, wm = v_mid[i] - lam;
        if ((w0 > 0 && w1 > 0 && wm > 0) || (w0 < 0 && w1 < 0 && wm < 0)) {
            const double k = (std::sqrt(std::fabs(w0)) + 4.0 * std::sqrt(std::fabs(wm)) + std::sqrt(std::fabs(w1))) / 6.0;
            return w0 > 0 ? k * k : -k * k;
        }
        return wm;
    };

    const double s = 0.5 + spec.nu;
    std::vector<double> left_log(n), right_log(n);
    std::vector<int> left_sign(n), right_sign(n);

    auto shoot = [&](double lam, bool record) {
        const double alpha = -lam / (4.0 + 4.0 * spec.nu);
        const double x0 = nodes[0];
        State sl{1.0 + alpha * x0 * x0, s / x0 * (1.0 + alpha * x0 * x0) + 2.0 * alpha * x0, s * std::log(x0)};
        renormalize(sl, x0);
        if (record) {
            left_log[0] = log_u(sl);
            left_sign[0] = sl.u > 0 ? 1 : -1;
        }
        for (std::size_t i = 0; i < im; ++i) {
            transfer(sl, w_eff(i, lam), nodes[i + 1] - nodes[i], +1);
            renormalize(sl, nodes[i + 1]);
            if (record) {
                left_log[i + 1] = log_u(sl);
                left_sign[i + 1] = sl.u > 0 ? 1 : (sl.u < 0 ? -1 : 0);
            }
        }
        State sr{0.0, -1.0, 0.0};
        if (record) {
            right_log[n - 1] = kNegInf;
            right_sign[n - 1] = 0;
        }
        for (std::size_t i = n - 1; i > im; --i) {
            transfer(sr, w_eff(i - 1, lam), nodes[i] - nodes[i - 1], -1);
            renormalize(sr, nodes[i - 1]);
            if (record) {
                right_log[i - 1] = log_u(sr);
                right_sign[i - 1] = sr.u > 0 ? 1 : (sr.u < 0 ? -1 : 0);
            }
        }
        const double xm = nodes[im];
        return xm * (sl.du / sl.u - sr.du / sr.u);
    };

    // Bracket: the mismatch decreases in lambda across the ground state.
    double lo = lambda_guess, hi = lambda_guess;
    double d0 = shoot(lambda_guess, false);
    double f_lo = d0, f_hi = d0;
    double step = 1e-7 * lambda_guess;
    for (int it = 0; it < 60 && f_lo * f_hi > 0.0; ++it) {
        if (d0 > 0.0) {
            lo = hi;
            f_lo = f_hi;
            hi = lambda_guess + step;
            f_hi = shoot(hi, false);
        } else {
            hi = lo;
            f_hi = f_lo;
            lo = lambda_guess - step;
            f_lo = shoot(lo, false);
        }
        step *= 3.0;
        if (step > 0.5 * lambda_guess) break;
    }
    if (!(f_lo * f_hi <= 0.0)) throw BracketError("spectrum", "shooting mismatch has no sign change near the guess");

    LogProfile prof;
    int side = 0, it = 0;
    double lam = 0.5 * (lo + hi);
    for (; it < opts.max_iter; ++it) {
        if (hi - lo <= opts.rel_tol * hi) break;
        lam = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if (!(lam > lo && lam < hi)) lam = 0.5 * (lo + hi);
        const double f = shoot(lam, false);
        if (f == 0.0) {
            lo = hi = lam;
            break;
        }
        if ((f > 0) == (f_lo > 0)) {
            lo = lam;
            f_lo = f;
            if (side == -1) f_hi *= 0.5;
            side = -1;
        } else {
            hi = lam;
            f_hi = f;
            if (side == 1) f_lo *= 0.5;
            side = 1;
        }
    }
    lam = 0.5 * (lo + hi);
    shoot(lam, true);

    prof.lambda = lam;
    prof.iterations = it;
    prof.x_match = nodes[im];
    prof.x = nodes;
    prof.log_abs.resize(n);
    prof.sign.resize(n);
    const double shift = left_log[im] - right_log[im];
    const int flip = left_sign[im] * right_sign[im] < 0 ? -1 : 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (i <= im) {
            prof.log_abs[i] = left_log[i];
            prof.sign[i] = left_sign[i];
        } else {
            prof.log_abs[i] = right_log[i] + shift;
            prof.sign[i] = flip * right_sign[i];
        }
    }
    prof.log_head_mass = 2.0 * prof.log_abs[0] + std::log(nodes[0] / (2.0 * s + 1.0));
    const double log_norm = prof.log_mass(0.0, L);
    for (auto& l : prof.log_abs) l -= 0.5 * log_norm;
    prof.log_head_mass -= log_norm;
    return prof;
}

}  // namespace grushin
