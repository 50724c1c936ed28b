#include "grushin/agmon.hpp"

#include <algorithm>
#include <cmath>

#include "grushin/errors.hpp"
#include "grushin/fit.hpp"
#include "grushin/quadrature.hpp"
#include "grushin/shooting.hpp"
#include "grushin/spectrum.hpp"

namespace grushin {

double sublevel_edge(const QProfile& q, double energy, double L) {
    if (energy <= 0.0) return 0.0;
    auto g = [&](double x) { const double v = q(x); return v * v - energy; };
    const int m = 2000;
    double prev = 0.0;
    for (int i = 1; i <= m; ++i) {
        const double x = L * i / m;
        if (g(x) > 0.0) {
            double lo = prev, hi = x;
            for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                (g(mid) > 0.0 ? hi : lo) = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev = x;
    }
    return L;
}

AgmonSpec AgmonSpec::make(QProfile q, double energy, Interval omega, double L) {
    if (energy < 0.0) throw DomainError("agmon", "energy must be >= 0");
    if (!(omega.a >= 0.0 && omega.a < omega.b && omega.b <= L))
        throw DomainError("agmon", "omega must satisfy 0 <= a < b <= L");
    AgmonSpec s;
    s.q_profile = std::move(q);
    s.energy = energy;
    s.omega = omega;
    s.L = L;
    s.x_delta = sublevel_edge(s.q_profile, energy, L);
    return s;
}

double agmon_distance(const AgmonSpec& spec, double x_from, double x_to) {
    if (!(0.0 <= x_from && x_from <= x_to && x_to <= spec.L))
        throw DomainError("agmon", "need 0 <= x_from <= x_to <= L");
    const double E = spec.energy;
    auto f = [&](double s) {
        const double q = spec.q_profile(s);
        return std::sqrt(std::max(0.0, q * q - E));
    };
    // The integrand vanishes on F_delta and has a square-root kink at its edge.
    const double lo = std::max(x_from, spec.x_delta);
    if (lo >= x_to) return 0.0;
    return quad::adaptive(f, lo, x_to, 1e-14, 1e-16).value;
}

AgmonDecayResult agmon_decay_rate(const OperatorSpec& spec, Interval omega, const std::vector<double>& xi_list,
                                  const AgmonOptions& opts) {
    if (!(omega.a > 0.0 && omega.a < omega.b && omega.b <= spec.L))
        throw DomainError("agmon", "omega must satisfy 0 < a < b <= L");
    if (xi_list.size() < 2) throw DomainError("agmon", "xi_list needs at least 2 entries");
    if (spec.dim != 1) throw DomainError("agmon", "decay rates are computed for the 1D mode operator");

    AgmonDecayResult out;
    out.delta = opts.delta;
    const AgmonSpec zero = AgmonSpec::make(spec.q_profile, 0.0, omega, spec.L);
    const AgmonSpec level = AgmonSpec::make(spec.q_profile, opts.delta, omega, spec.L);
    out.d_agm = agmon_distance(zero, 0.0, omega.a);
    out.predicted_rate = -2.0 * out.d_agm;
    out.d_agm_delta = level.x_delta < omega.a ? agmon_distance(level, level.x_delta, omega.a) : 0.0;

    double prev_ratio = std::numeric_limits<double>::infinity();
    for (double xi : xi_list) {
        const FdResult fd = fd_eigs_oracle(spec, xi, Grid1D::graded(opts.n_cells, spec.L), 1, {1e-6, false, true});
        AgmonSample s;
        s.xi = xi;
        s.lambda = fd.best(0);
        const double ratio = s.lambda / (xi * xi);
        if (!(ratio < prev_ratio))
            throw HypothesisError("agmon", "lambda/xi^2 does not decrease along xi_list");
        prev_ratio = ratio;
        ShootingOptions so;
        so.eta = 1e-3;
        so.required_nodes = {omega.a, omega.b};
        const LogProfile prof = ground_state_profile(spec, xi, s.lambda, so);
        s.log_mass = prof.log_mass(omega.a, omega.b);
        out.samples.push_back(s);
    }

    const double factor = 2.0 * (1.0 - opts.delta) * out.d_agm_delta;
    out.log_C_fit = out.samples.front().log_mass + factor * out.samples.front().xi;
    for (auto& s : out.samples) {
        s.bound_log = out.log_C_fit - factor * s.xi;
        s.bound_holds = s.log_mass <= s.bound_log + 1e-9 * std::fabs(s.bound_log);
        out.inequality_holds = out.inequality_holds && s.bound_holds;
    }

    const std::size_t half = out.samples.size() / 2;
    std::vector<double> x, y;
    for (std::size_t i = half; i < out.samples.size(); ++i) {
        x.push_back(out.samples[i].xi);
        y.push_back(out.samples[i].log_mass);
    }
    if (x.size() < 2) {
        x.insert(x.begin(), out.samples[half - 1].xi);
        y.insert(y.begin(), out.samples[half - 1].log_mass);
    }
    const auto f = fit::linear(x, y);
    out.fitted_rate = f.slope;
    out.fit_r_squared = f.r_squared;
    return out;
}

}  // namespace grushin
