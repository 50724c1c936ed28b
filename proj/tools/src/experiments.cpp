#include "grushin_lab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "grushin/carleman.hpp"
#include "grushin/errors.hpp"
#include "grushin/fit.hpp"
#include "grushin/halfline.hpp"
#include "grushin/observability.hpp"
#include "grushin/parallel.hpp"
#include "grushin/spectrum.hpp"

namespace grushin::lab {

namespace m = method;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string yes_no(bool b) { return b ? "true" : "false"; }

std::string num(double v) { return format_number(v); }

void say(const RunOptions& o, const std::string& msg) {
    if (o.log) o.log(msg);
}

bool kummer_applicable(const OperatorSpec& spec) { return spec.power_law && spec.gamma == 1.0 && spec.dim == 1; }

std::optional<EigenPair> try_kummer(const OperatorSpec& spec, double xi, int k, std::vector<std::string>& warnings) {
    if (!kummer_applicable(spec)) return std::nullopt;
    try {
        return interval_eigenvalue_kummer(spec, xi, k);
    } catch (const Error& e) {
        warnings.push_back("kummer unavailable at xi=" + num(xi) + ", k=" + std::to_string(k) + ": " + e.what());
        return std::nullopt;
    }
}

// Per-index warning buckets merged in index order keep the output deterministic.
void merge(std::vector<std::string>& into, const std::vector<std::vector<std::string>>& from) {
    for (const auto& w : from) into.insert(into.end(), w.begin(), w.end());
}

FdOptions fd_opts(const ExperimentConfig& c) {
    FdOptions o;
    o.rel_tol = c.tolerances.rel_tol;
    o.eigenvectors = false;
    o.richardson = true;
    return o;
}

// ---------------------------------------------------------------- eigs

ExperimentResult run_eigs(const ExperimentConfig& c, const RunOptions& o) {
    const OperatorSpec spec = c.op.build();
    const auto& xis = c.modes.xi_list;
    const int count = c.modes.k_max + 1;
    std::vector<std::vector<Sample>> rows(xis.size());
    std::vector<std::vector<std::string>> warn(xis.size());

    parallel_for(xis.size(), o.threads, [&](std::size_t i) {
        const double xi = xis[i];
        const FdResult fd = fd_eigs_adapted(spec, xi, c.resolution.n_cells, count, fd_opts(c), c.resolution.grading);
        if (fd.resolution_warning) warn[i].push_back("fd resolution warning at xi=" + num(xi));
        for (int k = 0; k < count; ++k) {
            Sample s;
            s.at("xi", xi).at("k", k);
            const double mu = halfline::mu(spec.nu, k);
            const double lam_fd = fd.best(k);
            s.put("lambda_oracle", lam_fd, m::kFdOracle);
            s.put("lambda_oracle_error", fd.error_estimate[k], m::kFdOracle);
            s.put("localization_bound", mu * xi, m::kClosedForm);
            if (auto kp = try_kummer(spec, xi, k, warn[i])) {
                // lambda = xi (mu_k + 4 eps), eps read off the Kummer parameter without cancellation
                const double gap = -4.0 * kp->kummer().a_offset;
                s.put("lambda_kummer", kp->lambda, m::kKummer);
                s.put("gap_over_xi", gap, m::kKummer);
                s.put("rel_diff", std::fabs(lam_fd - kp->lambda) / kp->lambda, m::kFdOracle);
                s.tag("bound_holds", yes_no(gap > 0.0), m::kKummer);
            } else {
                s.put("gap_over_xi", lam_fd / xi - mu, m::kFdOracle);
                s.tag("bound_holds", yes_no(lam_fd > mu * xi), m::kFdOracle);
            }
            rows[i].push_back(std::move(s));
        }
        say(o, "eigs: xi=" + num(xi) + " done");
    });

    ExperimentResult r;
    r.experiment = c.experiment;
    for (auto& v : rows)
        for (auto& s : v) r.samples.push_back(std::move(s));
    merge(r.warnings, warn);

    double max_rel = 0.0;
    bool any_rel = false, bounds = true;
    for (const auto& s : r.samples) {
        for (const auto& q : s.values)
            if (q.name == "rel_diff") {
                max_rel = std::max(max_rel, q.value);
                any_rel = true;
            }
        for (const auto& l : s.labels)
            if (l.name == "bound_holds" && l.value != "true") bounds = false;
    }
    if (any_rel) {
        r.summary.put("max_rel_diff", max_rel, m::kFdOracle);
        r.summary.tag("within_rel_tol", yes_no(max_rel <= c.tolerances.rel_tol), m::kFdOracle);
    }
    r.summary.tag("localization_holds", yes_no(bounds), any_rel ? m::kKummer : m::kFdOracle);
    r.plot_quantities = {"gap_over_xi", "rel_diff"};
    return r;
}

// ---------------------------------------------------------------- kernel

ExperimentResult run_kernel(const ExperimentConfig& c, const RunOptions& o) {
    const double nu = c.op.nu;
    const Interval w = *c.window;
    const int p = c.resolution.points;
    std::vector<double> xs(p);
    for (int i = 0; i < p; ++i) xs[i] = w.a + (w.b - w.a) * i / (p - 1);

    struct Job {
        double xi, t;
    };
    std::vector<Job> jobs;
    for (double xi : c.modes.xi_list)
        for (double t : c.times) jobs.push_back({xi, t});
    std::vector<std::vector<Sample>> rows(jobs.size());

    parallel_for(jobs.size(), o.threads, [&](std::size_t j) {
        const auto [xi, t] = jobs[j];
        for (double x : xs)
            for (double y : xs) {
                const auto closed = halfline::heat_kernel_closed(t, x, y, xi, nu);
                const auto mehler = halfline::heat_kernel_mehler(t, x, y, xi, nu, c.resolution.mehler_terms);
                double rel = kInf;
                if (!closed.value.is_zero()) {
                    const double ratio = std::exp(mehler.value.log_magnitude - closed.value.log_magnitude) *
                                         mehler.value.sign * closed.value.sign;
                    rel = std::fabs(ratio - 1.0);
                }
                Sample s;
                s.at("xi", xi).at("t", t).at("x", x).at("x_prime", y);
                s.put("kernel_closed", closed.value.value(), m::kClosedForm);
                s.put("log_kernel_closed", closed.value.log_magnitude, m::kClosedForm);
                s.put("kernel_mehler", mehler.value.value(), m::kMehler);
                s.put("mehler_last_term", mehler.last_term, m::kMehler);
                s.put("rel_err", rel, m::kMehler);
                rows[j].push_back(std::move(s));
            }
        say(o, "kernel: xi=" + num(xi) + " t=" + num(t) + " done");
    });

    ExperimentResult r;
    r.experiment = c.experiment;
    double worst = 0.0;
    for (auto& v : rows)
        for (auto& s : v) {
            worst = std::max(worst, s.values.back().value);
            r.samples.push_back(std::move(s));
        }
    r.summary.put("max_rel_err", worst, m::kMehler);
    r.summary.put("mehler_terms", c.resolution.mehler_terms, m::kMehler);
    r.summary.tag("within_rel_tol", yes_no(worst <= c.tolerances.rel_tol), m::kMehler);
    r.plot_quantities = {"rel_err"};
    return r;
}

// ---------------------------------------------------------------- agmon

ExperimentResult run_agmon(const ExperimentConfig& c, const RunOptions& o) {
    const OperatorSpec spec = c.op.build();
    AgmonOptions ao;
    ao.delta = c.tolerances.delta;
    ao.n_cells = c.resolution.n_cells;
    const AgmonDecayResult a = agmon_decay_rate(spec, *c.window, c.modes.xi_list, ao);
    say(o, "agmon: fitted rate " + num(a.fitted_rate));

    ExperimentResult r;
    r.experiment = c.experiment;
    for (const auto& s : a.samples) {
        Sample row;
        row.at("xi", s.xi);
        row.put("lambda", s.lambda, m::kFdOracle);
        row.put("log_mass", s.log_mass, m::kFdOracle);
        row.put("bound_log", s.bound_log, m::kFit);
        row.tag("bound_holds", yes_no(s.bound_holds), m::kFit);
        r.samples.push_back(std::move(row));
    }
    auto& sm = r.summary;
    sm.put("fitted_rate", a.fitted_rate, m::kFit);
    sm.put("fit_r_squared", a.fit_r_squared, m::kFit);
    sm.put("predicted_rate", a.predicted_rate, m::kClosedForm);
    sm.put("rate_rel_error", std::fabs(a.fitted_rate - a.predicted_rate) / std::fabs(a.predicted_rate), m::kFit);
    sm.put("d_agm", a.d_agm, m::kClosedForm);
    sm.put("d_agm_delta", a.d_agm_delta, m::kClosedForm);
    sm.put("delta", a.delta, m::kClosedForm);
    sm.put("log_C_fit", a.log_C_fit, m::kFit);
    sm.tag("inequality_holds", yes_no(a.inequality_holds), m::kFit);
    r.plot_quantities = {"log_mass", "bound_log"};
    return r;
}

// ---------------------------------------------------------------- obs-sweep

ObsSweepOptions sweep_opts(const ExperimentConfig& c, int threads) {
    ObsSweepOptions so;
    so.resolution.trunc_dim = c.resolution.trunc_dim;
    so.resolution.n_cells = c.resolution.n_cells;
    so.resolution.grading = c.resolution.grading;
    so.shooting_eta = c.resolution.shooting_eta;
    so.r2_min = c.tolerances.r2_min;
    so.sigma_margin = c.tolerances.sigma_margin;
    so.bound_tol = c.tolerances.bound_tol;
    so.stability_check = c.resolution.stability_check;
    so.gramian = c.resolution.gramian;
    so.threads = threads;
    return so;
}

ExperimentResult run_obs_sweep(const ExperimentConfig& c, const RunOptions& o) {
    const OperatorSpec spec = c.op.build();
    const ObsSweepOptions so = sweep_opts(c, o.threads);
    ExperimentResult r;
    r.experiment = c.experiment;
    const bool many = c.times.size() > 1;
    for (std::size_t i = 0; i < c.times.size(); ++i) {
        const double T = c.times[i];
        const ObservabilityReport rep = obs_sweep(spec, *c.window, T, c.modes.n_list, so);
        say(o, "obs-sweep: T=" + num(T) + " " + to_string(rep.classification));
        for (const auto& row : rep.per_mode) {
            Sample s;
            s.at("n", static_cast<double>(row.n));
            if (many) s.at("T", T);
            s.put("lambda", row.lambda, m::kFdOracle);
            s.put("lambda_error", row.lambda_error, m::kFdOracle);
            s.put("log_mass", row.log_mass, m::kFdOracle);
            s.put("log_ratio", row.log_ratio, m::kFdOracle);
            if (std::isfinite(row.ratio) && row.ratio > 0.0) s.put("ratio", row.ratio, m::kFdOracle);
            if (row.log_gramian) s.put("log_gramian", *row.log_gramian, m::kFdOracle);
            r.samples.push_back(std::move(s));
        }
        const std::string sfx = many ? "[" + std::to_string(i) + "]" : "";
        auto& sm = r.summary;
        if (many) sm.put("T" + sfx, T, m::kClosedForm);
        sm.put("fitted_growth_rate" + sfx, rep.fitted_growth_rate, m::kFit);
        sm.put("fit_intercept" + sfx, rep.fit_intercept, m::kFit);
        sm.put("fit_r_squared" + sfx, rep.fit_r_squared, m::kFit);
        sm.put("fit_slope_stderr" + sfx, rep.fit_slope_stderr, m::kFit);
        sm.put("predicted_growth_rate" + sfx, rep.predicted_growth_rate, m::kClosedForm);
        sm.put("predicted_T_star" + sfx, rep.predicted_T_star, m::kClosedForm);
        sm.tag("classification" + sfx, to_string(rep.classification), m::kFit);
        if (rep.stability_checked) {
            sm.tag("refined_classification" + sfx, to_string(rep.refined_classification), m::kFit);
            sm.tag("stable" + sfx, yes_no(rep.stable), m::kFit);
        }
    }
    r.plot_quantities = {"log_ratio", "log_gramian"};
    return r;
}

// ---------------------------------------------------------------- carleman

struct Datum {
    std::string name;
    int code;
    std::vector<double> coeffs;
};

std::vector<Datum> data_for(const ExperimentConfig& c) {
    std::vector<Datum> out;
    const int dim = c.resolution.trunc_dim;
    if (c.modes.datum != "random") {
        std::vector<double> g(dim, 0.0);
        g[0] = 1.0;
        out.push_back({"ground", 0, g});
    }
    if (c.modes.datum != "ground") {
        auto v = random_coefficients(c.modes.coefficients, c.seed);
        v.resize(dim, 0.0);
        out.push_back({"random", 1, v});
    }
    return out;
}

ExperimentResult run_carleman(const ExperimentConfig& c, const RunOptions& o, bool interior) {
    const OperatorSpec spec = c.op.build();
    const double T = c.times.front();
    ModeSystemOptions mo;
    mo.trunc_dim = c.resolution.trunc_dim;
    mo.n_cells = c.resolution.n_cells;
    mo.grading = c.resolution.grading;
    CostCheckOptions co;
    co.eps = c.tolerances.eps;
    co.delta = c.tolerances.delta;
    const Interval omega = interior ? *c.window : Interval{0.0, spec.L};

    auto check = [&](const ModeSystem& sys, const std::vector<double>& coeffs, double log_C) {
        return interior ? interior_cost_check(sys, coeffs, omega, T, log_C, co)
                        : boundary_cost_check(sys, coeffs, T, log_C, co);
    };

    // C is calibrated once: the ground datum at the reference mode sits exactly on the bound.
    std::vector<double> ground(c.resolution.trunc_dim, 0.0);
    ground[0] = 1.0;
    const ModeSystem ref = ModeSystem::build(spec, std::llround(c.tolerances.reference_xi), mo);
    const InequalityMargin cal = check(ref, ground, 0.0);
    const double log_C = -cal.margin;
    say(o, "carleman: log C = " + num(log_C));

    const auto data = data_for(c);
    const auto& xis = c.modes.xi_list;
    const bool global = !interior && kummer_applicable(spec);
    std::vector<std::vector<Sample>> rows(xis.size());
    std::vector<std::vector<std::string>> warn(xis.size());

    parallel_for(xis.size(), o.threads, [&](std::size_t i) {
        const double xi = xis[i];
        const ModeSystem sys = ModeSystem::build(spec, std::llround(xi), mo);
        for (const auto& d : data) {
            const InequalityMargin mg = check(sys, d.coeffs, log_C);
            Sample s;
            s.at("xi", xi).at("datum", d.code);
            s.put("lhs_log", mg.lhs_log, mg.method);
            s.put("rhs_log", mg.rhs_log, mg.method);
            s.put("margin", mg.margin, mg.method);
            s.put("discretization_error", mg.discretization_error_estimate, mg.method);
            s.put("log_observation", mg.log_observation, mg.method);
            s.tag("datum_kind", d.name, mg.method);
            s.tag("passes", yes_no(mg.passes()), mg.method);
            if (interior) {
                s.put("cost_log", mg.lhs_log - mg.log_observation, mg.method);
                s.put("predicted_cost_exponent", interior_cost_exponent(xi, omega, co.eps, co.delta),
                      m::kClosedForm);
            }
            if (global) {
                try {
                    const InequalityMargin g = global_boundary_carleman_check(spec, xi, d.coeffs, T);
                    s.put("global_margin", g.margin, g.method);
                    s.put("global_discretization_error", g.discretization_error_estimate, g.method);
                    s.tag("global_passes", yes_no(g.passes()), g.method);
                } catch (const Error& e) {
                    warn[i].push_back("global Carleman check skipped at xi=" + num(xi) + ": " + e.what());
                }
            }
            rows[i].push_back(std::move(s));
        }
        say(o, "carleman: xi=" + num(xi) + " done");
    });

    ExperimentResult r;
    r.experiment = c.experiment;
    for (auto& v : rows)
        for (auto& s : v) r.samples.push_back(std::move(s));
    merge(r.warnings, warn);

    int cases = 0, failures = 0;
    double min_margin = kInf;
    std::string min_method = m::kFit;
    for (const auto& s : r.samples) {
        ++cases;
        for (const auto& l : s.labels)
            if (l.name == "passes" && l.value != "true") ++failures;
        for (const auto& q : s.values)
            if (q.name == "margin" && q.value < min_margin) {
                min_margin = q.value;
                min_method = q.method;
            }
    }
    auto& sm = r.summary;
    sm.put("log_C", log_C, m::kFit);
    sm.put("reference_xi", c.tolerances.reference_xi, m::kFit);
    sm.put("cases", cases, m::kFit);
    sm.put("failures", failures, m::kFit);
    sm.put("min_margin", min_margin, min_method);
    sm.tag("all_pass", yes_no(failures == 0), m::kFit);

    if (interior) {
        // Weight properties on a tensor grid of (0, T) x (a, L).
        std::vector<double> tg, xg;
        for (int i = 1; i < 200; ++i) tg.push_back(T * i / 200.0);
        for (int i = 1; i < 100; ++i) xg.push_back(omega.a + (spec.L - omega.a) * i / 100.0);
        const std::vector<double> cand = {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000};
        const AwayWeight base{c.tolerances.weight_A, 1.0, T, omega.a, spec.L};
        const GLowerBoundResult gl = g_psi_lower_bound(base, cand, tg, xg);
        bool sign_ok = true;
        double route_diff = 0.0;
        for (double xi : xis) {
            AwayWeight w = base;
            w.xi = xi;
            sign_ok = sign_ok && away_sign_table(w, tg, xg).holds();
            for (std::size_t a = 0; a < tg.size(); a += 10)
                for (std::size_t b = 0; b < xg.size(); b += 10) {
                    const double g1 = away_G(w, tg[a], xg[b]);
                    const double g2 = away_G_numeric(w, tg[a], xg[b]);
                    route_diff = std::max(route_diff, std::fabs(g1 - g2) / std::fabs(g1));
                }
        }
        sm.put("g_psi_threshold", gl.threshold, m::kClosedForm);
        sm.tag("g_psi_bound_holds", yes_no(std::isfinite(gl.threshold)), m::kClosedForm);
        sm.put("g_psi_route_rel_diff", route_diff, m::kFdOracle);
        sm.tag("sign_table_holds", yes_no(sign_ok), m::kClosedForm);
        const ThetaConstants tc = theta_constants(base, tg);
        sm.put("theta_c1", tc.c1, m::kClosedForm);
        sm.put("theta_c2", tc.c2, m::kClosedForm);
    }
    r.plot_quantities = interior ? std::vector<std::string>{"margin", "cost_log"}
                                 : std::vector<std::string>{"margin", "global_margin"};
    return r;
}

// ---------------------------------------------------------------- gamma-scaling

ExperimentResult run_gamma_scaling(const ExperimentConfig& c, const RunOptions& o) {
    const OperatorSpec spec = c.op.build();
    const GroundScalingResult g = gamma_ground_scaling(spec, c.modes.xi_list, c.resolution.n_cells);
    say(o, "gamma-scaling: exponent " + num(g.fitted_exponent));
    const double expo = 2.0 / (1.0 + spec.gamma);

    ExperimentResult r;
    r.experiment = c.experiment;
    for (std::size_t i = 0; i < g.samples.size(); ++i) {
        const auto [xi, lam] = g.samples[i];
        Sample s;
        s.at("xi", xi);
        s.put("lambda0", lam, m::kFdOracle);
        s.put("lower_bound", g.mu_bar * std::pow(xi, expo), m::kFdOracle);
        s.put("tolerance", g.tolerances[i], m::kFdOracle);
        s.put("sandwich_upper", g.sandwich_upper[i], m::kFdOracle);
        s.put("scaled_lambda0", lam / std::pow(xi, expo), m::kFdOracle);
        r.samples.push_back(std::move(s));
    }
    auto& sm = r.summary;
    sm.put("fitted_exponent", g.fitted_exponent, m::kFit);
    sm.put("fitted_prefactor", g.fitted_prefactor, m::kFit);
    sm.put("predicted_exponent", expo, m::kClosedForm);
    sm.put("mu_bar", g.mu_bar, m::kFdOracle);
    sm.put("sandwich_violations", g.sandwich_violations, m::kFdOracle);
    sm.tag("lower_bound_holds", yes_no(g.lower_bound_holds), m::kFdOracle);
    r.plot_quantities = {"lambda0", "lower_bound", "scaled_lambda0"};
    return r;
}

// ---------------------------------------------------------------- generalized-gap

ExperimentResult run_generalized_gap(const ExperimentConfig& c, const RunOptions& o) {
    const OperatorSpec spec = c.op.build();
    const auto& xis = c.modes.xi_list;
    std::vector<GeneralizedGap> gaps(xis.size());
    parallel_for(xis.size(), o.threads, [&](std::size_t i) {
        gaps[i] = generalized_eigenvalue_near(spec, xis[i], c.resolution.n_cells);
        say(o, "generalized-gap: xi=" + num(xis[i]) + " done");
    });

    ExperimentResult r;
    r.experiment = c.experiment;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xis.size(); ++i) {
        const double target = 2.0 * spec.q_profile.derivative_at_zero * xis[i] * (1.0 + spec.nu);
        Sample s;
        s.at("xi", xis[i]);
        s.put("Lambda", gaps[i].Lambda, m::kFdOracle);
        s.put("linear_prediction", target, m::kClosedForm);
        s.put("gap_over_sqrt_xi", gaps[i].gap_over_sqrt_xi, m::kFdOracle);
        r.samples.push_back(std::move(s));
        lx.push_back(std::log(xis[i]));
        ly.push_back(std::log(std::max(gaps[i].gap_over_sqrt_xi, 1e-300)));
    }
    const fit::LinearFit f = fit::linear(lx, ly);
    auto& sm = r.summary;
    sm.put("loglog_slope", f.slope, m::kFit);
    sm.put("loglog_r_squared", f.r_squared, m::kFit);
    sm.tag("no_positive_trend", yes_no(f.slope <= 0.05), m::kFit);
    if (c.window) {
        const double pred = predicted_minimal_time(spec, c.window->a);
        sm.put("predicted_T_star", pred, m::kClosedForm);
        if (!c.modes.n_list.empty()) {
            const TransitionResult tr =
                empirical_transition_time(spec, *c.window, c.modes.n_list, sweep_opts(c, o.threads));
            say(o, "generalized-gap: transition T=" + num(tr.T));
            sm.put("empirical_transition_T", tr.T, m::kFit);
            sm.put("transition_ratio", tr.T / pred, m::kFit);
            sm.tag("transition_within_factor_2", yes_no(tr.T >= 0.5 * pred && tr.T <= 2.0 * pred), m::kFit);
        }
    }
    r.plot_quantities = {"gap_over_sqrt_xi"};
    return r;
}

// ---------------------------------------------------------------- radial-check

ExperimentResult run_radial(const ExperimentConfig& c, const RunOptions& o) {
    const OperatorSpec spec = c.op.build();
    const OperatorSpec reduced = radial_reduce(spec);
    const OperatorSpec spec2 = OperatorSpec::make_power_law(spec.nu, spec.L, spec.gamma, spec.dim + 2);
    const OperatorSpec reduced2 = radial_reduce(spec2);
    const auto& xis = c.modes.xi_list;
    const int count = c.modes.k_max + 1;
    std::vector<std::vector<Sample>> rows(xis.size());
    std::vector<std::vector<std::string>> warn(xis.size());

    parallel_for(xis.size(), o.threads, [&](std::size_t i) {
        const double xi = xis[i];
        const FdResult rad = fd_eigs_adapted(spec, xi, c.resolution.n_cells, count, fd_opts(c), c.resolution.grading);
        std::optional<FdResult> red_fd;
        for (int k = 0; k < count; ++k) {
            Sample s;
            s.at("xi", xi).at("k", k);
            s.put("lambda_radial", rad.best(k), m::kFdOracle);
            s.put("lambda_radial_error", rad.error_estimate[k], m::kFdOracle);
            double lam_red, lam_red2;
            std::string tag;
            auto k1 = try_kummer(reduced, xi, k, warn[i]);
            auto k2 = k1 ? try_kummer(reduced2, xi, k, warn[i]) : std::nullopt;
            if (k1 && k2) {
                lam_red = k1->lambda;
                lam_red2 = k2->lambda;
                tag = m::kKummer;
            } else {
                if (!red_fd)
                    red_fd = fd_eigs_adapted(reduced, xi, c.resolution.n_cells, count, fd_opts(c), c.resolution.grading);
                const FdResult red2 =
                    fd_eigs_adapted(reduced2, xi, c.resolution.n_cells, count, fd_opts(c), c.resolution.grading);
                lam_red = red_fd->best(k);
                lam_red2 = red2.best(k);
                tag = m::kFdOracle;
            }
            s.put("lambda_reduced", lam_red, tag);
            s.put("lambda_reduced_dim_plus_2", lam_red2, tag);
            s.put("reduced_abs_diff", std::fabs(lam_red - lam_red2), tag);
            s.put("rel_gap", std::fabs(rad.best(k) - lam_red) / lam_red, m::kFdOracle);
            rows[i].push_back(std::move(s));
        }
        say(o, "radial-check: xi=" + num(xi) + " done");
    });

    ExperimentResult r;
    r.experiment = c.experiment;
    double worst = 0.0, worst_red = 0.0;
    std::string red_tag = m::kKummer;
    for (auto& v : rows)
        for (auto& s : v) {
            for (const auto& q : s.values) {
                if (q.name == "rel_gap") worst = std::max(worst, q.value);
                if (q.name == "reduced_abs_diff") {
                    worst_red = std::max(worst_red, q.value);
                    if (q.method != m::kKummer) red_tag = q.method;
                }
            }
            r.samples.push_back(std::move(s));
        }
    merge(r.warnings, warn);
    r.summary.put("max_rel_gap", worst, m::kFdOracle);
    r.summary.put("max_reduced_abs_diff", worst_red, red_tag);
    r.summary.tag("within_rel_tol", yes_no(worst <= c.tolerances.rel_tol), m::kFdOracle);
    r.summary.tag("reduced_identical", yes_no(worst_red == 0.0), red_tag);
    r.plot_quantities = {"rel_gap"};
    return r;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& c, const RunOptions& o) {
    const std::string& e = c.experiment;
    if (e == "eigs") return run_eigs(c, o);
    if (e == "kernel") return run_kernel(c, o);
    if (e == "agmon") return run_agmon(c, o);
    if (e == "obs-sweep") return run_obs_sweep(c, o);
    if (e == "carleman-boundary") return run_carleman(c, o, false);
    if (e == "carleman-interior") return run_carleman(c, o, true);
    if (e == "gamma-scaling") return run_gamma_scaling(c, o);
    if (e == "generalized-gap") return run_generalized_gap(c, o);
    if (e == "radial-check") return run_radial(c, o);
    throw ConfigError("experiment", "unknown experiment \"" + e + "\"");
}

}  // namespace grushin::lab
