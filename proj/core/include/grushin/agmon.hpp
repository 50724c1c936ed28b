#pragma once

#include <string>
#include <vector>

#include "grushin/operator_spec.hpp"

namespace grushin {

struct Interval {
    double a = 0.0;
    double b = 0.0;
    double length() const { return b - a; }
};

struct AgmonSpec {
    QProfile q_profile;
    double energy = 0.0;  // E (the sublevel parameter delta)
    Interval omega;
    double L = 1.0;
    double x_delta = 0.0;  // F_delta = [0, x_delta]

    static AgmonSpec make(QProfile q, double energy, Interval omega, double L);
};

// Right end of the sublevel interval {q^2 <= E} containing 0.
double sublevel_edge(const QProfile& q, double energy, double L);

// In 1D the infimum over paths is the straight segment.
double agmon_distance(const AgmonSpec& spec, double x_from, double x_to);

struct AgmonSample {
    double xi = 0.0;
    double lambda = 0.0;
    double log_mass = 0.0;   // log int_omega u^2 (normalized ground state)
    double bound_log = 0.0;  // log C_fit - 2 xi (1-delta) d_delta
    bool bound_holds = true;
};

struct AgmonOptions {
    double delta = 0.05;
    int n_cells = 4000;
};

struct AgmonDecayResult {
    double fitted_rate = 0.0;
    double predicted_rate = 0.0;
    double fit_r_squared = 0.0;
    double delta = 0.05;
    double d_agm = 0.0;        // E = 0 distance from 0 to a
    double d_agm_delta = 0.0;  // d_{agm,delta}(omega, F_delta)
    double log_C_fit = 0.0;
    bool inequality_holds = true;
    std::vector<AgmonSample> samples;
};

AgmonDecayResult agmon_decay_rate(const OperatorSpec& spec, Interval omega, const std::vector<double>& xi_list,
                                  const AgmonOptions& opts = {});

}  // namespace grushin
