#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "grushin/agmon.hpp"
#include "grushin/operator_spec.hpp"

namespace grushin::lab {

// Invalid or malformed configuration. `field` is a dotted path such as
// "operator.nu"; `line` is set for syntax errors.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what, int line = 0)
        : std::runtime_error(what), field_(std::move(field)), line_(line) {}
    const std::string& field() const noexcept { return field_; }
    int line() const noexcept { return line_; }
    std::string diagnostic() const;

private:
    std::string field_;
    int line_ = 0;
};

struct OperatorConfig {
    double nu = 1.0;
    double L = 1.0;
    double gamma = 1.0;
    int dim = 1;
    std::string q = "x";

    OperatorSpec build() const;
};

struct ModesConfig {
    std::vector<double> xi_list;
    std::vector<long long> n_list;  // expanded from n_range / n_geometric / n_list
    int k_max = 0;
    std::string datum = "both";  // ground | random | both
    int coefficients = 8;       // length of random data
};

struct ResolutionConfig {
    int n_cells = 4000;
    int trunc_dim = 8;
    double grading = 2.0;
    double shooting_eta = 2e-3;
    int points = 5;          // kernel grid is points x points
    int mehler_terms = 60;
    bool stability_check = true;
    bool gramian = true;
};

struct TolerancesConfig {
    double rel_tol = 1e-5;
    double r2_min = 0.95;
    double sigma_margin = 2.0;
    double bound_tol = 1.0;
    double delta = 0.05;
    double eps = 0.05;
    double reference_xi = 40.0;
    double weight_A = 0.05;
};

struct ExperimentConfig {
    std::string experiment;
    OperatorConfig op;
    std::optional<Interval> window;
    std::vector<double> times;
    ModesConfig modes;
    ResolutionConfig resolution;
    TolerancesConfig tolerances;
    std::uint64_t seed = 1;
    std::string output_dir = "grushin-lab-out";

    // Normalized echo written into results.json.
    nlohmann::json to_json() const;
};

struct ExperimentInfo {
    const char* name;
    const char* summary;
};
const std::vector<ExperimentInfo>& experiment_catalog();

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace grushin::lab
