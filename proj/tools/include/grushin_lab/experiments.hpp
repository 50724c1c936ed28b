#pragma once

#include <functional>
#include <string>

#include "grushin_lab/config.hpp"
#include "grushin_lab/report.hpp"

namespace grushin::lab {

struct RunOptions {
    int threads = 1;
    std::function<void(const std::string&)> log;  // verbose progress sink, may be empty
};

// Dispatches on config.experiment. Numerical failures propagate as grushin::Error.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& opts = {});

}  // namespace grushin::lab
