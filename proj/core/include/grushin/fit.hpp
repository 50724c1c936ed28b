#pragma once

#include <vector>

namespace grushin::fit {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double slope_stderr = 0.0;
    int n = 0;
};

// Ordinary least squares y = slope * x + intercept.
LinearFit linear(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace grushin::fit
