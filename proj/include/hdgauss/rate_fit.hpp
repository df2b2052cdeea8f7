#pragma once

#include <utility>
#include <vector>

namespace hdgauss {

// OLS fit of y = intercept + slope * x on (typically log-log) points.
struct RateFit {
    std::vector<std::pair<double, double>> points;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_stderr = 0.0;
};

// Needs >= 3 finite points and non-degenerate abscissas.
RateFit rate_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace hdgauss
