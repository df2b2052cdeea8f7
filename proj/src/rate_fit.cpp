#include "hdgauss/rate_fit.hpp"

#include <cmath>
#include <stdexcept>

namespace hdgauss {

RateFit rate_fit(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("rate_fit: need at least 3 points");
    const double m = static_cast<double>(points.size());
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& [x, y] : points) {
        if (!std::isfinite(x) || !std::isfinite(y)) throw std::invalid_argument("rate_fit: non-finite point");
        sx += x;
        sy += y;
    }
    const double mx = sx / m;
    const double my = sy / m;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx <= 0.0) throw std::runtime_error("rate_fit: degenerate abscissas (zero spread)");

    RateFit fit;
    fit.points = points;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (const auto& [x, y] : points) {
        const double e = y - (fit.intercept + fit.slope * x);
        rss += e * e;
    }
    fit.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    fit.slope_stderr = std::sqrt(rss / (m - 2.0) / sxx);
    return fit;
}

}  // namespace hdgauss
