#include "hdgauss/distance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hdgauss/gauss_ball.hpp"

namespace hdgauss {

std::string to_string(DistanceFamily f) {
    return f == DistanceFamily::centered_balls ? "centered-balls" : "half-space";
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: need at least one sample");
    for (double v : samples)
        if (std::isnan(v)) throw std::invalid_argument("ks_statistic: NaN in samples");
    std::sort(samples.begin(), samples.end());
    const double m = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / m - f);
        d = std::max(d, f - static_cast<double>(i) / m);
    }
    return d;
}

DistanceEstimate ks_ball_distance(const std::vector<double>& w_sq_samples,
                                  const std::function<double(double)>& sq_norm_cdf) {
    DistanceEstimate est;
    est.value = ks_statistic(w_sq_samples, sq_norm_cdf);
    est.family = DistanceFamily::centered_balls;
    est.mc_samples = w_sq_samples.size();
    est.stderr_ = 1.36 / std::sqrt(static_cast<double>(w_sq_samples.size()));
    return est;
}

KsBootstrapCi ks_bootstrap_ci(const std::vector<double>& samples, const std::function<double(double)>& cdf,
                              std::size_t n_boot, double level, std::uint64_t seed) {
    if (samples.empty()) throw std::invalid_argument("ks_bootstrap_ci: need samples");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("ks_bootstrap_ci: level in (0,1)");
    const std::size_t m = samples.size();
    std::vector<double> stats(n_boot);
    CounterRng base(seed);
    std::vector<double> resampled(m);
    for (std::size_t b = 0; b < n_boot; ++b) {
        CounterRng rng = base.derive(b);
        for (std::size_t i = 0; i < m; ++i) resampled[i] = samples[rng.next_u64() % m];
        stats[b] = ks_statistic(resampled, cdf);
    }
    std::sort(stats.begin(), stats.end());
    const double alpha = 1.0 - level;
    auto pick = [&](double q) {
        const double pos = q * static_cast<double>(n_boot - 1);
        return stats[static_cast<std::size_t>(std::llround(pos))];
    };
    return {pick(alpha / 2.0), pick(1.0 - alpha / 2.0)};
}

HalfspaceResult halfspace_distance(const Dataset& w_samples, const std::vector<double>& direction) {
    const std::size_t d = w_samples.d();
    if (direction.size() != d) throw std::invalid_argument("halfspace_distance: direction dimension mismatch");
    double norm = 0.0;
    for (double v : direction) norm += v * v;
    if (std::abs(norm - 1.0) > 1e-8) throw std::invalid_argument("halfspace_distance: direction must be a unit vector");

    // Exact Gaussian scale along the direction from the analytic Var(W).
    double var_dir = 0.0;
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) var_dir += direction[j] * w_samples.var_w()(j, k) * direction[k];
    if (!(var_dir > 0.0)) throw std::invalid_argument("halfspace_distance: degenerate direction variance");
    const double sigma_dir = std::sqrt(var_dir);

    const std::size_t m = w_samples.n();
    std::vector<double> proj(m);
    std::size_t below_zero = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += w_samples.xi(i, j) * direction[j];
        proj[i] = s;
        if (s < 0.0) ++below_zero;
    }

    HalfspaceResult out;
    out.estimate.value = ks_statistic(proj, [&](double t) { return normal_cdf(t / sigma_dir); });
    out.estimate.family = DistanceFamily::half_space;
    out.estimate.mc_samples = m;
    out.estimate.stderr_ = 1.36 / std::sqrt(static_cast<double>(m));
    out.estimate.dgp = w_samples.provenance;
    out.estimate.seed = w_samples.seed;
    const double p = static_cast<double>(below_zero) / static_cast<double>(m);
    out.signed_gap_zero = p - 0.5;
    out.gap_stderr = std::sqrt(p * (1.0 - p) / static_cast<double>(m));
    return out;
}

}  // namespace hdgauss
