#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hdgauss/dgp.hpp"

namespace hdgauss {

enum class DistanceFamily { centered_balls, half_space };

std::string to_string(DistanceFamily f);

// A Kolmogorov-type distance estimate. stderr_ is the 95% one-sample KS null
// band 1.36/sqrt(M); it is a calibration scale, not a CI for a nonzero
// distance (bootstrap_ci covers that case).
struct DistanceEstimate {
    double value = 0.0;
    DistanceFamily family = DistanceFamily::centered_balls;
    std::size_t mc_samples = 0;
    double stderr_ = 0.0;
    std::optional<DgpSpec> dgp;
    std::uint64_t seed = 0;
};

// One-sample Kolmogorov statistic of `samples` against the CDF F:
//   D = max_i max(i/M - F(t_(i)), F(t_(i)) - (i-1)/M).
// Sorts a copy of the samples.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// KS distance of squared-norm samples |W|^2 against a squared-norm CDF.
DistanceEstimate ks_ball_distance(const std::vector<double>& w_sq_samples,
                                  const std::function<double(double)>& sq_norm_cdf);

// Percentile bootstrap CI of the KS statistic itself (for nonzero distances).
struct KsBootstrapCi {
    double lo = 0.0;
    double hi = 0.0;
};
KsBootstrapCi ks_bootstrap_ci(const std::vector<double>& samples, const std::function<double(double)>& cdf,
                              std::size_t n_boot, double level, std::uint64_t seed);

struct HalfspaceResult {
    DistanceEstimate estimate;       // sup_t |F_M(W.dir <= t) - Phi(t/sigma_dir)|
    double signed_gap_zero = 0.0;    // F_M(W.dir < 0) - 1/2
    double gap_stderr = 0.0;         // sqrt(p(1-p)/M)
};

// data must hold M replicate W vectors as rows (one replicate per row);
// sigma_dir is taken from the dataset's analytic Var(W).
HalfspaceResult halfspace_distance(const Dataset& w_samples, const std::vector<double>& direction);

}  // namespace hdgauss
