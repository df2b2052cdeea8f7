#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hdgauss/dgp.hpp"

namespace hdgauss {

enum class BootstrapKind { efron, wild };

std::string to_string(BootstrapKind k);
BootstrapKind bootstrap_kind_from_string(const std::string& s);

// One bootstrap run: B resampled statistics |W*| or |W deg| and the quantile
// selected from them (the quantile is always an element of stat_values).
struct BootstrapRun {
    BootstrapKind kind = BootstrapKind::efron;
    std::size_t b = 0;
    double alpha = 0.0;
    std::vector<double> stat_values;
    double quantile = 0.0;
    MultiplierDist multiplier = MultiplierDist::gaussian;
    std::uint64_t seed = 0;
};

// Empirical-bootstrap statistics: each replicate resamples n rows with
// replacement and forms |n^{-1/2} sum (X_idx - X_bar)|.
std::vector<double> efron_stats(const Dataset& data, std::size_t b, std::uint64_t seed);

// Wild-bootstrap statistics |n^{-1/2} sum e_i X_i| with mean-zero
// unit-variance multipliers.
std::vector<double> wild_stats(const Dataset& data, std::size_t b, MultiplierDist multiplier,
                               std::uint64_t seed);

// Empirical version of inf{x : P(|W*| > x | X) <= alpha}: the smallest order
// statistic whose strict-exceedance fraction is <= alpha.
double bootstrap_quantile(const std::vector<double>& values, double alpha);

struct CoverageResult {
    double coverage = 0.0;  // fraction of outer replicates with |W| > quantile
    double stderr_ = 0.0;   // sqrt(cov*(1-cov)/R)
    std::vector<std::uint8_t> exceed;  // per outer replicate
    std::vector<double> w_norms;
    std::vector<double> quantiles;
};

// R outer replicates; each draws a dataset from spec, runs B inner bootstrap
// replicates, and tests |W| > q(alpha). Deterministic for any worker count.
CoverageResult coverage_experiment(const DgpSpec& spec, double alpha, std::size_t b, std::size_t r,
                                   BootstrapKind kind, std::uint64_t seed, unsigned workers = 1,
                                   MultiplierDist multiplier = MultiplierDist::gaussian);

struct OpNormDelta {
    double op_norm = 0.0;        // ||Sigma_hat - Sigma||_op (or Sigma_bar for wild)
    double hs_norm = 0.0;        // ||same difference||_HS
    double hs_surrogate = 0.0;   // sqrt(n^{-2} sum_i |X_i|^4), the HS upper-bound proxy
};

OpNormDelta op_norm_delta(const Dataset& data, const SymMatrix& sigma, BootstrapKind kind);

}  // namespace hdgauss
