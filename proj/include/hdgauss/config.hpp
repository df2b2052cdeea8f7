#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hdgauss/bootstrap.hpp"
#include "hdgauss/dgp.hpp"

namespace hdgauss {

enum class ExperimentKind {
    bound_report,
    distance_grid,
    rate_fit,
    coverage,
    counterexample,
    anticoncentration,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

// Parsed experiment configuration. The file grammar is line-oriented
// key = value pairs under [section] headers; see parse_config.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::bound_report;
    std::vector<std::pair<std::size_t, std::size_t>> grid;  // (n, d) pairs
    DgpSpec dgp;                                            // template; n,d filled per grid point
    std::size_t mc_samples = 10000;                         // M
    std::size_t replicates = 0;                             // R (outer replicates)
    std::size_t bootstrap_b = 500;                          // B
    double alpha = 0.1;
    double tol = 1e-7;
    std::vector<double> eps_factors = {0.05, 0.1, 0.2};  // anticoncentration eps as factors of tr/d
    BootstrapKind bootstrap_kind = BootstrapKind::efron;
    std::uint64_t seed = 0;
    int threads = 0;  // 0: fall back to HDGAUSS_THREADS, then 1
    std::string out_dir = ".";

    // Canonical semantic serialization (excludes out_dir and threads, which do
    // not affect results); its FNV-1a hash keys the manifest.
    std::string canonical() const;
    std::uint64_t config_hash() const;
};

// Parses the documented grammar:
//   [experiment] kind, seed, tol, threads, out-dir
//   [grid]       n (comma list), d (comma list or single), d-rule (e.g. n^0.75)
//   [dgp]        kind, marginal, multiplier, ma-order
//   [mc]         samples, replicates, bootstrap, alpha, eps (comma list)
// Unknown sections or keys are rejected with their line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace hdgauss
