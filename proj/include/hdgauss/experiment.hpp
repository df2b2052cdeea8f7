#pragma once

#include <string>

#include "hdgauss/config.hpp"

namespace hdgauss {

// Runs one experiment and writes manifest.json, results.csv and (for the
// grid kinds) plot.svg under cfg.out_dir. Returns the results.csv path.
// Any failure writes out_dir/error.txt and rethrows.
std::string run_experiment(const ExperimentConfig& cfg);

}  // namespace hdgauss
