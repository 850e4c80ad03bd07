#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cobro/fourier.hpp"

namespace cobro {

// The option-pricing-with-history experiment: five clock-loading vectors
// sharing the same ergodic correlation, one simulated history per row, and a
// reference contract priced both ways.
struct Table4Config {
    RainbowStyle style = RainbowStyle::CallOnMax;
    double strike = 90.0;
    double maturity = 0.5;
    std::vector<double> q0 = {1.0, 0.0, 0.0};
    std::vector<std::vector<double>> alpha_sets = {
        {0.7665, 0.7551, 0.2436}, {0.8068, 0.8772, 0.0404}, {0.6824, 0.6178, 0.5051},
        {0.5559, 0.4063, 0.9054}, {0.6, 0.6, 0.6},
    };
    double history_horizon = 20.0; // length of the simulated estimation window
    double history_dt = 0.05;      // its sampling step

    void validate() const;
};

// Everything the command-line front end needs; defaults reproduce the
// benchmark study and are shipped in paper.cfg.
struct ExperimentConfig {
    MarketParams market;
    RegimeConfig regime;     // primary regime parameter set
    RegimeConfig regime_alt; // alternative set used by the figure experiments
    FourierGrid fourier;     // production inversion grid
    FourierGrid calibration_fourier; // coarser grid for iterative procedures
    uint64_t seed = 54321;
    uint64_t paths = 100000; // Monte Carlo paths for method=mc
    std::string output_dir = "out";
    double sim_horizon = 1.0; // benchmark horizon of the simulate command
    double sim_dt = 0.01;     // and its grid step
    Table4Config table4;

    void validate() const;
};

// Benchmark defaults (three-state chain, both clock-loading sets, N=1000
// production grid, N=400 calibration grid).
ExperimentConfig default_config();

// Load a JSON config file and merge it over the defaults.  Any unknown key,
// type mismatch or malformed value throws config_error; absent keys keep
// their default.  Shapes (chain size, distributions) are re-validated after
// the merge.
ExperimentConfig load_config(const std::string& path);

} // namespace cobro
