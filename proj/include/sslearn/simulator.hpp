#pragma once

#include "sslearn/types.hpp"

#include <cstdint>

namespace sslearn {

struct SimConfig {
    StateSpaceParams params;
    int n = 0;
    std::uint64_t seed = 0;
    int burn_in = 1000;

    /// Throws ConfigError if n < 4, burn_in < 0, or the model is non-stationary
    /// (|e_ii| >= 1 or spectral radius of C >= 1).
    void validate() const;
};

/// Draws n rows from the model, after discarding burn_in rows started from
/// zero initial conditions. Columns are ordered exo, endo, controls.
/// Deterministic given the seed (see rng.hpp for the stream mapping).
/// Shocks are independent Gaussians with the configured per-equation variances;
/// the shocks themselves are never part of the output.
TimeSeriesFrame simulate(const SimConfig& cfg);

/// Fixed, documented parameterizations used throughout tests and examples.
/// "small-rbc-like": k=9, exo {g, z}, endo {k}, six controls.
/// "medium-nk-like": k=17, exo {a, nu, z}, endo {p}, thirteen controls.
/// Coefficients are in docs/presets.md. Throws ConfigError for unknown names.
SimConfig preset(const std::string& name, int n = 100000, std::uint64_t seed = 1);

}  // namespace sslearn
