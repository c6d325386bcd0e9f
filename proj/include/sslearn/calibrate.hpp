#pragma once

#include "sslearn/types.hpp"

#include <cstdint>

namespace sslearn {

/// One cell of the size/power grid for the diagonality test.
struct CalibrationCell {
    double alpha = 0.05;
    int n = 500;
    int p = 5;               // dimension of the simulated covariance
    double correlation = 0;  // common off-diagonal element under the alternative
    int repetitions = 1000;
    double rejection_rate = 0.0;
};

/// Empirical rejection rate of the diagonality z-test on Gaussian samples
/// whose covariance has unit diagonal and constant off-diagonal `correlation`.
/// correlation = 0 measures size, otherwise power.
CalibrationCell calibrate_cell(CalibrationCell cell, std::uint64_t seed);

}  // namespace sslearn
