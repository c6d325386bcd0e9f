#pragma once

#include "sslearn/types.hpp"

namespace sslearn {

struct IrfRequest {
    StateSpaceParams model;
    std::string shocked;       // must be a state, never a control
    double magnitude = 1.0;    // in units of the shocked equation's shock sd
    int horizon = 40;
};

/// Responses of all observables; rows are periods 0..horizon (period 0 is
/// impact), columns ordered exo, endo, controls.
struct IrfPath {
    std::vector<std::string> names;
    Matrix responses;  // (horizon + 1) x k
};

/// Iterates the state-space equations from a one-time shock with zero future
/// shocks. An exogenous-state shock moves z at period 0 and reaches x and the
/// controls contemporaneously through D and B; an endogenous-state shock sets
/// x at period 0 and propagates from period 1. Shocking a control is a
/// ConfigError: changes to controls are by construction not propagated.
IrfPath irf_statespace(const IrfRequest& req);

struct Var1Fit {
    std::vector<std::string> names;
    Matrix coef;          // k x k, row i holds the lag loadings of variable i
    Matrix residual_cov;  // k x k, unrestricted
};

/// Least-squares fit of each variable on the first lags of all variables
/// (data centered, no intercept). Requires T >= k + 3 and a full-rank lag block.
Var1Fit fit_var1(const TimeSeriesFrame& frame);

/// path_h = coef^h * shock for h = 0..horizon. Non-stationary coefficient
/// matrices are rejected unless allow_nonstationary is set.
IrfPath irf_var1(const Var1Fit& fit, const Vector& shock, int horizon,
                 bool allow_nonstationary = false);

}  // namespace sslearn
