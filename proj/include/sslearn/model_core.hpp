#pragma once

#include "sslearn/types.hpp"

namespace sslearn {

/// Returns a copy of the frame with every column mean-centered.
/// All regressions in the library run on centered data; no intercepts are fitted.
TimeSeriesFrame center_columns(const TimeSeriesFrame& frame);

/// Builds the aligned lag blocks for (frame, partition) over t = 2..T-1.
/// The frame is centered internally. Throws DataError for unknown names or T < 4.
LaggedDesign build_lagged_design(const TimeSeriesFrame& frame, const StatePartition& part);

/// Least-squares solve of targets = regressors * coef (no intercept),
/// via column-pivoted QR. Throws DegenerateDesignError when the regressor
/// block is rank deficient; `regressor_names` is only used for that message.
Matrix solve_least_squares(const Matrix& regressors, const Matrix& targets,
                           const std::vector<std::string>& regressor_names);

/// Per-equation Gaussian MLE of the coefficient matrices:
///   controls on [x_{t-1}, z_t], endo states on [x_{t-1}, z_t],
///   each exo state on its own lag. Shock variances are mean squared
///   residuals with divisor T_eff.
StateSpaceParams fit_params(const TimeSeriesFrame& frame, const StatePartition& part);

/// Same as fit_params but reuses an already built design.
StateSpaceParams fit_params(const LaggedDesign& design);

}  // namespace sslearn
