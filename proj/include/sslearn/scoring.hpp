#pragma once

#include "sslearn/types.hpp"

namespace sslearn {

enum class ScoreKey { loglik, bic, aic };

struct ScoreReport {
    double log_likelihood = 0.0;
    double bic = 0.0;
    double aic = 0.0;
    std::vector<double> per_equation_sigma2;  // frame block order: exo, endo, controls
    int n_params = 0;
    int t_eff = 0;
};

/// Free parameter count of a candidate: entries of A..E plus k variances.
int count_params(const StatePartition& part);

/// Gaussian log-likelihood at the MLE in its simplified form,
///   L = -(T_eff/2) * (k (1 + ln 2pi) + sum_i ln sigma2_i),
/// with sigma2 floored at 1e-300 so exact-fit equations stay finite.
/// BIC = -2L + n_params ln T_eff, AIC = -2L + 2 n_params.
ScoreReport score(const LaggedDesign& design, const StateSpaceParams& params);
ScoreReport score(const TimeSeriesFrame& frame, const StatePartition& part);

struct ScoredPartition {
    StatePartition partition;
    ScoreReport report;
};

/// Ranks candidates by the chosen key: log-likelihood descending, BIC/AIC
/// ascending. Ties broken by the canonical partition encoding.
std::vector<ScoredPartition> compare(std::vector<ScoredPartition> scored, ScoreKey key);

}  // namespace sslearn
