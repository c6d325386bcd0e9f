#include "sslearn/scoring.hpp"

#include "sslearn/model_core.hpp"

#include <algorithm>
#include <cmath>

namespace sslearn {

namespace {
constexpr double kSigma2Floor = 1e-300;  // keeps exact-fit equations finite
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}  // namespace

int count_params(const StatePartition& part) {
    const int y = part.n_controls(), x = part.n_endo(), z = part.n_exo();
    return y * x + y * z + x * x + x * z + z + part.n_vars();
}

ScoreReport score(const LaggedDesign& design, const StateSpaceParams& params) {
    const int k = params.partition.n_vars();
    ScoreReport out;
    out.t_eff = design.t_eff;
    out.n_params = count_params(params.partition);
    out.per_equation_sigma2.reserve(static_cast<std::size_t>(k));

    double sum_log_sigma2 = 0.0;
    auto add = [&](const Vector& sigma2) {
        for (int i = 0; i < sigma2.size(); ++i) {
            out.per_equation_sigma2.push_back(sigma2[i]);
            sum_log_sigma2 += std::log(std::max(sigma2[i], kSigma2Floor));
        }
    };
    add(params.sigma2_exo);
    add(params.sigma2_endo);
    add(params.sigma2_controls);

    out.log_likelihood = -0.5 * design.t_eff * (k * (1.0 + kLog2Pi) + sum_log_sigma2);
    out.bic = -2.0 * out.log_likelihood + out.n_params * std::log(static_cast<double>(design.t_eff));
    out.aic = -2.0 * out.log_likelihood + 2.0 * out.n_params;
    return out;
}

ScoreReport score(const TimeSeriesFrame& frame, const StatePartition& part) {
    LaggedDesign design = build_lagged_design(frame, part);
    return score(design, fit_params(design));
}

std::vector<ScoredPartition> compare(std::vector<ScoredPartition> scored, ScoreKey key) {
    if (scored.empty()) throw ConfigError("compare needs a non-empty list");
    auto value = [key](const ScoredPartition& s) {
        switch (key) {
            case ScoreKey::loglik: return -s.report.log_likelihood;  // higher is better
            case ScoreKey::bic: return s.report.bic;                 // lower is better
            case ScoreKey::aic: return s.report.aic;
        }
        return 0.0;
    };
    std::stable_sort(scored.begin(), scored.end(),
                     [&](const ScoredPartition& a, const ScoredPartition& b) {
                         const double va = value(a), vb = value(b);
                         if (va != vb) return va < vb;
                         return a.partition.canonical_encoding() < b.partition.canonical_encoding();
                     });
    return scored;
}

}  // namespace sslearn
