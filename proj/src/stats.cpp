#include "sslearn/stats.hpp"

#include "sslearn/model_core.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace sslearn {

Matrix residualize(const Matrix& targets, const Matrix& regressors,
                   const std::vector<std::string>& regressor_names) {
    Matrix tc = targets.rowwise() - targets.colwise().mean();
    if (regressors.cols() == 0) return tc;
    // Centering both sides is equivalent to including an intercept, which
    // makes the residuals invariant to affine shifts of the inputs.
    Matrix rc = regressors.rowwise() - regressors.colwise().mean();
    Matrix coef = solve_least_squares(rc, tc, regressor_names);
    return tc - rc * coef;
}

double student_t_two_sided_p(double t, double df) {
    if (!std::isfinite(t)) return 0.0;
    boost::math::students_t_distribution<double> dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double normal_two_sided_p(double z) {
    if (!std::isfinite(z)) return 0.0;
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

PartialCorrTest partial_corr_from_residuals(const Vector& resid_a, const Vector& resid_b,
                                            double raw_var_a, double raw_var_b,
                                            int n_cond, double guard_tol,
                                            const std::string& name_a,
                                            const std::string& name_b) {
    const int n = static_cast<int>(resid_a.size());
    if (!(raw_var_a > 0.0) || !(raw_var_b > 0.0))
        throw DataError("zero raw variance in partial correlation input ('" + name_a +
                        "' vs '" + name_b + "')");

    PartialCorrTest out;
    out.var_a = name_a;
    out.var_b = name_b;

    const Vector ca = resid_a.array() - resid_a.mean();
    const Vector cb = resid_b.array() - resid_b.mean();
    const double var_a = ca.squaredNorm() / n;
    const double var_b = cb.squaredNorm() / n;

    // Near-zero residuals make the correlation meaningless (it only reflects
    // rounding error), so the model is passed through the test.
    if (var_a < guard_tol * raw_var_a || var_b < guard_tol * raw_var_b) {
        out.guard_triggered = true;
        out.p_value = 1.0;
        return out;
    }

    double r = ca.dot(cb) / (std::sqrt(ca.squaredNorm()) * std::sqrt(cb.squaredNorm()));
    r = std::clamp(r, -1.0, 1.0);
    const double df = n - n_cond - 2;
    const double denom = 1.0 - r * r;
    out.r = r;
    out.t_stat = denom <= 0.0 ? std::numeric_limits<double>::infinity()
                              : r * std::sqrt(df / denom);
    out.p_value = student_t_two_sided_p(out.t_stat, df);
    return out;
}

PartialCorrTest partial_corr_test(const Vector& a, const Vector& b,
                                  const Matrix& conditioning, double guard_tol,
                                  const std::string& name_a, const std::string& name_b) {
    if (a.size() != b.size() || (conditioning.cols() > 0 && conditioning.rows() != a.size()))
        throw DataError("partial_corr_test inputs have unequal lengths");
    const int n = static_cast<int>(a.size());
    if (n <= static_cast<int>(conditioning.cols()) + 3)
        throw DataError("too few rows for the conditioning set size");

    auto raw_var = [n](const Vector& v) {
        return (v.array() - v.mean()).matrix().squaredNorm() / n;
    };

    Matrix both(n, 2);
    both.col(0) = a;
    both.col(1) = b;
    Matrix resid = residualize(both, conditioning);
    PartialCorrTest out = partial_corr_from_residuals(
        resid.col(0), resid.col(1), raw_var(a), raw_var(b),
        static_cast<int>(conditioning.cols()), guard_tol, name_a, name_b);
    for (int j = 0; j < conditioning.cols(); ++j)
        out.conditioning.push_back("cond" + std::to_string(j));
    return out;
}

SrivastavaStat srivastava_test(const Matrix& residuals, double alpha, int n_override) {
    (void)alpha;  // the caller compares p_value to its level
    const int rows = static_cast<int>(residuals.rows());
    const int p = static_cast<int>(residuals.cols());
    if (p < 2) throw DataError("diagonality test needs dimension p >= 2");
    if (rows < p + 2) throw DataError("diagonality test needs at least p + 2 rows");
    if (!residuals.allFinite()) throw DataError("non-finite residuals");

    const int n = n_override > 0 ? n_override : rows;

    Matrix centered = residuals.rowwise() - residuals.colwise().mean();
    Matrix S = centered.transpose() * centered / n;

    double sum_s2 = 0.0, sum_s4 = 0.0;
    for (int i = 0; i < p; ++i) {
        const double sii = S(i, i);
        sum_s2 += sii * sii;
        sum_s4 += sii * sii * sii * sii;
    }
    const double tr_S = S.trace();
    const double tr_S2 = (S * S).trace();

    SrivastavaStat out;
    out.p = p;
    out.n_eff = n;
    out.gamma3 = (static_cast<double>(n) / (n - 1)) * (tr_S2 - tr_S * tr_S / n) / sum_s2;
    out.a20 = static_cast<double>(n) / (p * (n + 2.0)) * sum_s2;
    out.a40 = sum_s4 / p;

    double denom = 1.0 - (out.a40 / (out.a20 * out.a20)) / p;
    if (denom < 0.0) {
        denom = 1.0 - sum_s4 / (sum_s2 * sum_s2);
        out.denominator_substituted = true;
    }
    out.t3 = (n / 2.0) * (out.gamma3 - 1.0) / std::sqrt(denom);
    out.p_value = normal_two_sided_p(out.t3);
    return out;
}

}  // namespace sslearn
