#pragma once

#include "sslearn/types.hpp"

#include <optional>

namespace sslearn {

struct PartialCorrTest {
    std::string var_a;
    std::string var_b;
    std::vector<std::string> conditioning;
    std::optional<double> r;  // unset when the near-zero-residual guard fires
    double t_stat = 0.0;
    double p_value = 1.0;
    bool guard_triggered = false;
};

struct SrivastavaStat {
    double t3 = 0.0;
    double gamma3 = 0.0;
    double a20 = 0.0;
    double a40 = 0.0;
    int p = 0;       // dimension of the tested covariance
    int n_eff = 0;   // effective sample size used in the formulas
    bool denominator_substituted = false;
    double p_value = 1.0;
};

/// Residuals of `targets` after least-squares projection onto `regressors`.
/// With zero regressor columns this reduces to mean-centering the targets.
Matrix residualize(const Matrix& targets, const Matrix& regressors,
                   const std::vector<std::string>& regressor_names = {});

/// Two-sided tail probability of Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

/// Two-sided standard-normal tail probability.
double normal_two_sided_p(double z);

/// Partial correlation of a and b given the conditioning columns, with a
/// t-test at df = n - |conditioning| - 2. If either residual's variance falls
/// below guard_tol times that variable's raw variance the test is passed
/// through (guard_triggered, p = 1). Zero raw variance is a DataError.
PartialCorrTest partial_corr_test(const Vector& a, const Vector& b,
                                  const Matrix& conditioning, double guard_tol,
                                  const std::string& name_a = "a",
                                  const std::string& name_b = "b");

/// Same test computed from residuals that were already projected onto the
/// conditioning set. raw_var_* are the pre-projection variances (guard input),
/// n_cond the number of conditioning columns.
PartialCorrTest partial_corr_from_residuals(const Vector& resid_a, const Vector& resid_b,
                                            double raw_var_a, double raw_var_b,
                                            int n_cond, double guard_tol,
                                            const std::string& name_a,
                                            const std::string& name_b);

/// z-test for the null that the covariance of the residual columns is
/// diagonal. n_override, when positive, replaces the row count as the n in
/// the statistic's formulas (used to discount regression coefficients spent
/// producing the residuals). Rejection (small p) means "not diagonal".
SrivastavaStat srivastava_test(const Matrix& residuals, double alpha, int n_override = 0);

}  // namespace sslearn
