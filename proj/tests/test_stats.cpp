#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sslearn/rng.hpp"
#include "sslearn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace sslearn;

namespace {

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
    Xoshiro256pp rng(seed);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.next_normal();
    return m;
}

/// Columns rescaled so the sample covariance with divisor `n` is exactly
/// the identity.
Matrix whitened_sample(int n, int p, std::uint64_t seed) {
    Matrix x = random_matrix(n, p, seed);
    Matrix c = x.rowwise() - x.colwise().mean();
    Matrix cov = c.transpose() * c / n;
    Eigen::LLT<Matrix> llt(cov);
    return llt.matrixL().solve(c.transpose()).transpose();
}

}  // namespace

TEST_CASE("residualize basics") {
    Matrix x = random_matrix(50, 2, 1);

    // Targets equal to regressors project to zero.
    Matrix zero = residualize(x, x);
    CHECK(zero.cwiseAbs().maxCoeff() < 1e-10);

    // Empty regressor set mean-centers.
    Matrix centered = residualize(x, Matrix(50, 0));
    CHECK(std::abs(centered.col(0).mean()) < 1e-12);
    CHECK((centered.col(0) - (x.col(0).array() - x.col(0).mean()).matrix()).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("residuals are orthogonal to regressors (normal equations oracle)") {
    Matrix targets = random_matrix(100, 3, 2);
    Matrix regressors = random_matrix(100, 2, 3);
    Matrix resid = residualize(targets, regressors);
    // Cross products recomputed independently of the solver.
    Matrix cross = regressors.transpose() * resid;
    CHECK(cross.cwiseAbs().maxCoeff() / 100.0 < 1e-8);
}

TEST_CASE("perfect correlation") {
    Vector a = random_matrix(50, 1, 4);
    PartialCorrTest t = partial_corr_test(a, a, Matrix(50, 0), 1e-10);
    CHECK(t.r.has_value());
    CHECK(*t.r == doctest::Approx(1.0));
    CHECK(t.p_value < 1e-12);
}

TEST_CASE("chain DGP: conditioning on the mediator removes the correlation") {
    const int n = 10000;
    Xoshiro256pp rng(5);
    Vector a(n), m(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[i] = rng.next_normal();
        m[i] = a[i] + rng.next_normal();
        b[i] = m[i] + rng.next_normal();
    }
    PartialCorrTest uncond = partial_corr_test(a, b, Matrix(n, 0), 1e-10);
    CHECK(std::abs(*uncond.r) > 0.3);

    Matrix cond(n, 1);
    cond.col(0) = m;
    PartialCorrTest given_m = partial_corr_test(a, b, cond, 1e-10);
    CHECK(std::abs(*given_m.r) < 0.05);
}

TEST_CASE("collider DGP: conditioning on the collider creates correlation") {
    const int n = 10000;
    Xoshiro256pp rng(6);
    Vector a(n), m(n), b(n);
    for (int i = 0; i < n; ++i) {
        a[i] = rng.next_normal();
        b[i] = rng.next_normal();
        m[i] = a[i] + b[i] + rng.next_normal();
    }
    PartialCorrTest uncond = partial_corr_test(a, b, Matrix(n, 0), 1e-10);
    CHECK(std::abs(*uncond.r) < 0.05);

    Matrix cond(n, 1);
    cond.col(0) = m;
    PartialCorrTest given_m = partial_corr_test(a, b, cond, 1e-10);
    CHECK(std::abs(*given_m.r) > 0.1);
}

TEST_CASE("partial correlation is symmetric and scale invariant") {
    const int n = 500;
    Matrix data = random_matrix(n, 3, 7);
    Vector a = data.col(0) + 0.5 * data.col(2);
    Vector b = data.col(1) + 0.5 * data.col(2);
    Matrix cond = data.col(2);

    PartialCorrTest ab = partial_corr_test(a, b, cond, 1e-10);
    PartialCorrTest ba = partial_corr_test(b, a, cond, 1e-10);
    CHECK(*ab.r == doctest::Approx(*ba.r));
    CHECK(ab.p_value == doctest::Approx(ba.p_value));

    PartialCorrTest scaled =
        partial_corr_test(7.0 * a.array() - 3.0, -0.25 * b.array() + 11.0, 100.0 * cond, 1e-10);
    CHECK(std::abs(std::abs(*scaled.r) - std::abs(*ab.r)) < 1e-10);
    CHECK(std::abs(scaled.p_value - ab.p_value) < 1e-10);
}

TEST_CASE("guard fires on near-zero residuals, zero raw variance errors") {
    const int n = 200;
    Matrix cond = random_matrix(n, 1, 8);
    Vector a = 2.0 * cond.col(0);  // exactly explained by the conditioning set
    Vector b = random_matrix(n, 1, 9);

    PartialCorrTest t = partial_corr_test(a, b, cond, 1e-10);
    CHECK(t.guard_triggered);
    CHECK(t.p_value == 1.0);
    CHECK_FALSE(t.r.has_value());

    Vector constant = Vector::Zero(n);
    CHECK_THROWS_AS(partial_corr_test(constant, b, cond, 1e-10), DataError);
}

TEST_CASE("diagonality statistic matches the identity-covariance hand case") {
    Matrix sample = whitened_sample(100, 4, 10);
    SrivastavaStat s = srivastava_test(sample, 0.05);
    CHECK(s.gamma3 == doctest::Approx(96.0 / 99.0).epsilon(1e-10));
    CHECK(s.a20 == doctest::Approx(100.0 / 102.0).epsilon(1e-10));
    CHECK(s.a40 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.t3 == doctest::Approx(-1.7614).epsilon(1e-4));
    CHECK_FALSE(s.denominator_substituted);
}

TEST_CASE("diagonality statistic is invariant to column permutation and sign flips") {
    Matrix sample = random_matrix(300, 5, 11);
    SrivastavaStat base = srivastava_test(sample, 0.05);

    Matrix shuffled = sample;
    shuffled.col(0).swap(shuffled.col(4));
    shuffled.col(1).swap(shuffled.col(2));
    shuffled.col(3) *= -1.0;
    SrivastavaStat other = srivastava_test(shuffled, 0.05);
    CHECK(other.t3 == doctest::Approx(base.t3).epsilon(1e-12));
}

TEST_CASE("diagonality test rejects dimension below 2 and non-finite input") {
    CHECK_THROWS_AS(srivastava_test(random_matrix(50, 1, 12), 0.05), DataError);
    Matrix bad = random_matrix(50, 3, 13);
    bad(10, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(srivastava_test(bad, 0.05), DataError);
}

TEST_CASE("null distribution of t3 is close to standard normal (KS check)") {
    // Normality of t3 requires a growing dimension; at small p the null law
    // is a chi-square mixture (size is still near nominal, checked below).
    const int reps = 2000, n = 1000, p = 30;
    std::vector<double> stats;
    stats.reserve(reps);
    for (int rep = 0; rep < reps; ++rep)
        stats.push_back(srivastava_test(random_matrix(n, p, 1000 + static_cast<std::uint64_t>(rep)),
                                        0.05)
                            .t3);
    std::sort(stats.begin(), stats.end());

    double ks = 0.0;
    for (int i = 0; i < reps; ++i) {
        const double cdf = 0.5 * std::erfc(-stats[static_cast<std::size_t>(i)] / std::sqrt(2.0));
        ks = std::max(ks, std::abs(cdf - (i + 1.0) / reps));
        ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / reps));
    }
    // 1% critical value of the KS statistic is 1.63 / sqrt(reps).
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("empirical size and power at n=500, p=5") {
    const int reps = 400;
    int rejections = 0;
    for (int rep = 0; rep < reps; ++rep) {
        SrivastavaStat s =
            srivastava_test(random_matrix(500, 5, 5000 + static_cast<std::uint64_t>(rep)), 0.05);
        if (s.p_value < 0.05) ++rejections;
    }
    const double size = static_cast<double>(rejections) / reps;
    CHECK(size > 0.02);
    CHECK(size < 0.10);

    // Equicorrelated alternative with pairwise correlation 0.5.
    Matrix cov = Matrix::Constant(5, 5, 0.5);
    cov.diagonal().setOnes();
    Matrix chol = Eigen::LLT<Matrix>(cov).matrixL();
    rejections = 0;
    for (int rep = 0; rep < 100; ++rep) {
        Matrix sample = random_matrix(500, 5, 9000 + static_cast<std::uint64_t>(rep)) * chol.transpose();
        if (srivastava_test(sample, 0.05).p_value < 0.05) ++rejections;
    }
    CHECK(rejections > 95);
}
