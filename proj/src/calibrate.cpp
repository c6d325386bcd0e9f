#include "sslearn/calibrate.hpp"

#include "sslearn/rng.hpp"
#include "sslearn/stats.hpp"

#include <Eigen/Cholesky>

namespace sslearn {

CalibrationCell calibrate_cell(CalibrationCell cell, std::uint64_t seed) {
    if (cell.repetitions < 1) throw ConfigError("repetitions must be at least 1");
    if (cell.p < 2) throw ConfigError("dimension must be at least 2");
    if (cell.n < cell.p + 2) throw ConfigError("n must be at least p + 2");
    if (cell.correlation < 0.0 || cell.correlation >= 1.0)
        throw ConfigError("correlation must lie in [0, 1)");

    Matrix cov = Matrix::Constant(cell.p, cell.p, cell.correlation);
    cov.diagonal().setOnes();
    Matrix chol = Eigen::LLT<Matrix>(cov).matrixL();

    long rejections = 0;
    for (int rep = 0; rep < cell.repetitions; ++rep) {
        Xoshiro256pp rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));
        Matrix sample(cell.n, cell.p);
        for (int i = 0; i < cell.n; ++i)
            for (int j = 0; j < cell.p; ++j) sample(i, j) = rng.next_normal();
        if (cell.correlation != 0.0) sample = sample * chol.transpose();
        SrivastavaStat stat = srivastava_test(sample, cell.alpha);
        if (stat.p_value < cell.alpha) ++rejections;
    }
    cell.rejection_rate = static_cast<double>(rejections) / cell.repetitions;
    return cell;
}

}  // namespace sslearn
