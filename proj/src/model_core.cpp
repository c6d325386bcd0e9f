#include "sslearn/model_core.hpp"

#include <Eigen/QR>

#include <sstream>

namespace sslearn {

TimeSeriesFrame center_columns(const TimeSeriesFrame& frame) {
    TimeSeriesFrame out = frame;
    out.values.rowwise() -= frame.values.colwise().mean();
    return out;
}

namespace {

Matrix select_block(const Matrix& values, const TimeSeriesFrame& frame,
                    const std::vector<std::string>& names, int lag, int t_eff) {
    Matrix block(t_eff, static_cast<int>(names.size()));
    // Common range is t = 2..T-1, so a lag-l column starts at row 2 - l.
    for (std::size_t j = 0; j < names.size(); ++j) {
        const int col = frame.index_of(names[j]);
        block.col(static_cast<int>(j)) = values.block(2 + lag, col, t_eff, 1);
    }
    return block;
}

}  // namespace

LaggedDesign build_lagged_design(const TimeSeriesFrame& frame, const StatePartition& part) {
    frame.validate();
    part.validate();
    const TimeSeriesFrame centered = center_columns(frame);
    const int t_eff = frame.rows() - 2;

    LaggedDesign d;
    d.partition = part;
    d.t_eff = t_eff;
    d.y_t = select_block(centered.values, frame, part.controls, 0, t_eff);
    d.x_t = select_block(centered.values, frame, part.endo_states, 0, t_eff);
    d.z_t = select_block(centered.values, frame, part.exo_states, 0, t_eff);
    d.y_m1 = select_block(centered.values, frame, part.controls, -1, t_eff);
    d.x_m1 = select_block(centered.values, frame, part.endo_states, -1, t_eff);
    d.z_m1 = select_block(centered.values, frame, part.exo_states, -1, t_eff);
    d.x_m2 = select_block(centered.values, frame, part.endo_states, -2, t_eff);
    d.z_m2 = select_block(centered.values, frame, part.exo_states, -2, t_eff);
    return d;
}

Matrix solve_least_squares(const Matrix& regressors, const Matrix& targets,
                           const std::vector<std::string>& regressor_names) {
    if (regressors.cols() == 0) return Matrix(0, targets.cols());
    if (regressors.rows() != targets.rows())
        throw DataError("regressor and target row counts differ");

    Eigen::ColPivHouseholderQR<Matrix> qr(regressors);
    // Rank threshold relative to the largest pivot; pseudo-inverse fallbacks
    // are not allowed here.
    qr.setThreshold(1e-10);
    if (qr.rank() < regressors.cols()) {
        const auto perm = qr.colsPermutation().indices();
        std::vector<std::string> offending;
        std::ostringstream msg;
        msg << "rank-deficient design (rank " << qr.rank() << " of " << regressors.cols() << ")";
        for (int i = static_cast<int>(qr.rank()); i < regressors.cols(); ++i) {
            const int col = perm[i];
            std::string name = col < static_cast<int>(regressor_names.size())
                                   ? regressor_names[static_cast<std::size_t>(col)]
                                   : "col" + std::to_string(col);
            offending.push_back(name);
            msg << (i == qr.rank() ? ": " : ", ") << name;
        }
        throw DegenerateDesignError(msg.str(), offending);
    }
    return qr.solve(targets);
}

StateSpaceParams fit_params(const TimeSeriesFrame& frame, const StatePartition& part) {
    return fit_params(build_lagged_design(frame, part));
}

StateSpaceParams fit_params(const LaggedDesign& design) {
    const StatePartition& part = design.partition;
    const int n_x = part.n_endo(), n_z = part.n_exo(), n_y = part.n_controls();
    const int t_eff = design.t_eff;

    std::vector<std::string> state_names;
    for (const auto& n : part.endo_states) state_names.push_back(n + "[t-1]");
    for (const auto& n : part.exo_states) state_names.push_back(n + "[t]");
    Matrix states(t_eff, n_x + n_z);
    states << design.x_m1, design.z_t;

    StateSpaceParams out;
    out.partition = part;
    out.A = Matrix::Zero(n_y, n_x);
    out.B = Matrix::Zero(n_y, n_z);
    out.C = Matrix::Zero(n_x, n_x);
    out.D = Matrix::Zero(n_x, n_z);
    out.E_diag = Vector::Zero(n_z);
    out.sigma2_controls = Vector::Zero(n_y);
    out.sigma2_endo = Vector::Zero(n_x);
    out.sigma2_exo = Vector::Zero(n_z);

    auto mse = [t_eff](const Vector& resid) { return resid.squaredNorm() / t_eff; };

    if (n_y > 0) {
        Matrix coef = solve_least_squares(states, design.y_t, state_names);  // (n_x+n_z) x n_y
        out.A = coef.topRows(n_x).transpose();
        out.B = coef.bottomRows(n_z).transpose();
        Matrix resid = design.y_t - states * coef;
        for (int i = 0; i < n_y; ++i) out.sigma2_controls[i] = mse(resid.col(i));
    }
    if (n_x > 0) {
        Matrix coef = solve_least_squares(states, design.x_t, state_names);
        out.C = coef.topRows(n_x).transpose();
        out.D = coef.bottomRows(n_z).transpose();
        Matrix resid = design.x_t - states * coef;
        for (int i = 0; i < n_x; ++i) out.sigma2_endo[i] = mse(resid.col(i));
    }
    for (int i = 0; i < n_z; ++i) {
        // Each exogenous state regresses on its own lag only.
        Matrix own_lag = design.z_m1.col(i);
        Matrix coef = solve_least_squares(own_lag, design.z_t.col(i),
                                          {part.exo_states[static_cast<std::size_t>(i)] + "[t-1]"});
        out.E_diag[i] = coef(0, 0);
        out.sigma2_exo[i] = mse(design.z_t.col(i) - own_lag * coef);
    }
    return out;
}

}  // namespace sslearn
