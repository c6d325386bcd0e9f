#include "sslearn/irf.hpp"

#include "sslearn/model_core.hpp"

#include <algorithm>
#include <cmath>

namespace sslearn {

IrfPath irf_statespace(const IrfRequest& req) {
    const StateSpaceParams& m = req.model;
    m.validate();
    if (req.horizon < 1) throw ConfigError("horizon must be positive");
    if (m.exo_spectral_radius() >= 1.0 || m.endo_spectral_radius() >= 1.0)
        throw ConfigError("model must be stationary for impulse responses");

    const auto& part = m.partition;
    const int n_z = part.n_exo(), n_x = part.n_endo(), n_y = part.n_controls();

    auto find = [](const std::vector<std::string>& names, const std::string& name) {
        auto it = std::find(names.begin(), names.end(), name);
        return it == names.end() ? -1 : static_cast<int>(it - names.begin());
    };
    if (find(part.controls, req.shocked) >= 0)
        throw ConfigError("cannot shock control '" + req.shocked +
                          "': changes to controls are not propagated to future periods");

    const int zi = find(part.exo_states, req.shocked);
    const int xi = find(part.endo_states, req.shocked);
    if (zi < 0 && xi < 0) throw ConfigError("unknown state variable '" + req.shocked + "'");

    Vector z = Vector::Zero(n_z), x = Vector::Zero(n_x), x_prev = Vector::Zero(n_x);
    Vector y = Vector::Zero(n_y);
    if (zi >= 0) {
        // Exogenous impulse: moves z at impact and reaches x and y through D, B.
        z[zi] = req.magnitude * std::sqrt(m.sigma2_exo[zi]);
        x = m.D * z;
        y = m.B * z;
    } else {
        // Endogenous impulse: sets x at impact; controls respond from period 1
        // because they read x_{t-1}.
        x[xi] = req.magnitude * std::sqrt(m.sigma2_endo[xi]);
    }

    IrfPath path;
    path.names = part.all_names();
    path.responses.resize(req.horizon + 1, n_z + n_x + n_y);
    auto store = [&](int row) {
        path.responses.block(row, 0, 1, n_z) = z.transpose();
        path.responses.block(row, n_z, 1, n_x) = x.transpose();
        path.responses.block(row, n_z + n_x, 1, n_y) = y.transpose();
    };
    store(0);
    for (int h = 1; h <= req.horizon; ++h) {
        z = m.E_diag.asDiagonal() * z;
        x_prev = x;
        x = m.C * x_prev + m.D * z;
        y = m.A * x_prev + m.B * z;
        store(h);
    }
    return path;
}

Var1Fit fit_var1(const TimeSeriesFrame& frame) {
    frame.validate();
    const int k = frame.cols();
    const int t = frame.rows();
    if (t < k + 3) throw DataError("VAR(1) fit needs at least k + 3 rows");

    Matrix centered = frame.values.rowwise() - frame.values.colwise().mean();
    Matrix lags = centered.topRows(t - 1);
    Matrix current = centered.bottomRows(t - 1);

    std::vector<std::string> lag_names;
    for (const auto& n : frame.names) lag_names.push_back(n + "[t-1]");
    Matrix coef = solve_least_squares(lags, current, lag_names);  // k x k, column per target

    Var1Fit fit;
    fit.names = frame.names;
    fit.coef = coef.transpose();
    Matrix resid = current - lags * coef;
    fit.residual_cov = resid.transpose() * resid / static_cast<double>(t - 1);
    return fit;
}

IrfPath irf_var1(const Var1Fit& fit, const Vector& shock, int horizon,
                 bool allow_nonstationary) {
    const int k = static_cast<int>(fit.coef.rows());
    if (shock.size() != k) throw ConfigError("shock vector has wrong length");
    if (horizon < 1) throw ConfigError("horizon must be positive");
    if (!allow_nonstationary) {
        const double rho = fit.coef.eigenvalues().cwiseAbs().maxCoeff();
        if (rho >= 1.0)
            throw ConfigError("VAR(1) coefficient matrix is non-stationary (spectral radius " +
                              std::to_string(rho) + ")");
    }

    IrfPath path;
    path.names = fit.names;
    path.responses.resize(horizon + 1, k);
    Vector state = shock;
    path.responses.row(0) = state.transpose();
    for (int h = 1; h <= horizon; ++h) {
        state = fit.coef * state;
        path.responses.row(h) = state.transpose();
    }
    return path;
}

}  // namespace sslearn
