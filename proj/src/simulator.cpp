#include "sslearn/simulator.hpp"

#include "sslearn/rng.hpp"

#include <cmath>

namespace sslearn {

void SimConfig::validate() const {
    params.validate();
    if (n < 4) throw ConfigError("sample size must be at least 4");
    if (burn_in < 0) throw ConfigError("burn_in must be non-negative");
    if (params.endo_spectral_radius() >= 1.0)
        throw ConfigError("spectral radius of C must be strictly below 1");
}

TimeSeriesFrame simulate(const SimConfig& cfg) {
    cfg.validate();
    const StateSpaceParams& params = cfg.params;
    const int n_z = params.partition.n_exo();
    const int n_x = params.partition.n_endo();
    const int n_y = params.partition.n_controls();

    Vector sd_z = params.sigma2_exo.cwiseSqrt();
    Vector sd_x = params.sigma2_endo.cwiseSqrt();
    Vector sd_y = params.sigma2_controls.cwiseSqrt();

    Xoshiro256pp rng(cfg.seed);
    Vector z = Vector::Zero(n_z), x = Vector::Zero(n_x), x_prev = Vector::Zero(n_x);

    TimeSeriesFrame out;
    out.names = params.partition.all_names();
    out.values.resize(cfg.n, n_z + n_x + n_y);

    const int total = cfg.burn_in + cfg.n;
    for (int t = 0; t < total; ++t) {
        // Shock draw order per step: exo, endo, controls (in partition order).
        // Draws happen even for zero-variance equations so the stream layout
        // depends only on the dimensions.
        Vector eps_z(n_z), eps_x(n_x), eps_y(n_y);
        for (int i = 0; i < n_z; ++i) eps_z[i] = sd_z[i] * rng.next_normal();
        for (int i = 0; i < n_x; ++i) eps_x[i] = sd_x[i] * rng.next_normal();
        for (int i = 0; i < n_y; ++i) eps_y[i] = sd_y[i] * rng.next_normal();

        z = params.E_diag.asDiagonal() * z + eps_z;
        x_prev = x;
        x = params.C * x_prev + params.D * z + eps_x;
        Vector y = params.A * x_prev + params.B * z + eps_y;

        const int row = t - cfg.burn_in;
        if (row >= 0) {
            out.values.block(row, 0, 1, n_z) = z.transpose();
            out.values.block(row, n_z, 1, n_x) = x.transpose();
            out.values.block(row, n_z + n_x, 1, n_y) = y.transpose();
        }
    }
    return out;
}

namespace {

SimConfig small_rbc_like(int n, std::uint64_t seed) {
    SimConfig cfg;
    cfg.n = n;
    cfg.seed = seed;
    StateSpaceParams& p = cfg.params;
    p.partition.exo_states = {"g", "z"};
    p.partition.endo_states = {"k"};
    p.partition.controls = {"w", "r", "y", "c", "l", "i"};

    // Persistence is kept moderate so large-sample impulse responses stay
    // close to the generating ones: high AR roots amplify the estimation
    // error in e_ii over long horizons.
    p.E_diag = Vector(2);
    p.E_diag << 0.85, 0.80;
    p.sigma2_exo = Vector::Constant(2, 1.0);

    p.C = Matrix(1, 1);
    p.C << 0.70;
    p.D = Matrix(1, 2);
    p.D << 0.30, 0.50;
    p.sigma2_endo = Vector::Constant(1, 0.04);

    p.A = Matrix(6, 1);
    p.A << 0.50, -0.40, 0.30, 0.60, -0.20, 0.40;
    p.B = Matrix(6, 2);
    p.B << 0.20, 0.80,
           0.10, 0.60,
           0.40, 1.00,
           0.30, 0.50,
           0.50, 0.70,
          -0.60, 0.90;
    p.sigma2_controls = Vector::Constant(6, 0.04);
    return cfg;
}

SimConfig medium_nk_like(int n, std::uint64_t seed) {
    SimConfig cfg;
    cfg.n = n;
    cfg.seed = seed;
    StateSpaceParams& p = cfg.params;
    p.partition.exo_states = {"a", "nu", "z"};
    p.partition.endo_states = {"p"};
    p.partition.controls = {"y", "i", "pi", "y_gap", "r_nat", "r_real", "n",
                            "m_real", "m_nominal", "w", "c", "w_real", "mu"};

    p.E_diag = Vector(3);
    p.E_diag << 0.85, 0.70, 0.90;
    p.sigma2_exo = Vector::Constant(3, 1.0);

    p.C = Matrix(1, 1);
    p.C << 0.80;
    p.D = Matrix(1, 3);
    p.D << 0.40, -0.30, 0.50;
    p.sigma2_endo = Vector::Constant(1, 0.04);

    p.A = Matrix(13, 1);
    p.A << 0.50, -0.30, 0.40, 0.20, -0.50, 0.60, 0.30, -0.40, 0.70, 0.10, 0.45, -0.25, 0.35;
    p.B = Matrix(13, 3);
    p.B << 0.60, -0.20, 0.50,
           0.30, 0.70, -0.10,
          -0.40, 0.50, 0.60,
           0.20, -0.60, 0.40,
           0.70, 0.10, -0.30,
          -0.20, 0.40, 0.70,
           0.50, 0.30, 0.20,
           0.10, -0.50, 0.60,
          -0.60, 0.20, 0.30,
           0.40, 0.60, -0.50,
           0.30, -0.10, 0.80,
          -0.50, 0.70, 0.10,
           0.20, 0.30, -0.70;
    p.sigma2_controls = Vector::Constant(13, 0.04);
    return cfg;
}

}  // namespace

SimConfig preset(const std::string& name, int n, std::uint64_t seed) {
    if (name == "small-rbc-like") return small_rbc_like(n, seed);
    if (name == "medium-nk-like") return medium_nk_like(n, seed);
    throw ConfigError("unknown preset '" + name + "' (expected small-rbc-like or medium-nk-like)");
}

}  // namespace sslearn
