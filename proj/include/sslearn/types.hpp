#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace sslearn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed configuration (bad flag values, unknown preset, dimension mismatch).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Problems with input data (parse failures, missing columns, too few rows).
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

/// A regressor block is rank deficient. Carries the offending column names.
class DegenerateDesignError : public Error {
public:
    DegenerateDesignError(const std::string& msg, std::vector<std::string> columns)
        : Error(msg), offending_columns(std::move(columns)) {}
    std::vector<std::string> offending_columns;
};

/// Assignment of every observable to one of the three roles.
/// exo_states follow own-lag AR(1) processes, endo_states enter with a lag,
/// controls are contemporaneous functions of the states.
struct StatePartition {
    std::vector<std::string> exo_states;
    std::vector<std::string> endo_states;
    std::vector<std::string> controls;

    int n_exo() const { return static_cast<int>(exo_states.size()); }
    int n_endo() const { return static_cast<int>(endo_states.size()); }
    int n_controls() const { return static_cast<int>(controls.size()); }
    int n_states() const { return n_exo() + n_endo(); }
    int n_vars() const { return n_exo() + n_endo() + n_controls(); }

    /// All names in block order: exo, endo, controls.
    std::vector<std::string> all_names() const;

    /// Total order used as the deterministic tie-break everywhere:
    /// sorted exo names joined by ',', then '|', then sorted endo names.
    std::string canonical_encoding() const;

    /// Throws ConfigError if the three sets overlap, are all empty of states,
    /// or contain duplicates.
    void validate() const;

    bool operator==(const StatePartition& other) const = default;
};

/// Coefficient matrices of the linear model
///   y_t = A x_{t-1} + B z_t        (controls)
///   x_t = C x_{t-1} + D z_t        (endogenous states)
///   z_t = E z_{t-1} + eps_t        (exogenous states)
/// Shock variances are stored per equation block, aligned with the partition's
/// name order. Exogenous-equation variances must be strictly positive; control
/// and endogenous-state equations may be noiseless (variance zero).
struct StateSpaceParams {
    StatePartition partition;
    Matrix A;              // |y| x |x|
    Matrix B;              // |y| x |z|
    Matrix C;              // |x| x |x|
    Matrix D;              // |x| x |z|
    Vector E_diag;         // |z|, diagonal of E
    Vector sigma2_controls;  // |y|
    Vector sigma2_endo;      // |x|
    Vector sigma2_exo;       // |z|

    /// Checks dimensions against the partition, |e_ii| < 1, and variance signs.
    void validate() const;

    /// Largest |e_ii|.
    double exo_spectral_radius() const;
    /// Spectral radius of C (0 when there are no endogenous states).
    double endo_spectral_radius() const;
};

/// Named multivariate sample, rows are time 0..T-1 in chronological order.
struct TimeSeriesFrame {
    std::vector<std::string> names;
    Matrix values;  // T x k

    int rows() const { return static_cast<int>(values.rows()); }
    int cols() const { return static_cast<int>(values.cols()); }

    /// Column index for a name; throws DataError if absent.
    int index_of(const std::string& name) const;

    /// Throws DataError on duplicate names, name/column count mismatch,
    /// non-finite entries, or fewer than 4 rows.
    void validate() const;
};

/// Aligned lag blocks for a (frame, partition) pair over the common usable
/// range t = 2..T-1, so every block has T_eff = T - 2 rows. Columns are
/// centered using the full-sample column means of the frame.
struct LaggedDesign {
    StatePartition partition;
    int t_eff = 0;

    Matrix y_t;    // controls at t
    Matrix x_t;    // endo states at t
    Matrix z_t;    // exo states at t
    Matrix y_m1;   // controls at t-1 (used by the rolled-back joint test)
    Matrix x_m1;   // endo states at t-1
    Matrix z_m1;   // exo states at t-1
    Matrix x_m2;   // endo states at t-2
    Matrix z_m2;   // exo states at t-2
};

}  // namespace sslearn
