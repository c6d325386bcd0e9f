#pragma once

#include "sslearn/scoring.hpp"
#include "sslearn/stats.hpp"
#include "sslearn/types.hpp"

namespace sslearn {

enum class ObligationKind { endo_pair, lagstate_exo, endo_lagexo, exo_pair };

/// One variable at a lag offset (0, -1 or -2 periods).
struct LaggedVar {
    std::string name;
    int lag = 0;

    bool operator==(const LaggedVar&) const = default;
    std::string label() const;
};

/// A single conditional-independence obligation implied by a candidate
/// partition. The kind fixes the conditioning-set shape:
///   endo_pair:    time-t endogenous pair | [x_{t-1}, z_t]
///   lagstate_exo: (x_{t-1}, z_t) pair    | z_{t-1}
///   endo_lagexo:  (time-t endo, z_{t-1}) | [x_{t-1}, z_t]
///   exo_pair:     z_t pair               | z_{t-1}
struct CiObligation {
    ObligationKind kind{};
    LaggedVar var_a;
    LaggedVar var_b;
    std::vector<LaggedVar> conditioning;
};

enum class TestStrategy { multiple, srivastava, score_only };

std::string strategy_name(TestStrategy s);
TestStrategy strategy_from_name(const std::string& s);

struct TestRecord {
    std::string label;    // obligation description or "T3"
    double p_value = 1.0;
    bool guard_triggered = false;
};

struct ValidityReport {
    StatePartition partition;
    TestStrategy strategy = TestStrategy::multiple;
    std::vector<TestRecord> tests;
    double sig_level_used = 0.0;
    bool valid = false;
    bool untestable = false;       // degenerate design; treated as invalid
    std::string untestable_reason;
    ScoreReport score;
    int n_endo = 0;

    double log_likelihood() const { return score.log_likelihood; }
    /// Smallest p-value across tests (1 when there are none).
    double p_min() const;
    /// One CSV row: partition, strategy, valid, p_min, log_likelihood.
    std::string csv_row() const;
};

struct ValidityConfig {
    double alpha = 0.05;
    double guard_tol = 1e-10;
    /// Whether the optional endo_lagexo obligations join the Bonferroni
    /// count of the multiple strategy.
    bool include_endo_lagexo = true;
};

/// All obligations of a partition in deterministic order
/// (endo_pair, lagstate_exo, endo_lagexo, exo_pair; each family in the
/// partition's name order).
std::vector<CiObligation> generate_obligations(const StatePartition& part,
                                               bool include_endo_lagexo = true);

/// Expected obligation count: C(s+c,2) + s*e + (s+c)*e + C(e,2).
long obligation_count(const StatePartition& part, bool include_endo_lagexo = true);

/// Bonferroni-corrected partial-correlation testing of every obligation.
ValidityReport check_multiple(const LaggedDesign& design, const ValidityConfig& cfg);

/// Joint diagonality test: residualize [y_{t-1}, x_{t-1}, z_t] on
/// [x_{t-2}, z_{t-1}] and apply the Srivastava z-test at level alpha.
ValidityReport check_srivastava(const LaggedDesign& design, const ValidityConfig& cfg);

}  // namespace sslearn
