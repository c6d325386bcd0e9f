#pragma once

#include "sslearn/simulator.hpp"
#include "sslearn/validity.hpp"

#include <cstdint>
#include <functional>

namespace sslearn {

struct SearchConfig {
    double alpha = 0.05;
    TestStrategy strategy = TestStrategy::multiple;
    ScoreKey score_key = ScoreKey::loglik;  // score-only mode only
    int max_states = -1;                    // -1 means auto (k - 2)
    double guard_tol = 1e-10;
    bool include_endo_lagexo = true;
    int parallelism = 1;

    void validate(int k) const;
    int resolved_max_states(int k) const;
};

struct SearchResult {
    std::vector<ValidityReport> valid_models;  // sorted; see run_search
    long models_tested = 0;
    int tiers_completed = 0;
    bool stopped_early = false;
};

/// Every partition of `names` with exactly s states, in deterministic order:
/// s-subsets in lexicographic index order, then each of the 2^s exo/endo
/// labelings (bit i set means subset member i is endogenous).
/// Cardinality C(k,s) * 2^s.
std::vector<StatePartition> enumerate_tier(const std::vector<std::string>& names, int s);

/// Number of partitions in tier s without materializing them.
long tier_size(int k, int s);

/// Algorithm driver. Tiers s = 1, 2, ... are evaluated exhaustively; the
/// first tier containing a valid model ends the search (MSV early stop).
/// Results are sorted by n_endo descending, then log-likelihood descending,
/// then canonical encoding ascending. In score-only mode every tier up to
/// max_states is ranked by the configured score with no validity filter.
SearchResult run_search(const TimeSeriesFrame& frame, const SearchConfig& cfg);

struct TallyRow {
    StatePartition partition;
    long wins = 0;
    long valid = 0;
};

struct MonteCarloResult {
    std::vector<TallyRow> rows;   // sorted by wins desc, valid desc, encoding
    long reps_completed = 0;
    long reps_failed = 0;
    long reps_no_winner = 0;
    long models_per_rep = 0;
};

/// Repeated simulate + run_search on fresh samples; replication i uses
/// derive_seed(sim.seed, i). Failed replications are counted and skipped.
MonteCarloResult monte_carlo(const SearchConfig& cfg, const SimConfig& sim,
                             int reps, int n_small);

}  // namespace sslearn
