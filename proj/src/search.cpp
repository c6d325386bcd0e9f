#include "sslearn/search.hpp"

#include "sslearn/model_core.hpp"
#include "sslearn/rng.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

namespace sslearn {

void SearchConfig::validate(int k) const {
    if (!(alpha > 0.0) || alpha > 1.0) {
        // score-only mode ignores alpha; the srivastava level of 1 is allowed
        // so the degenerate "reject everything" configuration stays expressible.
        if (strategy != TestStrategy::score_only)
            throw ConfigError("alpha must lie in (0, 1]");
    }
    if (k < 3) throw ConfigError("search needs at least 3 observables");
    if (max_states != -1 && (max_states < 1 || max_states > k - 2))
        throw ConfigError("max_states must lie in [1, k - 2]");
    if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
}

int SearchConfig::resolved_max_states(int k) const {
    return max_states == -1 ? k - 2 : max_states;
}

long tier_size(int k, int s) {
    long choose = 1;
    for (int i = 1; i <= s; ++i) choose = choose * (k - i + 1) / i;
    return choose << s;
}

std::vector<StatePartition> enumerate_tier(const std::vector<std::string>& names, int s) {
    const int k = static_cast<int>(names.size());
    if (s < 1 || s > k - 2) throw ConfigError("tier size out of range [1, k - 2]");

    std::vector<StatePartition> out;
    out.reserve(static_cast<std::size_t>(tier_size(k, s)));

    std::vector<int> subset(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) subset[static_cast<std::size_t>(i)] = i;

    auto emit = [&]() {
        std::vector<bool> is_state(static_cast<std::size_t>(k), false);
        for (int idx : subset) is_state[static_cast<std::size_t>(idx)] = true;
        for (unsigned mask = 0; mask < (1u << s); ++mask) {
            StatePartition part;
            for (int i = 0; i < s; ++i) {
                const auto& name = names[static_cast<std::size_t>(subset[static_cast<std::size_t>(i)])];
                if (mask & (1u << i))
                    part.endo_states.push_back(name);
                else
                    part.exo_states.push_back(name);
            }
            for (int i = 0; i < k; ++i)
                if (!is_state[static_cast<std::size_t>(i)])
                    part.controls.push_back(names[static_cast<std::size_t>(i)]);
            out.push_back(std::move(part));
        }
    };

    // Lexicographic subset enumeration.
    while (true) {
        emit();
        int i = s - 1;
        while (i >= 0 && subset[static_cast<std::size_t>(i)] == k - s + i) --i;
        if (i < 0) break;
        ++subset[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < s; ++j)
            subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

namespace {

void sort_by_preference(std::vector<ValidityReport>& reports) {
    std::stable_sort(reports.begin(), reports.end(),
                     [](const ValidityReport& a, const ValidityReport& b) {
                         if (a.n_endo != b.n_endo) return a.n_endo > b.n_endo;
                         if (a.score.log_likelihood != b.score.log_likelihood)
                             return a.score.log_likelihood > b.score.log_likelihood;
                         return a.partition.canonical_encoding() < b.partition.canonical_encoding();
                     });
}

std::vector<ValidityReport> evaluate_tier(const TimeSeriesFrame& frame,
                                          const std::vector<StatePartition>& tier,
                                          const SearchConfig& cfg) {
    const ValidityConfig vcfg{cfg.alpha, cfg.guard_tol, cfg.include_endo_lagexo};
    std::vector<ValidityReport> reports(tier.size());

    auto evaluate = [&](std::size_t i) {
        LaggedDesign design = build_lagged_design(frame, tier[i]);
        switch (cfg.strategy) {
            case TestStrategy::multiple:
                reports[i] = check_multiple(design, vcfg);
                break;
            case TestStrategy::srivastava:
                reports[i] = check_srivastava(design, vcfg);
                break;
            case TestStrategy::score_only: {
                ValidityReport r;
                r.partition = tier[i];
                r.strategy = TestStrategy::score_only;
                r.n_endo = tier[i].n_endo();
                try {
                    r.score = score(design, fit_params(design));
                    r.valid = true;
                } catch (const DegenerateDesignError& e) {
                    r.untestable = true;
                    r.untestable_reason = e.what();
                }
                reports[i] = std::move(r);
                break;
            }
        }
    };

    const int jobs = std::min<int>(cfg.parallelism, static_cast<int>(tier.size()));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < tier.size(); ++i) evaluate(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(jobs));
        for (int w = 0; w < jobs; ++w)
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < tier.size(); i = next.fetch_add(1))
                    evaluate(i);
            });
        for (auto& t : workers) t.join();
    }
    return reports;
}

}  // namespace

SearchResult run_search(const TimeSeriesFrame& frame, const SearchConfig& cfg) {
    frame.validate();
    const int k = frame.cols();
    cfg.validate(k);
    const int max_states = cfg.resolved_max_states(k);

    SearchResult result;
    for (int s = 1; s <= max_states; ++s) {
        const auto tier = enumerate_tier(frame.names, s);
        auto reports = evaluate_tier(frame, tier, cfg);
        result.models_tested += static_cast<long>(tier.size());
        ++result.tiers_completed;

        if (cfg.strategy == TestStrategy::score_only) {
            for (auto& r : reports)
                if (!r.untestable) result.valid_models.push_back(std::move(r));
            continue;
        }

        std::vector<ValidityReport> valid;
        for (auto& r : reports)
            if (r.valid) valid.push_back(std::move(r));
        if (!valid.empty()) {
            // MSV: the first tier containing a valid model closes the search.
            result.valid_models = std::move(valid);
            result.stopped_early = s < max_states;
            break;
        }
    }

    if (cfg.strategy == TestStrategy::score_only) {
        std::vector<ScoredPartition> scored;
        scored.reserve(result.valid_models.size());
        for (const auto& r : result.valid_models) scored.push_back({r.partition, r.score});
        auto ranked = compare(std::move(scored), cfg.score_key);
        std::map<std::string, std::size_t> order;
        for (std::size_t i = 0; i < ranked.size(); ++i)
            order.emplace(ranked[i].partition.canonical_encoding(), i);
        std::stable_sort(result.valid_models.begin(), result.valid_models.end(),
                         [&](const ValidityReport& a, const ValidityReport& b) {
                             return order.at(a.partition.canonical_encoding()) <
                                    order.at(b.partition.canonical_encoding());
                         });
    } else {
        sort_by_preference(result.valid_models);
    }
    return result;
}

MonteCarloResult monte_carlo(const SearchConfig& cfg, const SimConfig& sim,
                             int reps, int n_small) {
    if (reps < 1) throw ConfigError("reps must be at least 1");

    MonteCarloResult out;
    out.models_per_rep = 0;
    const int k = sim.params.partition.n_vars();
    for (int s = 1; s <= cfg.resolved_max_states(k); ++s) out.models_per_rep += tier_size(k, s);

    std::map<std::string, TallyRow> tally;
    for (int rep = 0; rep < reps; ++rep) {
        SimConfig rep_sim = sim;
        rep_sim.n = n_small;
        rep_sim.seed = derive_seed(sim.seed, static_cast<std::uint64_t>(rep));
        try {
            TimeSeriesFrame frame = simulate(rep_sim);
            SearchResult res = run_search(frame, cfg);
            for (std::size_t i = 0; i < res.valid_models.size(); ++i) {
                const auto& report = res.valid_models[i];
                auto [it, inserted] = tally.try_emplace(report.partition.canonical_encoding());
                if (inserted) it->second.partition = report.partition;
                ++it->second.valid;
                if (i == 0) ++it->second.wins;
            }
            if (res.valid_models.empty()) ++out.reps_no_winner;
            ++out.reps_completed;
        } catch (const Error&) {
            ++out.reps_failed;
        }
    }

    for (auto& [enc, row] : tally) out.rows.push_back(std::move(row));
    std::sort(out.rows.begin(), out.rows.end(), [](const TallyRow& a, const TallyRow& b) {
        if (a.wins != b.wins) return a.wins > b.wins;
        if (a.valid != b.valid) return a.valid > b.valid;
        return a.partition.canonical_encoding() < b.partition.canonical_encoding();
    });
    return out;
}

}  // namespace sslearn
