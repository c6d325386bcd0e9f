#include "sslearn/validity.hpp"

#include "sslearn/model_core.hpp"

#include <algorithm>
#include <sstream>

namespace sslearn {

std::string LaggedVar::label() const {
    if (lag == 0) return name + "[t]";
    return name + "[t" + std::to_string(lag) + "]";
}

std::string strategy_name(TestStrategy s) {
    switch (s) {
        case TestStrategy::multiple: return "multiple";
        case TestStrategy::srivastava: return "srivastava";
        case TestStrategy::score_only: return "score-only";
    }
    return "?";
}

TestStrategy strategy_from_name(const std::string& s) {
    if (s == "multiple") return TestStrategy::multiple;
    if (s == "srivastava") return TestStrategy::srivastava;
    if (s == "score-only") return TestStrategy::score_only;
    throw ConfigError("unknown test strategy '" + s + "'");
}

double ValidityReport::p_min() const {
    double m = 1.0;
    for (const auto& t : tests) m = std::min(m, t.p_value);
    return m;
}

std::string ValidityReport::csv_row() const {
    std::ostringstream os;
    os << partition.canonical_encoding() << ',' << strategy_name(strategy) << ','
       << (valid ? 1 : 0) << ',' << p_min() << ',' << score.log_likelihood;
    return os.str();
}

std::vector<CiObligation> generate_obligations(const StatePartition& part,
                                               bool include_endo_lagexo) {
    // Time-t endogenous variables are the endogenous states plus the controls.
    std::vector<std::string> endo_t = part.endo_states;
    endo_t.insert(endo_t.end(), part.controls.begin(), part.controls.end());

    std::vector<LaggedVar> cond_states;  // [x_{t-1}, z_t]
    for (const auto& n : part.endo_states) cond_states.push_back({n, -1});
    for (const auto& n : part.exo_states) cond_states.push_back({n, 0});
    std::vector<LaggedVar> cond_lag_exo;  // z_{t-1}
    for (const auto& n : part.exo_states) cond_lag_exo.push_back({n, -1});

    std::vector<CiObligation> out;
    for (std::size_t i = 0; i < endo_t.size(); ++i)
        for (std::size_t j = i + 1; j < endo_t.size(); ++j)
            out.push_back({ObligationKind::endo_pair, {endo_t[i], 0}, {endo_t[j], 0}, cond_states});

    for (const auto& x : part.endo_states)
        for (const auto& z : part.exo_states)
            out.push_back({ObligationKind::lagstate_exo, {x, -1}, {z, 0}, cond_lag_exo});

    if (include_endo_lagexo)
        for (const auto& e : endo_t)
            for (const auto& z : part.exo_states)
                out.push_back({ObligationKind::endo_lagexo, {e, 0}, {z, -1}, cond_states});

    for (std::size_t i = 0; i < part.exo_states.size(); ++i)
        for (std::size_t j = i + 1; j < part.exo_states.size(); ++j)
            out.push_back({ObligationKind::exo_pair,
                           {part.exo_states[i], 0},
                           {part.exo_states[j], 0},
                           cond_lag_exo});
    return out;
}

long obligation_count(const StatePartition& part, bool include_endo_lagexo) {
    const long e = part.n_exo(), s = part.n_endo(), c = part.n_controls();
    long total = (s + c) * (s + c - 1) / 2 + s * e + e * (e - 1) / 2;
    if (include_endo_lagexo) total += (s + c) * e;
    return total;
}

namespace {

double column_variance(const Vector& v) {
    return (v.array() - v.mean()).matrix().squaredNorm() / static_cast<double>(v.size());
}

ValidityReport untestable_report(const StatePartition& part, TestStrategy strategy,
                                 const std::string& reason) {
    ValidityReport r;
    r.partition = part;
    r.strategy = strategy;
    r.valid = false;
    r.untestable = true;
    r.untestable_reason = reason;
    r.n_endo = part.n_endo();
    return r;
}

}  // namespace

ValidityReport check_multiple(const LaggedDesign& design, const ValidityConfig& cfg) {
    const StatePartition& part = design.partition;
    ValidityReport report;
    report.partition = part;
    report.strategy = TestStrategy::multiple;
    report.n_endo = part.n_endo();

    const auto obligations = generate_obligations(part, cfg.include_endo_lagexo);
    report.sig_level_used = obligations.empty() ? cfg.alpha
                                                : cfg.alpha / static_cast<double>(obligations.size());

    const int n_x = part.n_endo(), n_y = part.n_controls(), n_z = part.n_exo();
    const int t_eff = design.t_eff;

    try {
        // Obligation families share two conditioning sets, so residualize each
        // target group once; pairwise correlations of the residuals are then
        // exactly the partial correlations of the individual tests.
        Matrix cond_states(t_eff, n_x + n_z);  // [x_{t-1}, z_t]
        cond_states << design.x_m1, design.z_t;
        std::vector<std::string> cond_state_names;
        for (const auto& n : part.endo_states) cond_state_names.push_back(n + "[t-1]");
        for (const auto& n : part.exo_states) cond_state_names.push_back(n + "[t]");
        std::vector<std::string> cond_exo_names;
        for (const auto& n : part.exo_states) cond_exo_names.push_back(n + "[t-1]");

        // Targets residualized on [x_{t-1}, z_t]: time-t endogenous variables
        // and (for the optional family) z_{t-1}.
        Matrix endo_t(t_eff, n_x + n_y);
        endo_t << design.x_t, design.y_t;
        Matrix endo_resid = residualize(endo_t, cond_states, cond_state_names);
        Matrix lag_exo_resid = residualize(design.z_m1, cond_states, cond_state_names);

        // Targets residualized on z_{t-1}: x_{t-1} and z_t.
        Matrix xm1_resid = residualize(design.x_m1, design.z_m1, cond_exo_names);
        Matrix zt_resid = residualize(design.z_t, design.z_m1, cond_exo_names);

        auto raw_var = [&](const LaggedVar& v) -> double {
            // Column means are removed frame-wide, so any lag shares the
            // variable's variance up to edge rows; compute on the actual block.
            const std::vector<std::string>& exo = part.exo_states;
            const std::vector<std::string>& endo = part.endo_states;
            auto find_in = [&](const std::vector<std::string>& names, const Matrix& block) -> double {
                for (std::size_t i = 0; i < names.size(); ++i)
                    if (names[i] == v.name) return column_variance(block.col(static_cast<int>(i)));
                return -1.0;
            };
            double r;
            if (v.lag == 0) {
                if ((r = find_in(exo, design.z_t)) >= 0) return r;
                if ((r = find_in(endo, design.x_t)) >= 0) return r;
                if ((r = find_in(part.controls, design.y_t)) >= 0) return r;
            } else if (v.lag == -1) {
                if ((r = find_in(exo, design.z_m1)) >= 0) return r;
                if ((r = find_in(endo, design.x_m1)) >= 0) return r;
            }
            throw DataError("obligation references unknown variable '" + v.name + "'");
        };

        auto residual_for = [&](const CiObligation& ob, const LaggedVar& v) -> Vector {
            auto col_of = [&](const std::vector<std::string>& names, const std::string& name) {
                for (std::size_t i = 0; i < names.size(); ++i)
                    if (names[i] == name) return static_cast<int>(i);
                return -1;
            };
            switch (ob.kind) {
                case ObligationKind::endo_pair:
                case ObligationKind::endo_lagexo: {
                    if (v.lag == -1) return lag_exo_resid.col(col_of(part.exo_states, v.name));
                    int c = col_of(part.endo_states, v.name);
                    if (c >= 0) return endo_resid.col(c);
                    return endo_resid.col(n_x + col_of(part.controls, v.name));
                }
                case ObligationKind::lagstate_exo:
                    if (v.lag == -1) return xm1_resid.col(col_of(part.endo_states, v.name));
                    return zt_resid.col(col_of(part.exo_states, v.name));
                case ObligationKind::exo_pair:
                    return zt_resid.col(col_of(part.exo_states, v.name));
            }
            throw DataError("unreachable obligation kind");
        };

        for (const auto& ob : obligations) {
            const int n_cond = (ob.kind == ObligationKind::lagstate_exo ||
                                ob.kind == ObligationKind::exo_pair)
                                   ? n_z
                                   : n_x + n_z;
            PartialCorrTest t = partial_corr_from_residuals(
                residual_for(ob, ob.var_a), residual_for(ob, ob.var_b),
                raw_var(ob.var_a), raw_var(ob.var_b), n_cond, cfg.guard_tol,
                ob.var_a.label(), ob.var_b.label());
            report.tests.push_back({ob.var_a.label() + " _||_ " + ob.var_b.label(),
                                    t.p_value, t.guard_triggered});
        }

        report.valid = std::all_of(report.tests.begin(), report.tests.end(),
                                   [&](const TestRecord& t) { return t.p_value > report.sig_level_used; });
        report.score = score(design, fit_params(design));
    } catch (const DegenerateDesignError& e) {
        return untestable_report(part, TestStrategy::multiple, e.what());
    } catch (const DataError& e) {
        return untestable_report(part, TestStrategy::multiple, e.what());
    }
    return report;
}

ValidityReport check_srivastava(const LaggedDesign& design, const ValidityConfig& cfg) {
    const StatePartition& part = design.partition;
    ValidityReport report;
    report.partition = part;
    report.strategy = TestStrategy::srivastava;
    report.n_endo = part.n_endo();
    report.sig_level_used = cfg.alpha;

    const int n_x = part.n_endo(), n_y = part.n_controls(), n_z = part.n_exo();
    const int k = part.n_vars();
    if (k < 2) throw DataError("diagonality strategy needs at least 2 observables");

    try {
        // Rolled-back joint form: all of [y_{t-1}, x_{t-1}, z_t] must be
        // mutually independent given [x_{t-2}, z_{t-1}]. z_{t-2} stays out of
        // the tested vector.
        Matrix tested(design.t_eff, n_y + n_x + n_z);
        tested << design.y_m1, design.x_m1, design.z_t;
        Matrix conditioning(design.t_eff, n_x + n_z);
        conditioning << design.x_m2, design.z_m1;
        std::vector<std::string> cond_names;
        for (const auto& n : part.endo_states) cond_names.push_back(n + "[t-2]");
        for (const auto& n : part.exo_states) cond_names.push_back(n + "[t-1]");

        Matrix resid = residualize(tested, conditioning, cond_names);
        const int n_eff = design.t_eff - (n_x + n_z);
        SrivastavaStat stat = srivastava_test(resid, cfg.alpha, n_eff);
        report.tests.push_back({"T3", stat.p_value, false});
        report.valid = stat.p_value > cfg.alpha;
        report.score = score(design, fit_params(design));
    } catch (const DegenerateDesignError& e) {
        return untestable_report(part, TestStrategy::srivastava, e.what());
    } catch (const DataError& e) {
        return untestable_report(part, TestStrategy::srivastava, e.what());
    }
    return report;
}

}  // namespace sslearn
