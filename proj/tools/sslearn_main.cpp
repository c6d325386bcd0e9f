#include "sslearn/calibrate.hpp"
#include "sslearn/io.hpp"
#include "sslearn/irf.hpp"
#include "sslearn/model_core.hpp"
#include "sslearn/rng.hpp"
#include "sslearn/search.hpp"
#include "sslearn/simulator.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using nlohmann::json;
using namespace sslearn;

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success (winner found where applicable), 1 usage error,
// 2 data error, 3 search completed with no valid model.
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNoWinner = 3;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    json j;
    in >> j;
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << content;
}

/// Expands "--config file.json" into ordinary command-line tokens so a
/// manifest's config object can replay a run exactly.
std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] != "--config") continue;
        if (i + 1 >= args.size()) throw ConfigError("--config needs a file argument");
        json cfg = load_json_file(args[i + 1]);
        if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");
        std::vector<std::string> expanded;
        for (auto& [key, value] : cfg.items()) {
            if (value.is_boolean()) {
                if (value.get<bool>()) expanded.push_back("--" + key);
            } else {
                expanded.push_back("--" + key);
                expanded.push_back(value.is_string() ? value.get<std::string>()
                                                     : value.dump());
            }
        }
        args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
        args.insert(args.begin() + static_cast<long>(i), expanded.begin(), expanded.end());
        --i;
    }
    return args;
}

struct ManifestWriter {
    std::string command;
    json config = json::object();
    json inputs = json::object();
    std::uint64_t seed = 0;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void add_input(const std::string& path) { inputs[path] = sha256_file(path); }

    void write(const std::string& output_path) const {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json m{{"command", command},
               {"version", kVersion},
               {"config", config},
               {"inputs", inputs},
               {"seed", seed},
               {"duration_seconds", secs}};
        write_text_file(output_path + ".manifest.json", m.dump(2) + "\n");
    }
};

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ' ';
        out += names[i];
    }
    return out;
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw ConfigError("empty list argument");
    return out;
}

int default_jobs() {
    if (const char* env = std::getenv("SSLEARN_JOBS")) {
        const int j = std::atoi(env);
        if (j >= 1) return j;
    }
    return 1;
}

SimConfig resolve_sim_source(const std::string& preset_name, const std::string& params_path,
                             const std::string& sim_config_path, int n, std::uint64_t seed,
                             ManifestWriter& manifest) {
    SimConfig cfg;
    if (!sim_config_path.empty()) {
        manifest.add_input(sim_config_path);
        cfg = sim_config_from_json(load_json_file(sim_config_path));
        if (n > 0) cfg.n = n;
        cfg.seed = seed;
    } else if (!params_path.empty()) {
        manifest.add_input(params_path);
        cfg.params = params_from_json(load_json_file(params_path));
        cfg.n = n;
        cfg.seed = seed;
    } else if (!preset_name.empty()) {
        cfg = preset(preset_name, n, seed);
    } else {
        throw ConfigError("one of --preset, --params, or --sim-config is required");
    }
    return cfg;
}

int cmd_simulate(const std::string& preset_name, const std::string& params_path,
                 const std::string& sim_config_path, int n, std::uint64_t seed, int burn_in,
                 const std::string& out_path) {
    ManifestWriter manifest;
    manifest.command = "simulate";
    manifest.seed = seed;
    SimConfig cfg = resolve_sim_source(preset_name, params_path, sim_config_path, n, seed, manifest);
    if (burn_in >= 0) cfg.burn_in = burn_in;

    manifest.config = {{"preset", preset_name}, {"params", params_path},
                       {"sim-config", sim_config_path}, {"n", cfg.n},
                       {"seed", cfg.seed}, {"burn-in", cfg.burn_in}, {"out", out_path}};

    TimeSeriesFrame frame = simulate(cfg);
    write_frame_csv_file(out_path, frame);
    manifest.write(out_path);
    std::cout << "wrote " << frame.rows() << "x" << frame.cols() << " frame to " << out_path << "\n";
    return 0;
}

int cmd_detrend(const std::string& in_path, const std::string& out_path) {
    ManifestWriter manifest;
    manifest.command = "detrend";
    manifest.add_input(in_path);
    manifest.config = {{"in", in_path}, {"out", out_path}};

    TimeSeriesFrame frame = read_frame_csv_file(in_path);
    TimeSeriesFrame detrended = ar1_detrend(frame);
    write_frame_csv_file(out_path, detrended);
    manifest.write(out_path);
    std::cout << "wrote " << detrended.rows() << "x" << detrended.cols() << " frame to "
              << out_path << "\n";
    return 0;
}

std::string results_csv(const SearchResult& result, TestStrategy strategy) {
    std::ostringstream os;
    if (strategy == TestStrategy::score_only) {
        os << "index,exogenous_states,endogenous_states,log_likelihood,bic,aic\n";
        for (std::size_t i = 0; i < result.valid_models.size(); ++i) {
            const auto& r = result.valid_models[i];
            os << i << ',' << join_names(r.partition.exo_states) << ','
               << join_names(r.partition.endo_states) << ','
               << format_double(r.score.log_likelihood) << ',' << format_double(r.score.bic)
               << ',' << format_double(r.score.aic) << '\n';
        }
    } else {
        os << "index,exogenous_states,endogenous_states,log_likelihood\n";
        for (std::size_t i = 0; i < result.valid_models.size(); ++i) {
            const auto& r = result.valid_models[i];
            os << i << ',' << join_names(r.partition.exo_states) << ','
               << join_names(r.partition.endo_states) << ','
               << format_double(r.score.log_likelihood) << '\n';
        }
    }
    return os.str();
}

int cmd_learn(const std::string& in_path, double alpha, const std::string& test,
              const std::string& score_name, int max_states, double guard_tol,
              bool exclude_endo_lagexo, int jobs, const std::string& out_results,
              const std::string& out_winner) {
    ManifestWriter manifest;
    manifest.command = "learn";
    manifest.add_input(in_path);
    manifest.config = {{"in", in_path},         {"alpha", alpha},
                       {"test", test},          {"score", score_name},
                       {"max-states", max_states}, {"guard-tol", guard_tol},
                       {"exclude-endo-lagexo", exclude_endo_lagexo},
                       {"out-results", out_results}, {"out-winner", out_winner}};

    TimeSeriesFrame frame = read_frame_csv_file(in_path);
    SearchConfig cfg;
    cfg.alpha = alpha;
    cfg.strategy = strategy_from_name(test);
    cfg.score_key = score_name == "bic" ? ScoreKey::bic
                  : score_name == "aic" ? ScoreKey::aic
                                        : ScoreKey::loglik;
    cfg.max_states = max_states;
    cfg.guard_tol = guard_tol;
    cfg.include_endo_lagexo = !exclude_endo_lagexo;
    cfg.parallelism = jobs;

    SearchResult result = run_search(frame, cfg);
    write_text_file(out_results, results_csv(result, cfg.strategy));

    if (result.valid_models.empty()) {
        manifest.write(out_results);
        std::cout << "no valid model among " << result.models_tested << " candidates\n";
        return kExitNoWinner;
    }

    const auto& winner = result.valid_models.front();
    StateSpaceParams fitted = fit_params(frame, winner.partition);
    json winner_json{{"partition", partition_to_json(winner.partition)},
                     {"params", params_to_json(fitted)},
                     {"report", validity_report_to_json(winner)},
                     {"models_tested", result.models_tested},
                     {"tiers_completed", result.tiers_completed},
                     {"stopped_early", result.stopped_early},
                     {"n_valid", result.valid_models.size()}};
    write_text_file(out_winner, winner_json.dump(2) + "\n");
    manifest.write(out_results);
    std::cout << "winner: exo {" << join_names(winner.partition.exo_states) << "} endo {"
              << join_names(winner.partition.endo_states) << "} among " << result.models_tested
              << " candidates (" << result.valid_models.size() << " valid)\n";
    return 0;
}

int cmd_montecarlo(const std::string& preset_name, const std::string& params_path,
                   const std::string& sim_config_path, int reps, int n, std::uint64_t seed,
                   double alpha, const std::string& test, int jobs, const std::string& out_path) {
    ManifestWriter manifest;
    manifest.command = "montecarlo";
    manifest.seed = seed;
    SimConfig sim = resolve_sim_source(preset_name, params_path, sim_config_path, n, seed, manifest);
    manifest.config = {{"preset", preset_name}, {"params", params_path},
                       {"sim-config", sim_config_path}, {"reps", reps}, {"n", n},
                       {"seed", seed}, {"alpha", alpha}, {"test", test}, {"out", out_path}};

    SearchConfig cfg;
    cfg.alpha = alpha;
    cfg.strategy = strategy_from_name(test);
    cfg.parallelism = jobs;

    MonteCarloResult mc = monte_carlo(cfg, sim, reps, n);
    std::ostringstream os;
    os << "index,exogenous_states,endogenous_states,wins,valid\n";
    for (std::size_t i = 0; i < mc.rows.size(); ++i) {
        const auto& row = mc.rows[i];
        os << i << ',' << join_names(row.partition.exo_states) << ','
           << join_names(row.partition.endo_states) << ',' << row.wins << ',' << row.valid << '\n';
    }
    write_text_file(out_path, os.str());
    manifest.write(out_path);
    std::cout << mc.reps_completed << " replications (" << mc.reps_no_winner << " without winner, "
              << mc.reps_failed << " failed), " << mc.rows.size() << " ever-valid partitions\n";
    return 0;
}

int cmd_calibrate(const std::string& alphas, const std::string& ns, const std::string& ps,
                  const std::string& correlations, int reps, std::uint64_t seed,
                  const std::string& out_path) {
    ManifestWriter manifest;
    manifest.command = "calibrate";
    manifest.seed = seed;
    manifest.config = {{"alpha", alphas}, {"n", ns}, {"p", ps}, {"correlation", correlations},
                       {"reps", reps}, {"seed", seed}, {"out", out_path}};

    std::ostringstream os;
    os << "rejection_rate,alpha,n,correlation,m,repetitions\n";
    std::uint64_t cell_index = 0;
    for (double alpha : parse_list(alphas))
        for (double n : parse_list(ns))
            for (double p : parse_list(ps))
                for (double rho : parse_list(correlations)) {
                    CalibrationCell cell;
                    cell.alpha = alpha;
                    cell.n = static_cast<int>(n);
                    cell.p = static_cast<int>(p);
                    cell.correlation = rho;
                    cell.repetitions = reps;
                    cell = calibrate_cell(cell, derive_seed(seed, cell_index++));
                    os << format_double(cell.rejection_rate) << ',' << format_double(cell.alpha)
                       << ',' << cell.n << ',' << format_double(cell.correlation) << ','
                       << cell.p << ',' << cell.repetitions << '\n';
                }
    write_text_file(out_path, os.str());
    manifest.write(out_path);
    return 0;
}

std::string irf_csv(const IrfPath& path) {
    std::ostringstream os;
    os << "period,variable,response\n";
    for (int h = 0; h < path.responses.rows(); ++h)
        for (std::size_t j = 0; j < path.names.size(); ++j)
            os << h << ',' << path.names[j] << ','
               << format_double(path.responses(h, static_cast<int>(j))) << '\n';
    return os.str();
}

int cmd_irf(const std::string& model_path, const std::string& in_path, bool var1,
            const std::string& shocked, double magnitude, int horizon,
            const std::string& out_path) {
    ManifestWriter manifest;
    manifest.command = "irf";
    manifest.config = {{"model", model_path}, {"in", in_path}, {"var1", var1},
                       {"shock", shocked}, {"magnitude", magnitude}, {"horizon", horizon},
                       {"out", out_path}};

    IrfPath path;
    if (var1) {
        if (in_path.empty()) throw ConfigError("--var1 needs a data CSV via --in");
        manifest.add_input(in_path);
        TimeSeriesFrame frame = read_frame_csv_file(in_path);
        Var1Fit fit = fit_var1(frame);
        Vector shock = Vector::Zero(frame.cols());
        shock[frame.index_of(shocked)] = magnitude;
        path = irf_var1(fit, shock, horizon);
    } else {
        if (model_path.empty()) throw ConfigError("either --model or --var1 with --in is required");
        manifest.add_input(model_path);
        IrfRequest req;
        req.model = params_from_json(load_json_file(model_path).contains("params")
                                         ? load_json_file(model_path).at("params")
                                         : load_json_file(model_path));
        req.shocked = shocked;
        req.magnitude = magnitude;
        req.horizon = horizon;
        path = irf_statespace(req);
    }
    write_text_file(out_path, irf_csv(path));
    manifest.write(out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"State-space structure learning for linear Gaussian macro models"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // simulate
    std::string preset_name, params_path, sim_config_path, out_path;
    int n = 1000, burn_in = -1;
    std::uint64_t seed = 1;
    auto* sim = app.add_subcommand("simulate", "Draw a sample from a preset or a params file");
    sim->add_option("--preset", preset_name, "small-rbc-like or medium-nk-like");
    sim->add_option("--params", params_path, "StateSpaceParams JSON file");
    sim->add_option("--sim-config", sim_config_path, "SimConfig JSON file");
    sim->add_option("--n", n, "sample size");
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--burn-in", burn_in, "burn-in rows (default 1000)");
    sim->add_option("--out", out_path, "output CSV")->required();

    // detrend
    std::string in_path;
    auto* det = app.add_subcommand("detrend", "AR(1)-detrend and demean every column");
    det->add_option("--in", in_path, "input CSV")->required();
    det->add_option("--out", out_path, "output CSV")->required();

    // learn
    double alpha = 0.05, guard_tol = 1e-10, magnitude = 1.0;
    std::string test = "multiple", score_name = "loglik", out_results = "results.csv";
    std::string out_winner = "winner.json";
    int max_states = -1, jobs = default_jobs(), horizon = 40, reps = 200;
    bool exclude_endo_lagexo = false, var1 = false;
    auto* learn = app.add_subcommand("learn", "Exhaustive state-space structure search");
    learn->add_option("--in", in_path, "input CSV")->required();
    learn->add_option("--alpha", alpha, "significance level");
    learn->add_option("--test", test, "multiple | srivastava | score-only");
    learn->add_option("--score", score_name, "loglik | bic | aic (score-only mode)");
    learn->add_option("--max-states", max_states, "tier cap (default k - 2)");
    learn->add_option("--guard-tol", guard_tol, "relative near-zero-residual guard");
    learn->add_flag("--exclude-endo-lagexo", exclude_endo_lagexo,
                    "drop the optional lagged-exogenous obligations from the multiple strategy");
    learn->add_option("--jobs", jobs, "worker threads (default $SSLEARN_JOBS or 1)");
    learn->add_option("--out-results", out_results, "ranked results CSV");
    learn->add_option("--out-winner", out_winner, "winner model JSON");

    // montecarlo
    auto* mc = app.add_subcommand("montecarlo", "Repeated simulate + learn tally");
    mc->add_option("--preset", preset_name, "small-rbc-like or medium-nk-like");
    mc->add_option("--params", params_path, "StateSpaceParams JSON file");
    mc->add_option("--sim-config", sim_config_path, "SimConfig JSON file");
    mc->add_option("--reps", reps, "replications")->required();
    mc->add_option("--n", n, "sample size per replication")->required();
    mc->add_option("--seed", seed, "master seed");
    mc->add_option("--alpha", alpha, "significance level");
    mc->add_option("--test", test, "multiple | srivastava");
    mc->add_option("--jobs", jobs, "worker threads");
    mc->add_option("--out", out_path, "tally CSV")->required();

    // calibrate
    std::string alphas = "0.05", ns = "500", ps = "5", correlations = "0";
    auto* cal = app.add_subcommand("calibrate", "Size/power grid for the diagonality test");
    cal->add_option("--alpha", alphas, "comma-separated levels");
    cal->add_option("--n", ns, "comma-separated sample sizes");
    cal->add_option("--p", ps, "comma-separated dimensions");
    cal->add_option("--correlation", correlations, "comma-separated off-diagonal values");
    cal->add_option("--reps", reps, "repetitions per cell");
    cal->add_option("--seed", seed, "master seed");
    cal->add_option("--out", out_path, "grid CSV")->required();

    // irf
    std::string model_path, shocked;
    auto* irf = app.add_subcommand("irf", "Impulse responses of a model or a VAR(1) baseline");
    irf->add_option("--model", model_path, "model JSON (winner file or bare params)");
    irf->add_option("--in", in_path, "data CSV for --var1");
    irf->add_flag("--var1", var1, "fit and shock an unconditional VAR(1) instead");
    irf->add_option("--shock", shocked, "shocked variable")->required();
    irf->add_option("--magnitude", magnitude, "shock size in sd units (VAR: raw units)");
    irf->add_option("--horizon", horizon, "periods after impact");
    irf->add_option("--out", out_path, "long-format CSV")->required();

    try {
        auto args = expand_config_args(argc, argv);
        std::vector<const char*> cargs{argv[0]};
        for (const auto& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());

        if (sim->parsed())
            return cmd_simulate(preset_name, params_path, sim_config_path, n, seed, burn_in, out_path);
        if (det->parsed()) return cmd_detrend(in_path, out_path);
        if (learn->parsed())
            return cmd_learn(in_path, alpha, test, score_name, max_states, guard_tol,
                             exclude_endo_lagexo, jobs, out_results, out_winner);
        if (mc->parsed())
            return cmd_montecarlo(preset_name, params_path, sim_config_path, reps, n, seed, alpha,
                                  test, jobs, out_path);
        if (cal->parsed())
            return cmd_calibrate(alphas, ns, ps, correlations, reps, seed, out_path);
        if (irf->parsed())
            return cmd_irf(model_path, in_path, var1, shocked, magnitude, horizon, out_path);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
