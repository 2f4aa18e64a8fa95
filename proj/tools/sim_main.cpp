#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swarmsim/engine.hpp"
#include "swarmsim/errors.hpp"
#include "swarmsim/svg_plot.hpp"
#include "swarmsim/trace_io.hpp"

namespace fs = std::filesystem;
using namespace swarmsim;

namespace {

std::string resolve_scenario_path(const std::string& arg) {
    if (fs::exists(arg)) return arg;
    if (const char* dir = std::getenv("SIM_SCENARIO_DIR")) {
        const fs::path alt = fs::path(dir) / arg;
        if (fs::exists(alt)) return alt.string();
    }
    return arg;
}

void apply_override(Scenario& s, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
        throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    auto num = [&] {
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
            return v;
        } catch (const std::exception&) {
            throw CLI::ValidationError("--set", "bad numeric value for " + key + ": '" + value +
                                                    "'");
        }
    };
    if (key == "seed") s.seed = static_cast<std::uint64_t>(num());
    else if (key == "max_steps") s.max_steps = static_cast<int>(num());
    else if (key == "channels") s.channels = static_cast<int>(num());
    else if (key == "cell_size_m") s.cell_size_m = num();
    else if (key == "emergency_theta") s.emergency_theta = num();
    else if (key == "area.width_m") s.area.width_m = num();
    else if (key == "area.height_m") s.area.height_m = num();
    else if (key == "weights.w_cov") s.weights.w_cov = num();
    else if (key == "weights.w_ovh") s.weights.w_ovh = num();
    else if (key == "weights.overhead_ref_m") s.weights.overhead_ref_m = num();
    else if (key == "weights.path_loss_exp") s.weights.path_loss_exp = num();
    else if (key == "weights.p_unreach") s.weights.p_unreach = num();
    else throw CLI::ValidationError("--set", "unknown key '" + key + "'");
}

Scenario load_with_overrides(const std::string& path, const std::vector<std::string>& sets) {
    Scenario s = load_scenario(resolve_scenario_path(path));
    for (const auto& kv : sets) apply_override(s, kv);
    validate_scenario(s);
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void refuse_overwrite(const fs::path& out_dir, bool force) {
    if (!force && fs::exists(out_dir / "manifest.txt")) {
        throw ParseError("out dir " + out_dir.string() +
                         " already holds a manifest; pass --force to overwrite");
    }
}

int require_algo(const std::string& name, Algo& out) {
    if (auto a = parse_algo(name)) {
        out = *a;
        return 0;
    }
    std::cerr << "unknown algo '" << name
              << "'; expected one of: best-response, log-linear, q-learning\n";
    return 2;
}

struct LearnerFlags {
    LearnerConfig config;
    void attach(CLI::App* cmd) {
        cmd->add_option("--temperature0", config.temperature0, "initial log-linear temperature")
            ->capture_default_str();
        cmd->add_option("--anneal-rate", config.anneal_rate, "temperature decay per iteration")
            ->capture_default_str();
        cmd->add_option("--epsilon0", config.epsilon0, "initial exploration rate")
            ->capture_default_str();
        cmd->add_option("--epsilon-decay", config.epsilon_decay, "exploration decay per iteration")
            ->capture_default_str();
        cmd->add_option("--alpha", config.alpha, "Q-learning rate")->capture_default_str();
        cmd->add_option("--gamma", config.gamma, "Q-learning discount")->capture_default_str();
        cmd->add_option("--window", config.conv_window, "convergence window length")
            ->capture_default_str();
        cmd->add_option("--conv-eps", config.conv_eps, "convergence tolerance")
            ->capture_default_str();
        cmd->add_flag_callback(
            "--no-moves", [this] { config.options.allow_moves = false; },
            "disable waypoint movement actions");
        cmd->add_flag_callback(
            "--no-new-coalition", [this] { config.options.allow_new_coalition = false; },
            "disable founding singleton coalitions");
        cmd->add_flag_callback(
            "--no-overlap", [this] { config.options.allow_overlap = false; },
            "disable secondary (overlapping) memberships");
    }
};

ManifestInfo manifest_base(const std::string& command, const std::string& scenario_path,
                           const Scenario& s, const LearnerConfig& config) {
    ManifestInfo info;
    info.command = command;
    info.scenario_name = fs::path(scenario_path).filename().string();
    info.scenario_hash = fnv1a(scenario_to_json_text(s));
    info.seed = s.seed;
    info.config = config;
    return info;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sim: coalition-based UAV swarm simulator"};
    app.require_subcommand(1);
    app.fallthrough();  // lets --set / --force appear after the subcommand

    std::vector<std::string> sets;
    bool force = false;
    app.add_option("--set", sets, "override a scenario key, e.g. --set weights.w_ovh=0.2")
        ->type_name("KEY=VALUE")
        ->take_all();
    app.add_flag("--force", force, "overwrite an existing out dir manifest");

    std::string scn_path, out_dir = "out", algo_name_arg = "best-response";
    std::string algos_arg = "best-response,q-learning";
    std::string plot_input, plot_kind_arg = "convergence", plot_out;
    int n_seeds_sweep = 10, n_seeds_cmp = 20;
    std::uint64_t seed_override = 0;

    CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
    validate->add_option("scenario", scn_path, "scenario file")->required();

    LearnerFlags run_flags;
    CLI::App* run_cmd = app.add_subcommand("run", "run one simulation");
    run_cmd->add_option("scenario", scn_path, "scenario file")->required();
    run_cmd->add_option("--algo", algo_name_arg, "best-response | log-linear | q-learning")
        ->capture_default_str();
    run_cmd->add_option("--seed", seed_override, "override the scenario seed");
    run_cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
    run_flags.attach(run_cmd);

    LearnerFlags sweep_flags;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run one algorithm across seeds");
    sweep_cmd->add_option("scenario", scn_path, "scenario file")->required();
    sweep_cmd->add_option("--algo", algo_name_arg, "best-response | log-linear | q-learning")
        ->capture_default_str();
    sweep_cmd->add_option("--seeds", n_seeds_sweep, "number of seeds")->capture_default_str();
    sweep_cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
    sweep_flags.attach(sweep_cmd);

    LearnerFlags cmp_flags;
    CLI::App* cmp_cmd = app.add_subcommand("compare", "compare algorithms across seeds");
    cmp_cmd->add_option("scenario", scn_path, "scenario file")->required();
    cmp_cmd->add_option("--algos", algos_arg, "comma-separated algorithm list")
        ->capture_default_str();
    cmp_cmd->add_option("--seeds", n_seeds_cmp, "number of seeds per algorithm")
        ->capture_default_str();
    cmp_cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
    cmp_flags.attach(cmp_cmd);

    CLI::App* plot_cmd = app.add_subcommand("plot", "render a trace file to SVG");
    plot_cmd->add_option("input", plot_input, "metrics/convergence CSV or final-state JSON")
        ->required();
    plot_cmd->add_option("--kind", plot_kind_arg, "convergence | layout | objective")
        ->capture_default_str();
    plot_cmd->add_option("--out", plot_out, "output SVG path (default: <kind>.svg beside input)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(validate)) {
            const Scenario s = load_with_overrides(scn_path, sets);
            const ImportanceGrid grid = importance_grid(s);
            std::cerr << "valid: " << s.uavs.size() << " uavs, " << grid.nx << "x" << grid.ny
                      << " grid, " << s.directives.size() << " directives\n";
            return 0;
        }

        if (app.got_subcommand(run_cmd)) {
            Algo algo;
            if (int rc = require_algo(algo_name_arg, algo)) return rc;
            Scenario s = load_with_overrides(scn_path, sets);
            if (run_cmd->count("--seed") > 0) s.seed = seed_override;
            LearnerConfig config = run_flags.config;
            config.algo = algo;

            const fs::path out(out_dir);
            refuse_overwrite(out, force);
            const Trace tr = run(s, config);

            ManifestInfo info = manifest_base("run", scn_path, s, config);
            info.algo = algo_name(algo);
            info.iterations_run = tr.iterations_run;
            if (tr.converged_at) info.converged_at = std::to_string(*tr.converged_at);
            info.files = {"metrics.csv", "events.csv", "final_state.json"};

            write_file_atomic(out / "metrics.csv", metrics_csv(tr.metrics));
            write_file_atomic(out / "events.csv", events_csv(tr.events));
            write_file_atomic(out / "final_state.json", final_state_json(tr.final, s));
            write_file_atomic(out / "manifest.txt", run_manifest(info));

            const double final_obj = tr.metrics.empty() ? 0.0 : tr.metrics.back().objective;
            std::cerr << "run: " << tr.iterations_run << " steps, converged_at="
                      << info.converged_at << ", final objective=" << final_obj << ", outputs in "
                      << out.string() << "\n";
            return 0;
        }

        if (app.got_subcommand(sweep_cmd)) {
            Algo algo;
            if (int rc = require_algo(algo_name_arg, algo)) return rc;
            const Scenario s = load_with_overrides(scn_path, sets);
            LearnerConfig config = sweep_flags.config;
            config.algo = algo;

            const fs::path out(out_dir);
            refuse_overwrite(out, force);
            const auto rows = run_comparison(s, {algo}, n_seeds_sweep, config);

            ManifestInfo info = manifest_base("sweep", scn_path, s, config);
            info.algo = algo_name(algo);
            info.iterations_run = static_cast<int>(rows.size());
            info.files = {"sweep.csv"};
            write_file_atomic(out / "sweep.csv", comparison_csv(rows));
            write_file_atomic(out / "manifest.txt", run_manifest(info));
            std::cerr << "sweep: " << rows.size() << " runs, outputs in " << out.string() << "\n";
            return 0;
        }

        if (app.got_subcommand(cmp_cmd)) {
            std::vector<Algo> algos;
            std::stringstream ss(algos_arg);
            std::string token;
            while (std::getline(ss, token, ',')) {
                Algo a;
                if (int rc = require_algo(token, a)) return rc;
                algos.push_back(a);
            }
            if (algos.empty()) {
                std::cerr << "compare: --algos list is empty\n";
                return 2;
            }
            const Scenario s = load_with_overrides(scn_path, sets);

            const fs::path out(out_dir);
            refuse_overwrite(out, force);

            // Per-iteration series for the convergence figure: one
            // representative run (the base seed) per algorithm.
            std::vector<std::pair<std::string, std::vector<double>>> series;
            for (Algo a : algos) {
                LearnerConfig config = cmp_flags.config;
                config.algo = a;
                const Trace tr = run(s, config);
                std::vector<double> obj;
                for (const auto& m : tr.metrics) obj.push_back(m.objective);
                series.emplace_back(algo_name(a), std::move(obj));
            }
            const auto rows = run_comparison(s, algos, n_seeds_cmp, cmp_flags.config);

            ManifestInfo info = manifest_base("compare", scn_path, s, cmp_flags.config);
            info.algo = algos_arg;
            info.iterations_run = static_cast<int>(rows.size());
            info.files = {"comparison.csv", "convergence.csv", "convergence.svg"};
            const std::string conv_csv = convergence_csv(series);
            write_file_atomic(out / "comparison.csv", comparison_csv(rows));
            write_file_atomic(out / "convergence.csv", conv_csv);
            write_file_atomic(out / "convergence.svg",
                              emit_plot(conv_csv, PlotKind::Convergence));
            write_file_atomic(out / "manifest.txt", run_manifest(info));

            for (const auto& sum : summarize_comparison(rows)) {
                std::cerr << "compare: " << sum.algo << " median converged_at="
                          << sum.median_converged_at << " (iqr " << sum.iqr_converged_at
                          << "), median final objective=" << sum.median_final_objective
                          << " (iqr " << sum.iqr_final_objective << ")\n";
            }
            return 0;
        }

        if (app.got_subcommand(plot_cmd)) {
            const auto kind = parse_plot_kind(plot_kind_arg);
            if (!kind) {
                std::cerr << "unknown plot kind '" << plot_kind_arg
                          << "'; expected one of: convergence, layout, objective\n";
                return 2;
            }
            const std::string svg = emit_plot(read_file(plot_input), *kind);
            fs::path out;
            if (!plot_out.empty()) {
                out = plot_out;
            } else {
                out = fs::path(plot_input).parent_path() /
                      (std::string(plot_kind_name(*kind)) + ".svg");
            }
            write_file_atomic(out, svg);
            std::cerr << "plot: wrote " << out.string() << "\n";
            return 0;
        }
    } catch (const ValidationError& e) {
        std::cerr << "invalid: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const PartitionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
