// sparse_afe: Monte Carlo learning-curve benchmark for sparse channel estimation.
//
//   sparse_afe run --config <path> --out <dir> [--seed N] [--trials N] [--no-plot] [--linear]
//   sparse_afe presets --sparsity {1|4}
//   sparse_afe plot --csv <path> --out <file>
//
// Exit codes: 0 success, 2 usage/config error, 3 I/O error, 4 one or more algorithms diverged.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <sparse_afe/sparse_afe.hpp>

namespace {

namespace fs = std::filesystem;
using namespace sparse_afe;

enum ExitCode : int { kOk = 0, kUsage = 2, kIo = 3, kDiverged = 4 };

std::size_t threads_from_env() {
    const char* v = std::getenv("SPARSE_AFE_THREADS");
    if (v == nullptr || *v == '\0') {
        return 0;
    }
    try {
        return static_cast<std::size_t>(std::stoul(v));
    } catch (const std::exception&) {
        throw ConfigError("SPARSE_AFE_THREADS", "expected a non-negative integer");
    }
}

struct RunArgs {
    std::string                  config_path;
    std::string                  out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t>   trials;
    bool                         no_plot{false};
    bool                         linear{false};
};

int cmd_run(const RunArgs& a) {
    if (!fs::exists(a.config_path)) {
        throw ConfigError("--config", "file '" + a.config_path + "' does not exist");
    }
    ExperimentConfig config = parse_config(read_text_file(a.config_path));
    if (a.seed) {
        config.master_seed = *a.seed;
    }
    if (a.trials) {
        config.trials = *a.trials;
    }
    validate(config);

    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + a.out_dir + "': " + ec.message());
    }

    const ExperimentResult result = run_experiment(config, {.threads = threads_from_env()});
    const fs::path         out(a.out_dir);
    emit_csv(result, out / "curves.csv", {.linear = a.linear});
    emit_summary(result, out / "summary.json");
    write_text_file(out / "config.json", serialize_config(config).dump(2) + "\n");
    if (!a.no_plot) {
        emit_plot(result, out / "learning_curves.svg");
    }

    for (const auto& e : result.entries) {
        if (e.aborted()) {
            std::cerr << "warning: " << e.diagnostic << " (" << e.diverged_trials << " of " << config.trials
                      << " trials)\n";
        } else {
            std::cout << e.label << ": steady-state " << format_number(e.steady_state_db) << " dB, converged at k="
                      << e.convergence_iteration;
            if (e.post_change_convergence_iteration) {
                std::cout << ", re-converged " << *e.post_change_convergence_iteration << " after the change";
            }
            std::cout << '\n';
        }
    }
    return result.any_diverged() ? kDiverged : kOk;
}

int cmd_presets(std::size_t sparsity) {
    std::cout << to_json(table_presets(sparsity)).dump(2) << '\n';
    return kOk;
}

int cmd_plot(const std::string& csv_path, const std::string& out_path) {
    const CurveTable table = parse_curves_csv(read_text_file(csv_path));
    const std::string svg  = render_svg(table, fs::path(csv_path).stem().string());
    write_text_file(out_path, svg);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse channel estimation benchmark: LMS, ZA-LMS, NLMS and LMMN learning curves"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto*   run = app.add_subcommand("run", "Run a Monte Carlo experiment from a config file");
    run->add_option("--config", run_args.config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", run_args.out_dir, "Output directory (created if absent)")->required();
    run->add_option("--seed", run_args.seed, "Override master_seed");
    run->add_option("--trials", run_args.trials, "Override trial count")->check(CLI::PositiveNumber);
    run->add_flag("--no-plot", run_args.no_plot, "Skip the SVG figure");
    run->add_flag("--linear", run_args.linear, "Write linear MSD columns instead of dB");

    std::size_t sparsity = 0;
    auto*       presets  = app.add_subcommand("presets", "Print the built-in parameter tables as a JSON roster");
    presets->add_option("--sparsity", sparsity, "Sparsity level")->required()->check(CLI::IsMember({1, 4}));

    std::string csv_path, plot_out;
    auto*       plot = app.add_subcommand("plot", "Render a curves CSV as an SVG figure");
    plot->add_option("--csv", csv_path, "Curves CSV written by `run`")->required()->check(CLI::ExistingFile);
    plot->add_option("--out", plot_out, "Output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (run->parsed()) {
            return cmd_run(run_args);
        }
        if (presets->parsed()) {
            return cmd_presets(sparsity);
        }
        return cmd_plot(csv_path, plot_out);
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    }
}
