#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "dtnjordan/config.hpp"
#include "dtnjordan/errors.hpp"
#include "dtnjordan/report.hpp"
#include "dtnjordan/runner.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir = "out";
    double tol_chain = -1.0;
    double tol_resolvent = -1.0;
    double tol_consistency = -1.0;
    double tol_theorem = -1.0;
    double tol_rank = -1.0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("config", opts.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--tol-chain", opts.tol_chain, "chain residual tolerance override");
    cmd->add_option("--tol-resolvent", opts.tol_resolvent, "resolvent margin override");
    cmd->add_option("--tol-consistency", opts.tol_consistency,
                    "interior consistency tolerance override");
    cmd->add_option("--tol-theorem", opts.tol_theorem, "verification tolerance override");
    cmd->add_option("--tol-rank", opts.tol_rank, "relative rank tolerance override");
}

dtnjordan::ExperimentConfig load_with_overrides(const CommonOptions& opts) {
    dtnjordan::ExperimentConfig cfg = dtnjordan::load_config(opts.config_path);
    if (opts.tol_chain > 0.0)
        cfg.tolerances.chain = opts.tol_chain;
    if (opts.tol_resolvent > 0.0)
        cfg.tolerances.resolvent = opts.tol_resolvent;
    if (opts.tol_consistency > 0.0)
        cfg.tolerances.consistency = opts.tol_consistency;
    if (opts.tol_theorem > 0.0)
        cfg.tolerances.theorem = opts.tol_theorem;
    if (opts.tol_rank > 0.0)
        cfg.tolerances.rank = opts.tol_rank;
    return cfg;
}

int emit_run(const dtnjordan::ExperimentConfig& cfg, const std::string& out_dir,
             const std::vector<std::string>& only) {
    const dtnjordan::RunOutcome outcome = dtnjordan::run_experiment(cfg, only);
    dtnjordan::write_report_bundle(outcome.bundle, out_dir);
    std::cout << dtnjordan::summary_text(outcome.bundle);
    std::cout << "report bundle written to " << out_dir << "\n";
    return outcome.passed ? 0 : 1;
}

void write_text(const std::string& dir, const std::string& file, const std::string& text) {
    std::filesystem::create_directories(dir);
    std::ofstream os(std::filesystem::path(dir) / file);
    os << text;
}

} // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("DTNJORDAN_THREADS"))
        Eigen::setNbThreads(std::max(1, std::atoi(threads)));

    CLI::App app{"Dirichlet-to-Neumann boundary pencils, Jordan/Keldysh chains and "
                 "verification reports"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    CLI::App* run_cmd = app.add_subcommand("run", "run every enabled check of a config");
    add_common(run_cmd, run_opts);

    CommonOptions check_opts;
    std::vector<std::string> only;
    CLI::App* check_cmd = app.add_subcommand("check", "run a subset of checks by name");
    add_common(check_cmd, check_opts);
    check_cmd->add_option("--only", only, "check names to run")->required();

    CommonOptions sweep_opts;
    std::string grid_text;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "tabulate D(lambda) over a lambda grid (CSV)");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--grid", grid_text, "grid spec re0:re1:count[:im]")->required();

    CommonOptions spectrum_opts;
    CLI::App* spectrum_cmd =
        app.add_subcommand("spectrum", "tabulate the Dirichlet and Robin spectra (CSV)");
    add_common(spectrum_cmd, spectrum_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return emit_run(load_with_overrides(run_opts), run_opts.out_dir, {});
        if (check_cmd->parsed()) {
            for (const auto& name : only) {
                const auto& known = dtnjordan::known_check_names();
                if (std::find(known.begin(), known.end(), name) == known.end())
                    throw dtnjordan::ConfigError("unknown check name: " + name);
            }
            return emit_run(load_with_overrides(check_opts), check_opts.out_dir, only);
        }
        if (sweep_cmd->parsed()) {
            const auto cfg = load_with_overrides(sweep_opts);
            const auto grid = dtnjordan::parse_grid_spec(grid_text);
            write_text(sweep_opts.out_dir, "sweep.csv", dtnjordan::sweep_dtn_csv(cfg, grid));
            std::cout << "sweep table written to " << sweep_opts.out_dir << "/sweep.csv\n";
            return 0;
        }
        if (spectrum_cmd->parsed()) {
            const auto cfg = load_with_overrides(spectrum_opts);
            write_text(spectrum_opts.out_dir, "spectrum.csv", dtnjordan::spectrum_csv(cfg));
            std::cout << "spectrum table written to " << spectrum_opts.out_dir
                      << "/spectrum.csv\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
