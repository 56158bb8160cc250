#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "colcva/config.hpp"
#include "colcva/output.hpp"
#include "colcva/sweep.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

int do_run(const std::string& config_path, std::int64_t seed_override,
           std::int64_t paths_override, const std::string& out_dir) {
    colcva::RunConfig cfg = colcva::load_config(config_path);
    if (seed_override >= 0) cfg.simulation.seed = static_cast<std::uint64_t>(seed_override);
    if (paths_override > 0) cfg.simulation.paths = static_cast<std::size_t>(paths_override);
    cfg.validate();

    std::filesystem::create_directories(out_dir);
    auto t0 = std::chrono::steady_clock::now();

    std::vector<double> intervals{cfg.margining.update_interval};
    colcva::ScenarioEngine engine(cfg.discount, cfg.hazard_i, cfg.hazard_c, cfg.g2,
                                  cfg.cir_i, cfg.cir_c, cfg.correlation, cfg.swap,
                                  cfg.base_step, intervals);
    colcva::SimulationSettings settings = cfg.simulation;
    settings.with_profiles = true;
    colcva::RecoveryParams rec =
        cfg.recovery.with_rehypothecation(cfg.margining.rehypothecation);
    auto result = engine.run(cfg.margining, rec, settings);
    auto report = colcva::estimate(result.outcomes, cfg.margining, rec);

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count();
    auto out = std::filesystem::path(out_dir);
    colcva::write_report((out / "report.json").string(), report, cfg.swap.notional);
    colcva::write_profiles((out / "profiles.csv").string(), *result.profiles);
    colcva::write_run_meta((out / "run_meta.json").string(), settings.seed,
                           settings.paths, result.grid.size(), wall);
    std::cout << "bccva_bp=" << colcva::fmt_num(colcva::to_bp(report.bccva.value,
                                                              cfg.swap.notional))
              << " se_bp=" << colcva::fmt_num(colcva::to_bp(report.bccva.se,
                                                            cfg.swap.notional))
              << "\n";
    return 0;
}

int do_grid(const std::string& config_path, const std::string& sweep_text,
            const std::string& rehyp, const std::string& out_dir) {
    colcva::RunConfig cfg = colcva::load_config(config_path);
    colcva::SweepSpec sweep = colcva::parse_sweep(sweep_text);
    bool on = rehyp == "both" || rehyp == "on";
    bool off = rehyp == "both" || rehyp == "off";
    if (!on && !off) throw colcva::ConfigError("--rehyp must be both|on|off");

    std::filesystem::create_directories(out_dir);
    auto rows = colcva::run_grid(cfg, sweep, on, off);
    auto out = std::filesystem::path(out_dir);
    colcva::write_grid((out / "grid.csv").string(), rows, cfg.swap.notional);
    std::cout << rows.size() << " rows written to " << (out / "grid.csv").string()
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bilateral collateralized CVA engine for interest-rate swaps"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", sweep_text, rehyp = "both";
    std::int64_t seed_override = -1, paths_override = 0;

    auto* run = app.add_subcommand("run", "Price one scenario");
    run->add_option("--config", config_path, "JSON config file")->required();
    run->add_option("--seed", seed_override, "Override the RNG seed");
    run->add_option("--paths", paths_override, "Override the path count");
    run->add_option("--out", out_dir, "Output directory");

    auto* grid = app.add_subcommand("grid", "Run a parameter sweep");
    grid->add_option("--config", config_path, "JSON config file")->required();
    grid->add_option("--sweep", sweep_text,
                     "<param>=<start>:<stop>:<step> or <param>=v1,v2,...")
        ->required();
    grid->add_option("--rehyp", rehyp, "both|on|off");
    grid->add_option("--out", out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return do_run(config_path, seed_override, paths_override, out_dir);
        }
        return do_grid(config_path, sweep_text, rehyp, out_dir);
    } catch (const colcva::NotPositiveSemiDefinite& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumericalError;
    } catch (const colcva::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const colcva::CurveError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
