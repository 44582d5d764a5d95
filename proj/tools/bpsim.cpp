// bpsim: double-slit biphoton simulation lab.
//
// Subcommands compose the library end to end: `analytic` tabulates the
// two-qubit model, `simulate` produces the noiseless detector JPD and its
// fringe profiles, `frames` synthesizes a photon-counting stack, `estimate`
// recovers JPD and profiles from a stack, `fit` extracts a visibility, and
// `sweep` runs the full waist scan that traces the complementarity circle
// and the coherence-loss curve.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "biphoton/config.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/experiments.hpp"
#include "biphoton/io.hpp"
#include "biphoton/version.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<uint64_t> seed_override;
    bool verbose = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
    auto* opt = cmd->add_option("--config", args.config_path, "configuration file");
    if (config_required) opt->required();
    cmd->add_option("--out", args.out_dir, "output directory (default: config output.directory)");
    cmd->add_option("--seed", args.seed_override, "override acquisition.seed");
    cmd->add_flag("--verbose", args.verbose, "chatty progress output");
}

biphoton::ExperimentConfig load(const CommonArgs& args) {
    biphoton::ExperimentConfig cfg = args.config_path.empty()
                                         ? biphoton::ExperimentConfig{}
                                         : biphoton::load_config_file(args.config_path);
    if (args.seed_override) cfg.acquisition.rng_seed = *args.seed_override;
    if (!args.out_dir.empty()) cfg.output.directory = args.out_dir;
    cfg.validate();
    return cfg;
}

void note(const CommonArgs& args, const std::string& message) {
    if (args.verbose) std::cerr << message << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(biphoton::kToolName) + " " + biphoton::kToolVersion +
                 " - spatially entangled photon pairs through a double slit"};
    app.require_subcommand(1);

    CommonArgs analytic_args, simulate_args, frames_args, estimate_args, fit_args, sweep_args;
    std::string stack_path, profile_path;

    auto* cmd_analytic = app.add_subcommand("analytic", "two-qubit visibility tables and G2 maps");
    add_common(cmd_analytic, analytic_args, false);

    auto* cmd_simulate = app.add_subcommand("simulate", "noiseless JPD and fringe profiles");
    add_common(cmd_simulate, simulate_args, false);

    auto* cmd_frames = app.add_subcommand("frames", "synthesize a photon-counting frame stack");
    add_common(cmd_frames, frames_args, false);

    auto* cmd_estimate = app.add_subcommand("estimate", "estimate JPD and profiles from a stack");
    cmd_estimate->add_option("--stack", stack_path, "BPFS frame stack")->required();
    add_common(cmd_estimate, estimate_args, false);

    auto* cmd_fit = app.add_subcommand("fit", "fit the fringe model to a profile CSV");
    cmd_fit->add_option("--profile", profile_path, "profile CSV")->required();
    add_common(cmd_fit, fit_args, false);

    auto* cmd_sweep = app.add_subcommand("sweep", "waist sweep: visibilities vs birth zone number");
    add_common(cmd_sweep, sweep_args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_analytic->parsed()) {
            const auto cfg = load(analytic_args);
            biphoton::run_analytic(cfg, cfg.output.directory);
            note(analytic_args, "analytic tables written to " + cfg.output.directory);
        } else if (cmd_simulate->parsed()) {
            const auto cfg = load(simulate_args);
            const auto point = biphoton::run_simulate(cfg, cfg.output.directory);
            std::cout << "N = " << point.birth_zone_n << ", K = " << point.schmidt_k
                      << ", bridge theta = " << point.bridge.theta << "\n";
        } else if (cmd_frames->parsed()) {
            const auto cfg = load(frames_args);
            const std::string path = biphoton::run_frames(cfg, cfg.output.directory);
            std::cout << path << "\n";
        } else if (cmd_estimate->parsed()) {
            const auto cfg = load(estimate_args);
            biphoton::run_estimate(stack_path, cfg.output.directory, cfg);
            note(estimate_args, "estimates written to " + cfg.output.directory);
        } else if (cmd_fit->parsed()) {
            const auto cfg = load(fit_args);
            const auto fit = biphoton::run_fit(profile_path, cfg, cfg.output.directory);
            std::cout << "V = " << fit.params.visibility << " +/- " << fit.sigma_visibility()
                      << (fit.converged ? "" : "  (NOT CONVERGED)") << "\n";
        } else if (cmd_sweep->parsed()) {
            const auto cfg = load(sweep_args);
            const auto records = biphoton::run_sweep(cfg, cfg.output.directory);
            for (const auto& r : records)
                std::cout << "N = " << r.birth_zone_n << "  V_m = " << r.v_m
                          << "  V_12 = " << r.v_12 << "  regime " << r.regime << "\n";
        }
    } catch (const biphoton::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const biphoton::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const biphoton::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
