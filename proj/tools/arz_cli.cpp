#include "arz/commands.hpp"
#include "arz/config.hpp"
#include "arz/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Two-segment ARZ freeway model with backstepping ramp-metering control"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<int> resolution;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> loop;
    std::optional<std::string> model;
    bool compare = false;

    app.add_option("--config", config_path, "JSON config file (defaults apply when omitted)")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--resolution", resolution, "grid cells per segment, also the kernel resolution")
        ->check(CLI::Range(16, 1 << 16));
    app.add_option("--seed", seed, "seed for the multi-start minimization");
    app.add_option("--loop", loop, "open or closed loop")->check(CLI::IsMember({"open", "closed"}));
    app.add_option("--model", model, "linear or nonlinear dynamics")->check(CLI::IsMember({"linear", "nonlinear"}));

    auto* steady = app.add_subcommand("steady", "steady states, characteristic data and the stability verdict");
    auto* kernels = app.add_subcommand("kernels", "solve the kernel equations and write kernel_seg{1,2}.csv");
    auto* simulate = app.add_subcommand("simulate", "run a simulation and write record, norms and summary files");
    simulate->add_flag("--compare", compare, "also run the opposite loop mode and compare decay rates");
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        arz::RunConfig cfg = config_path.empty() ? arz::default_run_config() : arz::load_config(config_path);
        if (out_dir) {
            cfg.out_dir = *out_dir;
        }
        if (resolution) {
            cfg.sim.N = *resolution;
            cfg.kernels.M = *resolution;
        }
        if (seed) {
            cfg.seed = *seed;
        }
        if (loop) {
            cfg.sim.loop = *loop == "open" ? arz::LoopMode::open : arz::LoopMode::closed;
        }
        if (model) {
            cfg.sim.model = *model == "linear" ? arz::ModelKind::linear : arz::ModelKind::nonlinear;
        }
        cfg.sim.validate();

        if (steady->parsed()) {
            return arz::cmd_steady(cfg, std::cout);
        }
        if (kernels->parsed()) {
            return arz::cmd_kernels(cfg, std::cout);
        }
        if (simulate->parsed()) {
            return arz::cmd_simulate(cfg, std::cout, compare);
        }
        if (verify->parsed()) {
            return arz::cmd_verify(cfg, std::cout);
        }
    } catch (const arz::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const arz::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
