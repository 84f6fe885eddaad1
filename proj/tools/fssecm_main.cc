#include "commands.h"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Dual-band FSS equivalent-circuit modeling and synthesis"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir = ".";
    fssecm::cli::run_options options;

    const std::pair<const char*, const char*> commands[] = {
        {"analyze", "Sweep one design; write response CSV, Touchstone and band report"},
        {"sweep", "Parametric sweep; write one band report row per value"},
        {"angular", "One response CSV per incidence angle and polarization"},
        {"synth", "Target bands to circuit values and unit-cell dimensions"},
        {"fit", "Fit circuit values to an imported response"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", config, "Job configuration (JSON)")->required();
        sub->add_option("-o,--out", out_dir, "Output directory");
        sub->add_option("--smooth-ghz", options.smooth_ghz,
                        "Moving-average window in GHz applied before reporting or fitting")
            ->check(CLI::NonNegativeNumber);
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();
    return fssecm::cli::run(command, config, out_dir, options, std::cerr);
}
