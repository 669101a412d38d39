#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hetnet/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Analytical + Monte Carlo sweeps for decoupled hybrid cellular networks"};
    app.set_version_flag("--version", std::string(hetnet::tool_version()));
    app.require_subcommand(1);

    hetnet::RunOptions opts;
    std::optional<long long> mc_drops;
    std::optional<unsigned long long> seed;

    CLI::App* run = app.add_subcommand("run", "execute a sweep and write CSV + manifest");
    run->add_option("--config", opts.config_path, "network config file")->required();
    run->add_option("--sweep", opts.sweep_path, "sweep spec file")->required();
    run->add_option("--out", opts.out_dir, "output directory")->required();
    run->add_option("--mc-drops", mc_drops, "override Monte Carlo drop count (0 disables)")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--seed", seed, "override Monte Carlo master seed");
    run->add_option("--threads", opts.threads, "worker thread count (0 = runtime default)")
        ->check(CLI::NonNegativeNumber);

    std::string check_path;
    CLI::App* check = app.add_subcommand("check", "validate a config and print its summary");
    check->add_option("--config", check_path, "network config file")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (mc_drops) opts.mc_drops = static_cast<std::size_t>(*mc_drops);
        if (seed) opts.seed = static_cast<std::uint64_t>(*seed);
        return hetnet::run_sweep(opts, std::cout, std::cerr);
    }
    return hetnet::check_config(check_path, std::cout, std::cerr);
}
