#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "circlab/cli.hpp"

int main(int argc, char** argv)
{
    using namespace circlab::cli;

    CLI::App app{"circlab: random matrix spectra, anti-concentration and smoothed condition experiments"};
    app.require_subcommand(1);
    app.footer(columns_help);

    Command cmd;
    std::uint64_t seed = 0;
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    cmd.threads = hw;

    for (const auto& name : subcommands()) {
        auto* sub = app.add_subcommand(name);
        if (name != "verify") {
            sub->add_option("--config", cmd.config, "config file, or inline JSON starting with '{'");
            sub->add_option("--out", cmd.out_dir, "output directory")->capture_default_str();
            sub->add_option("--seed", seed, "override the config seed");
            sub->add_flag("--force", cmd.force, "overwrite existing output files");
            sub->add_option("--threads", cmd.threads, "worker threads (results do not depend on it)")
                ->check(CLI::PositiveNumber)
                ->capture_default_str();
        }
        sub->callback([&, name, sub] {
            cmd.subcommand = name;
            if (name != "verify" && sub->count("--seed") > 0) cmd.seed = seed;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : config_error;
    }
    return run(cmd, std::cout, std::cerr);
}
