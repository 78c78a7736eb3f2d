#include <CLI11.hpp>

#include <iostream>

#include "config.hpp"
#include "enclosure/errors.hpp"
#include "experiment.hpp"
#include "suites.hpp"

int main(int argc, char** argv) {
    using namespace enclosure;
    CLI::App app{"enclosure: convex-hull reconstruction from boundary flux data"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string out;
    unsigned threads = 0;
    std::uint64_t seed = 0;
    app.add_option("--out", out, "output directory (overrides the config)");
    app.add_option("--threads", threads, "worker threads, 0 for all cores");
    auto* seed_opt = app.add_option("--seed", seed, "noise and sampling seed");

    auto* run = app.add_subcommand("run", "forward solve, sweep and hull from a config file");
    std::string config_path;
    run->add_option("config", config_path, "config file")->required();

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    std::string suite;
    bool verbose = false;
    verify->add_option("suite", suite, "suite name or 'all'")->required();
    verify->add_flag("--verbose", verbose, "print per-direction values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            cli::RunSettings settings;
            settings.out = out;
            settings.threads = threads;
            if (*seed_opt) settings.seed = seed;
            return cli::run_experiment(cli::load_config(config_path), settings, std::cerr);
        }
        cli::SuiteSettings settings;
        settings.threads = threads;
        if (*seed_opt) settings.seed = seed;
        if (verbose) settings.detail = &std::cout;
        bool all = true;
        for (const cli::Criterion& c : cli::run_suite(suite, settings)) {
            cli::print_criterion(std::cout, c);
            all = all && c.pass;
        }
        return all ? 0 : 2;
    } catch (const ParseError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
