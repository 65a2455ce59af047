#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "coclab/driver.hpp"
#include "coclab/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cocycle-lab: random matrix product limit-theorem laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 1;
    std::string which = "be";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--threads", threads, "worker threads for trial loops");
    };

    CLI::App* estimate = app.add_subcommand("estimate", "Lyapunov/variance/regularity estimates");
    add_common(estimate);
    CLI::App* spectrum = app.add_subcommand("spectrum", "transfer-operator eigenvalue curves");
    add_common(spectrum);
    CLI::App* verify = app.add_subcommand("verify", "run a verification family");
    add_common(verify);
    verify->add_option("--which", which, "be|llt|llt-moderate|admissible|kernel");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return coclab::exit_config;
    }

    try {
        const coclab::experiment_config cfg = coclab::load_config(config_path);
        const coclab::run_options opts{out_dir, threads};
        if (estimate->parsed())
            return coclab::cmd_estimate(cfg, opts, std::cout);
        if (spectrum->parsed())
            return coclab::cmd_spectrum(cfg, opts, std::cout);
        return coclab::cmd_verify(cfg, which, opts, std::cout);
    } catch (const coclab::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return coclab::exit_config;
    } catch (const coclab::dimension_error& e) {
        std::cerr << "dimension error: " << e.what() << "\n";
        return coclab::exit_config;
    } catch (const coclab::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 65;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 70;
    }
}
