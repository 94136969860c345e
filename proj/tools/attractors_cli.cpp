// attractors run <config> [--workers N] [--seed S] [--out DIR]

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "attractors/config.hpp"
#include "attractors/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Attractors, basin fractions and their continuation"};
    app.set_version_flag("--version", attractors::kToolVersion);
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "execute a run described by a JSON config");
    std::string path;
    std::optional<std::size_t> workers;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    run->add_option("config", path, "run config (JSON)")->required();
    run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "sampling seed");
    run->add_option("--out", out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    attractors::RunConfig config;
    try {
        std::ifstream f(path);
        if (!f) {
            std::cerr << "config error: cannot read " << path << '\n';
            return 1;
        }
        std::stringstream text;
        text << f.rdbuf();
        config = attractors::parse_config(text.str());
    } catch (const attractors::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }
    if (workers)
        config.workers = *workers;
    if (seed)
        config.seed = *seed;
    if (out)
        config.output = *out;
    return attractors::run(config, std::cerr);
}
