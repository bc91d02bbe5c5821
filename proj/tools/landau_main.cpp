// landau: command-line front end for the particle experiments.
//
//   landau simulate configs/sec5_maxwell.cfg
//   landau rate-n configs/rate_n.cfg --seed 7
//   landau lemmas
//
// Exit codes: 0 ok, 1 configuration error, 2 numeric failure, 3 property failure.

#include "landau/errors.hpp"
#include "landau/harness/config.hpp"
#include "landau/harness/experiments.hpp"

#include "CLI11.hpp"

#include <functional>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace landau;
using namespace landau::harness;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
};

RunConfig resolve(Options const &o)
{
    auto config = o.config_path.empty() ? parse_config("") : load_config(o.config_path);
    if (o.seed)
        override_entry(config, "run.seed", std::to_string(*o.seed));
    if (o.workers)
        override_entry(config, "run.workers", std::to_string(*o.workers));
    return config;
}

int run(std::function<CommandOutcome(RunConfig const &, std::ostream &)> const &cmd, Options const &o)
{
    try {
        auto const outcome = cmd(resolve(o), std::cout);
        std::cout << "wrote " << (outcome.dir / "manifest.json").string() << '\n';
        return outcome.exit_code;
    } catch (ConfigError const &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (DomainError const &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (NumericError const &e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (std::exception const &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Interacting-particle simulations of the homogeneous Landau equation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version_string());

    Options opts;
    std::function<CommandOutcome(RunConfig const &, std::ostream &)> chosen;

    auto add = [&](char const *name, char const *help, bool config_required, auto fn) {
        auto *sub = app.add_subcommand(name, help);
        auto *path = sub->add_option("config", opts.config_path, "Configuration file or manifest.json");
        if (config_required)
            path->required();
        path->check(CLI::ExistingFile);
        sub->add_option("--seed", opts.seed, "Override run.seed");
        sub->add_option("--workers", opts.workers, "Override run.workers")->check(CLI::PositiveNumber);
        sub->callback([&chosen, fn] { chosen = fn; });
    };
    add("simulate", "Run the particle system; write moments, ellipticity and histograms", true,
        [](RunConfig const &c, std::ostream &log) { return cmd_simulate(c, log); });
    add("rate-n", "Particle-number convergence against the exact reference process", true,
        [](RunConfig const &c, std::ostream &log) { return cmd_rate_n(c, log); });
    add("rate-N", "Time-step convergence by coupled refinement", true,
        [](RunConfig const &c, std::ostream &log) { return cmd_rate_N(c, log); });
    add("lemmas", "Randomized matrix square-root and Wasserstein property suites", false,
        [](RunConfig const &c, std::ostream &log) { return cmd_lemmas(c, log); });
    add("hist", "Histograms over a grid of kernel exponents and times", true,
        [](RunConfig const &c, std::ostream &log) { return cmd_hist(c, log); });

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const &e) {
        int const code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    return run(chosen, opts);
}
