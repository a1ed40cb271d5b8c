#include "daa/cli/config.hpp"
#include "daa/cli/run.hpp"

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include <iostream>

namespace {

struct Flags {
    std::string config;
    daa::cli::Overrides overrides;
};

void add_common(CLI::App* sub, Flags& flags) {
    sub->add_option("--config", flags.config, "YAML config, a .meta.yaml record or a result table to replay");
    sub->add_option("--out", flags.overrides.out, "output directory");
    sub->add_option("--threads", flags.overrides.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--phases", flags.overrides.phases, "number of disorder phases")->check(CLI::PositiveNumber);
    sub->add_option("--seed", flags.overrides.seed, "seed for random phases (grid.phases.mode=random)");
    sub->add_option("--set", flags.overrides.assignments, "override any field, e.g. --set model.n_sites=100");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Driven Aubry-Andre lattice: imbalance and Floquet IPR phase diagrams"};
    app.require_subcommand(1);
    Flags flags;
    const std::pair<const char*, const char*> commands[] = {
        {"static-imbalance", "time-averaged imbalance of the undriven lattice versus disorder"},
        {"freq-scan", "disorder x frequency scan at A = lambda"},
        {"amp-scan", "disorder x amplitude scan at fixed drive frequency"},
        {"spectrum", "eigenvalues of H0 versus disorder"},
        {"floquet-cell", "quasienergies, mode IPRs and imbalance trace for one parameter set"},
        {"ipr-scaling", "averaged IPR versus lattice size"},
    };
    for (const auto& [name, help] : commands) {
        add_common(app.add_subcommand(name, help), flags);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : daa::cli::kConfigError;
    }
    const std::string name = app.get_subcommands().front()->get_name();

    daa::cli::RunConfig config;
    daa::cli::Provenance provenance;
    try {
        YAML::Node doc;
        std::string source = "<defaults>";
        if (!flags.config.empty()) {
            doc = daa::cli::read_config_file(flags.config);
            source = flags.config;
        }
        config = daa::cli::resolve_config(doc, daa::cli::parse_experiment(name), flags.overrides, source, &provenance);
    } catch (const daa::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return daa::cli::kConfigError;
    }

    const auto outcome = daa::cli::run(config, provenance, std::cerr);
    for (const auto& f : outcome.files) std::cout << f.string() << "\n";
    if (!outcome.message.empty()) std::cerr << outcome.message << "\n";
    return outcome.exit_code;
}
