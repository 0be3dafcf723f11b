#include <iostream>

#include "CLI11.hpp"

#include "commands.hpp"

using namespace bianchi;
using namespace bianchi::cli;

int main(int argc, char** argv)
{
    CLI::App app{"Confocal quadric transforms: identity sweeps, leaf transport, balance demo"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    double tol_scale = 1.0;
    int n = 1000;

    auto common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config_path, "JSON run configuration");
        if (needs_config)
            opt->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides $" + std::string(kOutDirEnv) + ")");
        sub->add_option("--tol-scale", tol_scale, "multiply the declared tolerances")->check(CLI::NonNegativeNumber);
    };
    CLI::App* ident = app.add_subcommand("identities", "randomized identity sweeps and flatness convergence");
    common(ident, true);
    CLI::Option* seed_opt = ident->add_option("--seed", seed, "override sweep.rng_seed");
    CLI::App* trans = app.add_subcommand("transform", "transport a leaf and verify it");
    common(trans, true);
    CLI::App* arch = app.add_subcommand("archimedes", "balance-and-slicing quadrature of the parabola");
    common(arch, false);
    arch->add_option("--n", n, "number of slices");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    Overrides o;
    if (!out_dir.empty())
        o.out_dir = out_dir;
    if (*seed_opt)
        o.seed = seed;
    o.tol_scale = tol_scale;

    try {
        if (*arch) {
            std::string report;
            if (!config_path.empty())
                report = load_config(config_path).report_path;
            return cmd_archimedes(n, o, std::cout, report);
        }
        const RunConfig config = load_config(config_path);
        return *ident ? cmd_identities(config, o, std::cout) : cmd_transform(config, o, std::cout);
    } catch (const SpectralZeroError& e) {
        std::cerr << "error: SpectralZeroError: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: invalid config: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "error: DomainError: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDegenerate;
    }
}
