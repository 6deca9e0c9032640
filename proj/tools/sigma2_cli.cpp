#include "sigma2/sigma2.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
    CLI::App app{"Energies, criticality residuals and stability forms of maps between model manifolds"};
    app.require_subcommand(0, 1);
    bool defaults = false;
    app.add_flag("--print-defaults", defaults, "print every config key with its default and exit");

    std::string config, out;
    std::uint64_t seed = 0;
    const char* cmds[][2] = {
        {"analyze", "Cauchy-Green spectra and class predicates on a sample grid"},
        {"energy", "sigma_1, sigma_2 and coupled energies, charges, bounds, radius minimisation"},
        {"critical", "Euler-Lagrange residuals of a map for a chosen system"},
        {"minimize-profile", "descent for the alpha-join profile"},
        {"stability", "second-variation forms on variation fields, threshold scan"},
        {"reproduce", "canned reproduction cases with pass/fail assertions"},
    };
    std::vector<CLI::App*> subs;
    std::vector<CLI::Option*> seed_opts;
    for (auto& c : cmds) {
        CLI::App* s = app.add_subcommand(c[0], c[1]);
        s->add_option("--config", config, "config file (key = value lines)")->required();
        s->add_option("--out", out, "output directory (overrides the config key `out`)");
        seed_opts.push_back(s->add_option("--seed", seed, "base seed (overrides the config key `seed`)"));
        subs.push_back(s);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    if (defaults) {
        std::cout << s2_default_config();
        return 0;
    }
    CLI::App* chosen = nullptr;
    bool has_seed = false;
    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed()) {
            chosen = subs[i];
            has_seed = seed_opts[i]->count() > 0;
        }
    if (!chosen) {
        std::cerr << app.help();
        return 1;
    }
    std::ifstream f(config, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot read config '" << config << "'\n";
        return 1;
    }
    std::stringstream buf;
    buf << f.rdbuf();
    std::string text = buf.str();
    int exit_code = 1;
    s2_status st = s2_run(chosen->get_name().c_str(), text.c_str(), config.c_str(), out.empty() ? nullptr : out.c_str(),
                          seed, has_seed ? 1 : 0, &exit_code);
    if (st != S2_OK) {
        std::cerr << "error: " << s2_last_error() << "\n";
        return st == S2_ERR_CONFIG || st == S2_ERR_INVALID_ARGUMENT ? 1 : 3;
    }
    std::cout << s2_last_summary();
    return exit_code;
}
