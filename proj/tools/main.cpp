// psdot: optimal-transport distances, couplings, and geodesics for
// matrix-valued power spectral densities on the d-torus.
//
// Subcommands:
//   validate <spec>            eigenvalue sweep; exit 0 iff PSD + coercive
//   dist <specA> <specB>       weighted distance, per-frequency cost CSV
//   geodesic <specA> <specB>   interpolated fields at the requested tau values
//   oracle                     brute-force vs closed-form coupling check
//
// Exit codes: 0 success, 1 usage/IO/parse, 2 domain validation or acceptance
// failure. Identical invocations produce byte-identical output files.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psdot/commands.hpp"

namespace {

/// --tol key=value pairs; known keys: coercive (validation floor),
/// gap (oracle pass threshold).
bool apply_tolerances(const std::vector<std::string>& pairs, psdot::ToleranceOverrides& tol,
                      std::string& problem) {
    for (const std::string& kv : pairs) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            problem = "--tol expects key=value, got '" + kv + "'";
            return false;
        }
        const std::string key = kv.substr(0, eq);
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(kv.substr(eq + 1), &used);
            if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
        } catch (const std::exception&) {
            problem = "--tol " + key + ": '" + kv.substr(eq + 1) + "' is not a number";
            return false;
        }
        if (key == "coercive") {
            tol.coercive = value;
        } else if (key == "gap") {
            tol.oracle_gap = value;
        } else {
            problem = "--tol: unknown key '" + key + "' (known: coercive, gap)";
            return false;
        }
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal-transport distances and geodesics between matrix-valued "
                 "power spectral densities"};
    app.require_subcommand(1);

    psdot::RunConfig cfg;
    std::vector<std::string> tol_pairs;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--grid", cfg.grid_sizes,
                        "evaluation grid sizes N1,N2[,N3] (default: from the spec file)")
            ->delimiter(',')
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", cfg.out_dir, "output directory (omit for summary-only)");
        sub->add_option("--tol", tol_pairs, "tolerance overrides, key=value")
            ->delimiter(',');
    };

    CLI::App* validate = app.add_subcommand("validate", "eigenvalue sweep of one field spec");
    validate->add_option("spec", cfg.inputs, "field spec (JSON)")->required()->expected(1);
    add_common(validate);

    CLI::App* dist = app.add_subcommand("dist", "weighted distance between two fields");
    dist->add_option("specs", cfg.inputs, "two field specs (JSON)")->required()->expected(2);
    dist->add_option("--weight", cfg.weight, "weight spec path, or 'identity'");
    add_common(dist);

    CLI::App* geodesic =
        app.add_subcommand("geodesic", "interpolating fields between two endpoints");
    geodesic->add_option("specs", cfg.inputs, "two field specs (JSON)")->required()->expected(2);
    geodesic->add_option("--weight", cfg.weight, "weight spec path, or 'identity'");
    geodesic->add_option("--tau", cfg.taus, "interpolation parameters in [0,1]")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));
    add_common(geodesic);

    CLI::App* oracle =
        app.add_subcommand("oracle", "brute-force check of the closed-form coupling");
    oracle->add_option("--seed", cfg.seed, "random seed (default 0)");
    oracle->add_option("--count", cfg.oracle_count, "instance count")
        ->check(CLI::PositiveNumber);
    oracle->add_option("--dims", cfg.oracle_dims, "matrix dimensions to cycle through")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    add_common(oracle);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // collapse CLI11's error palette to the contract
    }

    std::string problem;
    if (!apply_tolerances(tol_pairs, cfg.tol, problem)) {
        std::cerr << "error: " << problem << '\n';
        return 1;
    }

    if (validate->parsed()) return psdot::cmd_validate(cfg, std::cout, std::cerr);
    if (dist->parsed()) return psdot::cmd_dist(cfg, std::cout, std::cerr);
    if (geodesic->parsed()) return psdot::cmd_geodesic(cfg, std::cout, std::cerr);
    if (oracle->parsed()) return psdot::cmd_oracle(cfg, std::cout, std::cerr);
    return 1;
}
