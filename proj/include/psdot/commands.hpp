#pragma once

// Workflow layer behind the CLI: validate / dist / geodesic / oracle. Each
// command is an ordinary function taking a RunConfig plus output streams, so
// tests drive them in-process; tools/main.cpp only parses flags.
//
// Exit-code contract (shared with main):
//   0  success
//   1  usage, IO, or parse problems (SpecError, output-file failures)
//   2  domain validation or acceptance failures (every other psdot::Error,
//      plus a validate/oracle run whose checks do not pass)
//
// All file output is deterministic: fixed column order, '%.17g' floats, LF
// line endings, and JSON dumped with sorted keys. Identical inputs, flags,
// and seed produce byte-identical files.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "psdot/coupling.hpp"
#include "psdot/field_io.hpp"
#include "psdot/hellinger.hpp"
#include "psdot/morph.hpp"
#include "psdot/random.hpp"

namespace psdot {

struct ToleranceOverrides {
    double coercive = -1.0;   // validate: coercivity floor; <0 = relative default
    double oracle_gap = 1e-6; // oracle: largest acceptable relative gap
};

struct RunConfig {
    std::vector<std::string> inputs; // spec paths: 1 (validate) or 2 (dist/geodesic)
    std::vector<int> grid_sizes;     // --grid override; empty = spec default
    std::vector<double> taus = {0.0, 0.33, 0.67, 1.0};
    std::string weight = "identity"; // --weight: spec path or "identity"
    std::string out_dir;             // --out; empty = summary on stdout only
    std::uint64_t seed = 0;
    int oracle_count = 50;
    std::vector<int> oracle_dims = {2, 3};
    ToleranceOverrides tol;
};

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Open an output file inside cfg.out_dir (creating the directory). Failures
/// here are IO errors, deliberately outside the psdot::Error hierarchy.
inline std::ofstream open_output(const std::string& dir, const std::string& name) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
    const fs::path path = fs::path(dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    return f;
}

inline void write_json_file(const std::string& dir, const std::string& name,
                            const nlohmann::json& j) {
    std::ofstream f = open_output(dir, name);
    f << j.dump(2) << '\n';
}

inline nlohmann::json grid_to_json(const FrequencyGrid& g) {
    nlohmann::json j;
    j["sizes"] = g.sizes();
    j["domain"] = to_string(g.domain());
    j["points"] = g.point_count();
    return j;
}

inline std::string index_columns(const FrequencyGrid& g) {
    std::string header;
    for (int i = 0; i < g.dim(); ++i)
        header += "l_" + std::to_string(i + 1) + ",";
    return header; // trailing comma on purpose: callers append their columns
}

inline void write_index(std::ofstream& f, const FrequencyGrid& g, std::size_t flat) {
    for (int v : g.unflatten(flat))
        f << v << ',';
}

} // namespace detail

/// Map exceptions to the exit-code contract; everything else runs inside.
inline int run_command(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const SpecError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

namespace detail {

/// Grid the run happens on: the first spec's grid unless --grid overrides the
/// sizes (the domain always comes from the spec).
inline FrequencyGrid resolve_grid(const FieldSpec& spec, const std::vector<int>& override_sizes) {
    if (override_sizes.empty())
        return spec.grid();
    if (static_cast<int>(override_sizes.size()) != spec.d)
        throw ShapeError("--grid supplies " + std::to_string(override_sizes.size()) +
                         " sizes but the field has d=" + std::to_string(spec.d));
    return FrequencyGrid(override_sizes, spec.domain);
}

inline WeightField resolve_weight(const RunConfig& cfg, const FrequencyGrid& grid, int m) {
    if (cfg.weight == "identity")
        return PsdField::constant(grid, HermitianMatrix::identity(m));
    const PsdField omega = realize_field(load_field_spec(cfg.weight), grid);
    if (omega.m() != m)
        throw ShapeError("weight field is " + std::to_string(omega.m()) + "x" +
                         std::to_string(omega.m()) + " but the inputs are " +
                         std::to_string(m) + "x" + std::to_string(m));
    return omega;
}

inline std::pair<PsdField, PsdField> load_pair(const RunConfig& cfg, FrequencyGrid* grid_out) {
    if (cfg.inputs.size() != 2)
        throw SpecError("expected exactly two field specs");
    const FieldSpec a = load_field_spec(cfg.inputs[0]);
    const FieldSpec b = load_field_spec(cfg.inputs[1]);
    const FrequencyGrid grid = resolve_grid(a, cfg.grid_sizes);
    PsdField phi_a = realize_field(a, grid);
    PsdField phi_b = realize_field(b, grid); // bound specs reject foreign grids here
    require_compatible(phi_a, phi_b, "inputs");
    if (grid_out != nullptr) *grid_out = grid;
    return {std::move(phi_a), std::move(phi_b)};
}

} // namespace detail

/// Eigenvalue sweep of one field; exit 0 iff it is PSD and coercive.
inline int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return run_command(err, [&] {
        if (cfg.inputs.size() != 1)
            throw SpecError("validate expects exactly one field spec");
        const FieldSpec spec = load_field_spec(cfg.inputs[0]);
        const FrequencyGrid grid = detail::resolve_grid(spec, cfg.grid_sizes);
        const PsdField phi = realize_field(spec, grid);
        const FieldValidation report = validate_field(phi, cfg.tol.coercive);

        nlohmann::json j;
        j["input"] = cfg.inputs[0];
        j["m"] = phi.m();
        j["grid"] = detail::grid_to_json(grid);
        j["lambda_min"] = report.global_lambda_min;
        j["lambda_max"] = report.global_lambda_max;
        j["psd_tol"] = report.psd_tol;
        j["coercive_tol"] = report.coercive_tol;
        j["psd_pass"] = report.psd_pass;
        j["coercive_pass"] = report.coercive_pass;
        if (report.first_psd_failure)
            j["first_psd_failure"] = *report.first_psd_failure;
        if (report.first_coercive_failure)
            j["first_coercive_failure"] = *report.first_coercive_failure;
        if (!cfg.out_dir.empty())
            detail::write_json_file(cfg.out_dir, "validate.json", j);

        const bool pass = report.psd_pass && report.coercive_pass;
        out << "validate: " << (pass ? "PASS" : "FAIL")
            << " lambda_min=" << detail::fmt17(report.global_lambda_min)
            << " lambda_max=" << detail::fmt17(report.global_lambda_max);
        if (!pass && report.first_coercive_failure)
            out << " first_failure=" << format_index(*report.first_coercive_failure);
        out << '\n';
        return pass ? 0 : 2;
    });
}

/// Weighted distance between two fields: per-frequency cost CSV + summary.
inline int cmd_dist(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return run_command(err, [&] {
        FrequencyGrid grid;
        auto [phi_a, phi_b] = detail::load_pair(cfg, &grid);
        const WeightField omega = detail::resolve_weight(cfg, grid, phi_a.m());
        const DistanceResult res = weighted_hellinger_distance(phi_a, phi_b, omega);

        if (!cfg.out_dir.empty()) {
            std::ofstream csv = detail::open_output(cfg.out_dir, "cost.csv");
            csv << detail::index_columns(grid) << "cost\n";
            for (std::size_t p = 0; p < res.pointwise_cost.size(); ++p) {
                detail::write_index(csv, grid, p);
                csv << detail::fmt17(res.pointwise_cost[p]) << '\n';
            }
            nlohmann::json j;
            j["squared"] = res.squared;
            j["distance"] = res.distance;
            j["grid"] = detail::grid_to_json(grid);
            j["domain"] = to_string(grid.domain());
            j["weight"] = cfg.weight;
            detail::write_json_file(cfg.out_dir, "summary.json", j);
        }
        out << "dist: distance=" << detail::fmt17(res.distance)
            << " squared=" << detail::fmt17(res.squared) << '\n';
        return 0;
    });
}

/// Geodesic sweep: per-tau full matrix dump plus, for 2x2 fields, the four
/// scalar panels (entry (1,1), entry (2,2), Re/Im of entry (1,2)).
inline int cmd_geodesic(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return run_command(err, [&] {
        FrequencyGrid grid;
        auto [phi0, phi1] = detail::load_pair(cfg, &grid);
        const WeightField omega = detail::resolve_weight(cfg, grid, phi0.m());
        const GeodesicPath path = geodesic_path(phi0, phi1, omega, cfg.taus);

        if (!cfg.out_dir.empty()) {
            for (std::size_t k = 0; k < path.taus.size(); ++k) {
                const PsdField& phi = path.fields[k];
                std::ofstream csv =
                    detail::open_output(cfg.out_dir, "geodesic_" + std::to_string(k) + ".csv");
                csv << detail::index_columns(grid) << "tau,i,j,re,im\n";
                for (std::size_t p = 0; p < phi.size(); ++p) {
                    for (int i = 0; i < phi.m(); ++i) {
                        for (int jj = 0; jj < phi.m(); ++jj) {
                            detail::write_index(csv, grid, p);
                            const Complex v = phi.value(p)(i, jj);
                            csv << detail::fmt17(path.taus[k]) << ',' << (i + 1) << ','
                                << (jj + 1) << ',' << detail::fmt17(v.real()) << ','
                                << detail::fmt17(v.imag()) << '\n';
                        }
                    }
                }
                if (phi.m() == 2) {
                    std::ofstream panels =
                        detail::open_output(cfg.out_dir, "panels_" + std::to_string(k) + ".csv");
                    panels << detail::index_columns(grid)
                           << "tau,entry_11,entry_22,re_12,im_12\n";
                    for (std::size_t p = 0; p < phi.size(); ++p) {
                        detail::write_index(panels, grid, p);
                        const HermitianMatrix& v = phi.value(p);
                        panels << detail::fmt17(path.taus[k]) << ','
                               << detail::fmt17(v(0, 0).real()) << ','
                               << detail::fmt17(v(1, 1).real()) << ','
                               << detail::fmt17(v(0, 1).real()) << ','
                               << detail::fmt17(v(0, 1).imag()) << '\n';
                    }
                }
            }
            nlohmann::json j;
            j["taus"] = path.taus;
            j["grid"] = detail::grid_to_json(grid);
            j["domain"] = to_string(grid.domain());
            j["weight"] = cfg.weight;
            j["lambda_min_per_tau"] = path.lambda_min_per_tau;
            detail::write_json_file(cfg.out_dir, "summary.json", j);
        }
        out << "geodesic: " << path.taus.size() << " tau values on "
            << format_index(grid.sizes()) << " " << to_string(grid.domain()) << " grid\n";
        return 0;
    });
}

/// Brute-force vs closed-form couplings on random single-frequency instances.
inline int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return run_command(err, [&] {
        if (cfg.oracle_count < 1)
            throw SpecError("oracle needs count >= 1");
        for (int m : cfg.oracle_dims)
            if (m < 1)
                throw SpecError("oracle dims must be positive");

        GaussianStream rng(cfg.seed);
        double max_rel_gap = 0.0;
        std::vector<std::string> rows;
        rows.reserve(static_cast<std::size_t>(cfg.oracle_count));
        for (int i = 0; i < cfg.oracle_count; ++i) {
            const int m = cfg.oracle_dims[static_cast<std::size_t>(i) % cfg.oracle_dims.size()];
            const CouplingProblem p = make_random_problem(rng, m);
            const double closed = closed_form_coupling(p).objective;
            const int iters = suggested_iterations(p);
            const CouplingSolution sol =
                brute_force_coupling(p, cfg.seed + 1000 + static_cast<std::uint64_t>(i), iters);
            const double rel_gap = std::abs(sol.gap_to_closed_form) / closed;
            max_rel_gap = std::max(max_rel_gap, rel_gap);
            rows.push_back(std::to_string(i) + ',' + std::to_string(m) + ',' +
                           detail::fmt17(closed) + ',' + detail::fmt17(sol.objective) + ',' +
                           detail::fmt17(rel_gap) + ',' + std::to_string(iters));
        }

        const bool pass = max_rel_gap <= cfg.tol.oracle_gap;
        if (!cfg.out_dir.empty()) {
            std::ofstream csv = detail::open_output(cfg.out_dir, "oracle.csv");
            csv << "instance,m,closed_form,brute_force,rel_gap,iterations\n";
            for (const std::string& r : rows) csv << r << '\n';
            nlohmann::json j;
            j["count"] = cfg.oracle_count;
            j["seed"] = cfg.seed;
            j["max_rel_gap"] = max_rel_gap;
            j["tolerance"] = cfg.tol.oracle_gap;
            j["pass"] = pass;
            detail::write_json_file(cfg.out_dir, "summary.json", j);
        }
        out << "oracle: " << (pass ? "PASS" : "FAIL") << " instances=" << cfg.oracle_count
            << " max_rel_gap=" << detail::fmt17(max_rel_gap) << '\n';
        return pass ? 0 : 2;
    });
}

} // namespace psdot
