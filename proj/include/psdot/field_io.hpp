#pragma once

// JSON field-spec files. A spec describes a PSD field in one of three ways:
//
//   kind "rational"     - a rational spectral factor W(z); the field is the
//                         Gram square Phi = W W^* evaluated on any grid
//   kind "samples"      - Hermitian matrix values listed per grid point; bound
//                         to the grid declared in the file
//   kind "covariances"  - real lag matrices R_t on the discrete torus; the
//                         field is their DFT (periodic domain only)
//
// Top-level keys: kind, m, d, grid (array of sizes), domain ("continuous" or
// "periodic"), plus the kind's payload ("entries", "values", or "lags") and an
// optional free-form "notes" string. Complex numbers are {re, im} objects of
// decimal literals, everywhere. Schema violations raise SpecError; the math
// layer's own errors (non-Hermitian samples, near-poles, symmetry breaches)
// pass through unchanged.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "psdot/covariance.hpp"
#include "psdot/field.hpp"
#include "psdot/grid.hpp"
#include "psdot/rational.hpp"

namespace psdot {

enum class FieldKind { Rational, Samples, Covariances };

inline std::string to_string(FieldKind k) {
    switch (k) {
        case FieldKind::Rational: return "rational";
        case FieldKind::Samples: return "samples";
        case FieldKind::Covariances: return "covariances";
    }
    return "?";
}

/// Parsed spec file, prior to evaluation on a grid. Exactly one payload
/// member is populated, matching `kind`.
struct FieldSpec {
    FieldKind kind = FieldKind::Samples;
    int m = 0;
    int d = 0;
    std::vector<int> grid_sizes; // the file's grid: native for samples and
                                 // covariances, a default for rational
    DomainKind domain = DomainKind::ContinuousQuadrature;

    std::optional<RationalFactorSpec> rational;
    std::vector<ComplexMatrix> samples;  // grid order, entries row-major
    std::vector<Eigen::MatrixXd> lags;   // multi-index order, row-major

    FrequencyGrid grid() const { return FrequencyGrid(grid_sizes, domain); }
};

namespace detail {

using nlohmann::json;

inline const json& require_key(const json& j, const char* key, const std::string& where) {
    if (!j.is_object())
        throw SpecError(where + ": expected an object");
    auto it = j.find(key);
    if (it == j.end())
        throw SpecError(where + ": missing key '" + key + "'");
    return *it;
}

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                                const std::string& where) {
    for (const auto& item : j.items()) {
        bool known = item.key() == "notes";
        for (const char* a : allowed) known = known || item.key() == a;
        if (!known)
            throw SpecError(where + ": unknown key '" + item.key() + "'");
    }
}

inline int require_int(const json& j, const std::string& where) {
    if (!j.is_number_integer())
        throw SpecError(where + ": expected an integer");
    return j.get<int>();
}

inline double require_number(const json& j, const std::string& where) {
    if (!j.is_number())
        throw SpecError(where + ": expected a number");
    return j.get<double>();
}

/// Read {re, im} from an object; callers owning the object also key-check it.
inline Complex require_complex(const json& j, const std::string& where) {
    return Complex(require_number(require_key(j, "re", where), where + ".re"),
                   require_number(require_key(j, "im", where), where + ".im"));
}

inline std::vector<Monomial> parse_monomials(const json& j, int d, const std::string& where) {
    if (!j.is_array())
        throw SpecError(where + ": expected an array of monomials");
    std::vector<Monomial> out;
    out.reserve(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string at = where + "[" + std::to_string(k) + "]";
        const json& mono = j[k];
        reject_unknown_keys(mono, {"re", "im", "exponents"}, at);
        const json& exps = require_key(mono, "exponents", at);
        if (!exps.is_array() || exps.size() != static_cast<std::size_t>(d))
            throw SpecError(at + ".exponents: expected an array of length d=" +
                            std::to_string(d));
        Monomial m;
        m.coeff = require_complex(mono, at);
        for (std::size_t i = 0; i < exps.size(); ++i)
            m.exponents.push_back(require_int(exps[i], at + ".exponents"));
        out.push_back(std::move(m));
    }
    return out;
}

inline json monomials_to_json(const std::vector<Monomial>& poly) {
    json arr = json::array();
    for (const auto& mono : poly) {
        json e = json::array();
        for (int p : mono.exponents) e.push_back(p);
        arr.push_back({{"re", mono.coeff.real()}, {"im", mono.coeff.imag()}, {"exponents", e}});
    }
    return arr;
}

} // namespace detail

/// Parse an in-memory JSON document into a FieldSpec (strict schema).
inline FieldSpec parse_field_spec(const nlohmann::json& j) {
    using detail::require_key;
    using detail::require_int;
    using detail::require_number;
    using nlohmann::json;

    FieldSpec spec;
    const std::string root = "field spec";

    const std::string kind = [&] {
        const json& k = require_key(j, "kind", root);
        if (!k.is_string()) throw SpecError(root + ".kind: expected a string");
        return k.get<std::string>();
    }();
    if (kind == "rational") spec.kind = FieldKind::Rational;
    else if (kind == "samples") spec.kind = FieldKind::Samples;
    else if (kind == "covariances") spec.kind = FieldKind::Covariances;
    else throw SpecError(root + ".kind: '" + kind +
                         "' is not one of rational|samples|covariances");

    const char* payload_key = spec.kind == FieldKind::Rational   ? "entries"
                              : spec.kind == FieldKind::Samples  ? "values"
                                                                 : "lags";
    detail::reject_unknown_keys(j, {"kind", "m", "d", "grid", "domain", payload_key}, root);

    spec.m = require_int(require_key(j, "m", root), root + ".m");
    spec.d = require_int(require_key(j, "d", root), root + ".d");
    if (spec.m <= 0 || spec.d <= 0)
        throw SpecError(root + ": m and d must be positive");

    const json& grid = require_key(j, "grid", root);
    if (!grid.is_array() || grid.size() != static_cast<std::size_t>(spec.d))
        throw SpecError(root + ".grid: expected an array of length d=" + std::to_string(spec.d));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const int n = require_int(grid[i], root + ".grid");
        if (n <= 0) throw SpecError(root + ".grid: sizes must be positive");
        spec.grid_sizes.push_back(n);
    }

    const std::string domain = [&] {
        const json& d = require_key(j, "domain", root);
        if (!d.is_string()) throw SpecError(root + ".domain: expected a string");
        return d.get<std::string>();
    }();
    if (domain == "continuous") spec.domain = DomainKind::ContinuousQuadrature;
    else if (domain == "periodic") spec.domain = DomainKind::DiscreteTorus;
    else throw SpecError(root + ".domain: '" + domain + "' is not continuous|periodic");

    std::size_t points = 1;
    for (int n : spec.grid_sizes) points *= static_cast<std::size_t>(n);
    const std::size_t mm = static_cast<std::size_t>(spec.m) * static_cast<std::size_t>(spec.m);

    switch (spec.kind) {
        case FieldKind::Rational: {
            const json& entries = require_key(j, "entries", root);
            if (!entries.is_array() || entries.size() != static_cast<std::size_t>(spec.m))
                throw SpecError(root + ".entries: expected m=" + std::to_string(spec.m) +
                                " rows");
            std::vector<RationalEntry> parsed;
            parsed.reserve(mm);
            for (int i = 0; i < spec.m; ++i) {
                const json& row = entries[static_cast<std::size_t>(i)];
                if (!row.is_array() || row.size() != static_cast<std::size_t>(spec.m))
                    throw SpecError(root + ".entries[" + std::to_string(i) + "]: expected m=" +
                                    std::to_string(spec.m) + " columns");
                for (int jj = 0; jj < spec.m; ++jj) {
                    const std::string at = root + ".entries[" + std::to_string(i) + "][" +
                                           std::to_string(jj) + "]";
                    const json& cell = row[static_cast<std::size_t>(jj)];
                    detail::reject_unknown_keys(cell, {"numerator", "denominator"}, at);
                    RationalEntry e;
                    e.numerator = detail::parse_monomials(require_key(cell, "numerator", at),
                                                          spec.d, at + ".numerator");
                    if (cell.is_object() && cell.contains("denominator"))
                        e.denominator = detail::parse_monomials(cell.at("denominator"), spec.d,
                                                                at + ".denominator");
                    parsed.push_back(std::move(e));
                }
            }
            spec.rational.emplace(spec.m, spec.d, std::move(parsed));
            break;
        }
        case FieldKind::Samples: {
            const json& values = require_key(j, "values", root);
            if (!values.is_array() || values.size() != points * mm)
                throw SpecError(root + ".values: expected " + std::to_string(points * mm) +
                                " complex entries (grid points x m^2), got " +
                                std::to_string(values.size()));
            std::size_t k = 0;
            for (std::size_t p = 0; p < points; ++p) {
                ComplexMatrix v(spec.m, spec.m);
                for (int i = 0; i < spec.m; ++i) {
                    for (int jj = 0; jj < spec.m; ++jj) {
                        const std::string at = root + ".values[" + std::to_string(k) + "]";
                        detail::reject_unknown_keys(values[k], {"re", "im"}, at);
                        v(i, jj) = detail::require_complex(values[k], at);
                        ++k;
                    }
                }
                spec.samples.push_back(std::move(v));
            }
            break;
        }
        case FieldKind::Covariances: {
            if (spec.domain != DomainKind::DiscreteTorus)
                throw SpecError(root + ": covariance specs require domain 'periodic'");
            const json& lags = require_key(j, "lags", root);
            if (!lags.is_array() || lags.size() != points * mm)
                throw SpecError(root + ".lags: expected " + std::to_string(points * mm) +
                                " real entries (lags x m^2), got " +
                                std::to_string(lags.size()));
            std::size_t k = 0;
            for (std::size_t p = 0; p < points; ++p) {
                Eigen::MatrixXd r(spec.m, spec.m);
                for (int i = 0; i < spec.m; ++i) {
                    for (int jj = 0; jj < spec.m; ++jj) {
                        r(i, jj) = require_number(lags[k],
                                                  root + ".lags[" + std::to_string(k) + "]");
                        ++k;
                    }
                }
                spec.lags.push_back(std::move(r));
            }
            break;
        }
    }
    return spec;
}

/// Read and parse a spec file. IO failures and JSON syntax errors both map to
/// SpecError, keeping one error class for "the file is unusable".
inline FieldSpec load_field_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SpecError("cannot open field spec '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SpecError("field spec '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        return parse_field_spec(j);
    } catch (const SpecError& e) {
        throw SpecError(std::string(e.what()) + " (in '" + path + "')");
    }
}

/// Evaluate the spec on a grid. Rational specs evaluate anywhere with matching
/// dimension count; sampled and covariance specs are bound to their native
/// grid and reject any other.
inline PsdField realize_field(const FieldSpec& spec, const FrequencyGrid& grid) {
    switch (spec.kind) {
        case FieldKind::Rational:
            return psd_from_factor(eval_rational_factor(*spec.rational, grid));
        case FieldKind::Samples: {
            if (grid != spec.grid())
                throw ShapeError("sampled field is bound to its native grid " +
                                 format_index(spec.grid_sizes) + "/" +
                                 to_string(spec.domain) + " and cannot be re-gridded");
            std::vector<HermitianMatrix> values;
            values.reserve(spec.samples.size());
            const double scale = [&] {
                double s = 0.0;
                for (const auto& v : spec.samples) s = std::max(s, max_abs(v));
                return std::max(s, 1.0);
            }();
            for (std::size_t p = 0; p < spec.samples.size(); ++p) {
                try {
                    // Looser gate than the in-memory default: files written
                    // with trimmed digits are still acceptably Hermitian.
                    values.push_back(HermitianMatrix::from(spec.samples[p], 1e-8 * scale));
                } catch (const Error& e) {
                    throw ShapeError("sampled value at grid point " +
                                     format_index(grid.unflatten(p)) +
                                     " is not Hermitian: " + e.what());
                }
            }
            return PsdField(grid, spec.m, std::move(values));
        }
        case FieldKind::Covariances: {
            if (grid != spec.grid())
                throw ShapeError("covariance field is bound to its native grid " +
                                 format_index(spec.grid_sizes) + " and cannot be re-gridded");
            return psd_from_covariances(CovarianceField(spec.grid_sizes, spec.m, spec.lags));
        }
    }
    throw Error("realize_field: unreachable");
}

inline PsdField realize_field(const FieldSpec& spec) {
    return realize_field(spec, spec.grid());
}

/// Serialize back to the schema accepted by parse_field_spec.
inline nlohmann::json field_spec_to_json(const FieldSpec& spec) {
    nlohmann::json j;
    j["kind"] = to_string(spec.kind);
    j["m"] = spec.m;
    j["d"] = spec.d;
    j["grid"] = spec.grid_sizes;
    j["domain"] = to_string(spec.domain);
    switch (spec.kind) {
        case FieldKind::Rational: {
            nlohmann::json rows = nlohmann::json::array();
            for (int i = 0; i < spec.m; ++i) {
                nlohmann::json row = nlohmann::json::array();
                for (int jj = 0; jj < spec.m; ++jj) {
                    const RationalEntry& e = spec.rational->entry(i, jj);
                    nlohmann::json cell;
                    cell["numerator"] = detail::monomials_to_json(e.numerator);
                    if (!e.denominator.empty())
                        cell["denominator"] = detail::monomials_to_json(e.denominator);
                    row.push_back(std::move(cell));
                }
                rows.push_back(std::move(row));
            }
            j["entries"] = std::move(rows);
            break;
        }
        case FieldKind::Samples: {
            nlohmann::json values = nlohmann::json::array();
            for (const auto& v : spec.samples)
                for (int i = 0; i < spec.m; ++i)
                    for (int jj = 0; jj < spec.m; ++jj)
                        values.push_back({{"re", v(i, jj).real()}, {"im", v(i, jj).imag()}});
            j["values"] = std::move(values);
            break;
        }
        case FieldKind::Covariances: {
            nlohmann::json lags = nlohmann::json::array();
            for (const auto& r : spec.lags)
                for (int i = 0; i < spec.m; ++i)
                    for (int jj = 0; jj < spec.m; ++jj)
                        lags.push_back(r(i, jj));
            j["lags"] = std::move(lags);
            break;
        }
    }
    return j;
}

/// Build a samples-kind spec from a field in memory (for writing files).
inline FieldSpec spec_from_field(const PsdField& phi) {
    FieldSpec spec;
    spec.kind = FieldKind::Samples;
    spec.m = phi.m();
    spec.d = phi.grid().dim();
    spec.grid_sizes = phi.grid().sizes();
    spec.domain = phi.grid().domain();
    spec.samples.reserve(phi.size());
    for (std::size_t p = 0; p < phi.size(); ++p)
        spec.samples.push_back(phi.value(p).mat());
    return spec;
}

inline void save_field_spec(const FieldSpec& spec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw SpecError("cannot write field spec '" + path + "'");
    out << field_spec_to_json(spec).dump(2) << '\n';
}

} // namespace psdot
