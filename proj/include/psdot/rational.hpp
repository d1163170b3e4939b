#pragma once

// Rational spectral factors on the d-torus. Each matrix entry is a ratio of
// Laurent polynomials in the delay variables z_i^{-1}; on the unit torus
// z_i^{-1} = e^{-j*theta_i}, so a monomial c * prod_i z_i^{-e_i} evaluates to
// c * e^{-j <e, theta>}. Exponents are signed integers, so plain polynomials
// in z_i are expressible with negative e_i.

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "psdot/field.hpp"
#include "psdot/grid.hpp"
#include "psdot/hermlin.hpp"

namespace psdot {

struct Monomial {
    Complex coeff;
    std::vector<int> exponents; // power of z_i^{-1} per dimension, length d
};

struct RationalEntry {
    std::vector<Monomial> numerator;
    std::vector<Monomial> denominator; // empty means constant 1
};

/// m x m matrix of rational entries over d torus variables, row-major.
class RationalFactorSpec {
public:
    RationalFactorSpec(int m, int d, std::vector<RationalEntry> entries)
        : m_(m), d_(d), entries_(std::move(entries)) {
        if (m_ <= 0 || d_ <= 0)
            throw ShapeError("RationalFactorSpec: dimensions must be positive");
        if (entries_.size() != static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_))
            throw ShapeError("RationalFactorSpec: need m*m entries");
        for (const auto& e : entries_) {
            for (const auto& mono : e.numerator)
                if (mono.exponents.size() != static_cast<std::size_t>(d_))
                    throw ShapeError("RationalFactorSpec: monomial exponent count != d");
            for (const auto& mono : e.denominator)
                if (mono.exponents.size() != static_cast<std::size_t>(d_))
                    throw ShapeError("RationalFactorSpec: monomial exponent count != d");
        }
    }

    int m() const { return m_; }
    int d() const { return d_; }
    const RationalEntry& entry(int i, int j) const {
        return entries_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m_) +
                        static_cast<std::size_t>(j)];
    }
    const std::vector<RationalEntry>& entries() const { return entries_; }

    /// Entry that is identically `c`.
    static RationalEntry constant_entry(Complex c, int d) {
        RationalEntry e;
        e.numerator.push_back(Monomial{c, std::vector<int>(static_cast<std::size_t>(d), 0)});
        return e;
    }

private:
    int m_;
    int d_;
    std::vector<RationalEntry> entries_;
};

namespace detail {

inline Complex eval_poly(const std::vector<Monomial>& poly, const std::vector<double>& theta) {
    Complex acc(0.0, 0.0);
    for (const auto& mono : poly) {
        double phase = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i)
            phase -= static_cast<double>(mono.exponents[i]) * theta[i];
        acc += mono.coeff * std::polar(1.0, phase);
    }
    return acc;
}

} // namespace detail

/// Sample the factor on a grid. A denominator magnitude below `pole_tol`
/// (default 1e-12) at any grid point raises NearPoleError with that point's
/// multi-index.
inline FactorField eval_rational_factor(const RationalFactorSpec& spec,
                                        const FrequencyGrid& grid,
                                        double pole_tol = 1e-12) {
    if (grid.dim() != spec.d())
        throw ShapeError("eval_rational_factor: grid dimension != factor dimension");
    const int m = spec.m();
    std::vector<ComplexMatrix> values;
    values.reserve(grid.point_count());
    for (std::size_t p = 0; p < grid.point_count(); ++p) {
        const std::vector<double> theta = grid.angles(p);
        ComplexMatrix w(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                const RationalEntry& e = spec.entry(i, j);
                const Complex num = detail::eval_poly(e.numerator, theta);
                if (e.denominator.empty()) {
                    w(i, j) = num;
                    continue;
                }
                const Complex den = detail::eval_poly(e.denominator, theta);
                if (std::abs(den) < pole_tol)
                    throw NearPoleError("rational factor entry (" + std::to_string(i) + "," +
                                            std::to_string(j) +
                                            ") has a near-pole at grid point " +
                                            format_index(grid.unflatten(p)),
                                        grid.unflatten(p));
                w(i, j) = num / den;
            }
        }
        values.push_back(std::move(w));
    }
    return FactorField(grid, m, std::move(values));
}

} // namespace psdot
