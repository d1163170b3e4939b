#pragma once

// Geodesic interpolation (spectral morphing) between two coercive PSD
// fields. The optimal coupling pairs the spectral factors Phi0^{1/2} and
// Phi1^{1/2} U with
//
//   U = Phi1^{-1/2} O^{-1} Phi0^{-1/2} sqrt( Phi0^{1/2} O Phi1 O Phi0^{1/2} ),
//
// an all-pass (pointwise unitary) field; the displacement path
//
//   F_tau = (1 - tau) Phi0^{1/2} + tau Phi1^{1/2} U,   Phi_tau = F_tau F_tau^*,
//
// is the geodesic between the fields. Endpoints are recovered up to
// sqrt-then-square round-off; interior points are PSD by construction but
// can in principle lose coercivity for m > 1, so the path records min
// eigenvalues instead of asserting them.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "psdot/field.hpp"
#include "psdot/grid.hpp"
#include "psdot/hermlin.hpp"

namespace psdot {

/// Pointwise-unitary matrix field. Construction verifies the defining
/// property ||U U^* - I||_inf <= tol at every point.
class AllPassField {
public:
    AllPassField(FrequencyGrid grid, int m, std::vector<ComplexMatrix> values,
                 double unitary_tol = 1e-10)
        : field_(std::move(grid), m, std::move(values)) {
        const ComplexMatrix eye = ComplexMatrix::Identity(m, m);
        for (std::size_t p = 0; p < field_.size(); ++p) {
            const double dev =
                max_abs(ComplexMatrix(field_.value(p) * field_.value(p).adjoint() - eye));
            if (dev > unitary_tol)
                throw NumericalError("all-pass field fails the unitarity check at grid point " +
                                     format_index(field_.grid().unflatten(p)) + " (deviation " +
                                     std::to_string(dev) + ")");
        }
    }

    const FrequencyGrid& grid() const { return field_.grid(); }
    int m() const { return field_.m(); }
    std::size_t size() const { return field_.size(); }
    const ComplexMatrix& value(std::size_t p) const { return field_.value(p); }

private:
    FactorField field_;
};

/// Weighted all-pass alignment between two coercive fields. Inputs below the
/// coercivity floor are rejected (the defining formula needs the inverse
/// roots). Evaluation does not: with the SVD
/// Phi0^{1/2} O Phi1^{1/2} = U S V^*, substituting
/// Phi1^{1/2} V = O^{-1} Phi0^{-1/2} U S into the product above collapses the
/// whole expression to V U^* — the polar unitary of the cross kernel — which
/// is exactly unitary in floating point regardless of how ill-conditioned
/// the inputs are. The test suite checks this against the inverse-root form.
inline AllPassField allpass(const PsdField& phi0, const PsdField& phi1,
                            const WeightField& omega) {
    require_compatible(phi0, phi1, "allpass");
    require_compatible(phi0, omega, "allpass");
    require_coercive(omega);
    const FieldValidation v0 = validate_field(phi0);
    if (!v0.coercive_pass)
        throw NotCoerciveError("allpass: first field not coercive at grid point " +
                                   format_index(*v0.first_coercive_failure),
                               v0.global_lambda_min);
    const FieldValidation v1 = validate_field(phi1);
    if (!v1.coercive_pass)
        throw NotCoerciveError("allpass: second field not coercive at grid point " +
                                   format_index(*v1.first_coercive_failure),
                               v1.global_lambda_min);

    std::vector<ComplexMatrix> values;
    values.reserve(phi0.size());
    for (std::size_t p = 0; p < phi0.size(); ++p) {
        const ComplexMatrix kernel = sqrt_psd(phi0.value(p)).mat() * omega.value(p).mat() *
                                     sqrt_psd(phi1.value(p)).mat();
        Eigen::JacobiSVD<ComplexMatrix> svd(kernel,
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
        values.push_back(svd.matrixV() * svd.matrixU().adjoint());
    }
    return AllPassField(phi0.grid(), phi0.m(), std::move(values));
}

namespace detail {

inline PsdField geodesic_from_allpass(const PsdField& phi0, const PsdField& phi1,
                                      const AllPassField& u, double tau) {
    std::vector<HermitianMatrix> values;
    values.reserve(phi0.size());
    for (std::size_t p = 0; p < phi0.size(); ++p) {
        const ComplexMatrix f = (1.0 - tau) * sqrt_psd(phi0.value(p)).mat() +
                                tau * (sqrt_psd(phi1.value(p)).mat() * u.value(p));
        values.push_back(HermitianMatrix::from(f * f.adjoint()));
    }
    return PsdField(phi0.grid(), phi0.m(), std::move(values));
}

inline void require_tau(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0))
        throw Error("geodesic: tau must lie in [0, 1]");
}

} // namespace detail

/// Single geodesic point Phi_tau.
inline PsdField geodesic_point(const PsdField& phi0, const PsdField& phi1,
                               const WeightField& omega, double tau) {
    detail::require_tau(tau);
    return detail::geodesic_from_allpass(phi0, phi1, allpass(phi0, phi1, omega), tau);
}

struct GeodesicPath {
    std::vector<double> taus;
    std::vector<PsdField> fields;          // one per tau
    std::vector<double> lambda_min_per_tau; // global min eigenvalue of each field
    WeightField omega_used;
};

/// Full path: the alignment U is computed once and shared across all tau.
inline GeodesicPath geodesic_path(const PsdField& phi0, const PsdField& phi1,
                                  const WeightField& omega, const std::vector<double>& taus) {
    if (taus.empty()) throw Error("geodesic_path: need at least one tau");
    for (std::size_t i = 0; i < taus.size(); ++i) {
        detail::require_tau(taus[i]);
        if (i > 0 && taus[i] < taus[i - 1])
            throw Error("geodesic_path: tau values must be sorted ascending");
    }
    const AllPassField u = allpass(phi0, phi1, omega);

    GeodesicPath path;
    path.taus = taus;
    path.omega_used = omega;
    path.fields.reserve(taus.size());
    path.lambda_min_per_tau.reserve(taus.size());
    for (double tau : taus) {
        PsdField field = detail::geodesic_from_allpass(phi0, phi1, u, tau);
        path.lambda_min_per_tau.push_back(validate_field(field).global_lambda_min);
        path.fields.push_back(std::move(field));
    }
    return path;
}

/// Uniform tau sampling: count points from 0 to 1 inclusive (default 11).
inline std::vector<double> uniform_taus(int count = 11) {
    if (count < 2) throw Error("uniform_taus: need at least two points");
    std::vector<double> taus(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        taus[static_cast<std::size_t>(i)] =
            static_cast<double>(i) / static_cast<double>(count - 1);
    return taus;
}

} // namespace psdot
