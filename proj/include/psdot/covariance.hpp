#pragma once

// Covariance sequences of periodic fields and their exact frequency-domain
// counterparts. On an N_1 x ... x N_d torus the finite covariance family
// {R_t} and the sampled spectrum {Phi(zeta_l)} are related by the discrete
// Fourier pair
//
//   Phi(zeta_l) = sum_t R_t zeta_l^{-t},   R_t = (1/|N|) sum_l Phi(zeta_l) zeta_l^t,
//
// with zeta_l^t = e^{j*2*pi*<l/N, t>}. Grids here are tiny (tool defaults are
// 64 per axis), so the transform is a direct separable sum, axis by axis, in
// a fixed order; runs are bitwise reproducible.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "psdot/field.hpp"
#include "psdot/grid.hpp"
#include "psdot/hermlin.hpp"

namespace psdot {

/// Real m x m covariance lags R_t on the discrete torus, flat row-major
/// storage over t (last dimension fastest). A valid family satisfies
/// R_t = R_{-t mod N}^T, which the constructor checks.
class CovarianceField {
public:
    CovarianceField() = default;

    /// sym_tol < 0 selects the default 1e-10 relative to the largest lag
    /// entry (floored at 1).
    CovarianceField(std::vector<int> sizes, int m, std::vector<Eigen::MatrixXd> lags,
                    double sym_tol = -1.0)
        : grid_(std::move(sizes), DomainKind::DiscreteTorus), m_(m), lags_(std::move(lags)) {
        if (m_ <= 0) throw ShapeError("CovarianceField: matrix dimension must be positive");
        if (lags_.size() != grid_.point_count())
            throw ShapeError("CovarianceField: lag count does not match torus size");
        for (const auto& r : lags_)
            if (r.rows() != m_ || r.cols() != m_)
                throw ShapeError("CovarianceField: lag has wrong shape");
        check_symmetry(sym_tol);
    }

    const std::vector<int>& sizes() const { return grid_.sizes(); }
    int dim() const { return grid_.dim(); }
    int m() const { return m_; }
    std::size_t size() const { return lags_.size(); }
    const Eigen::MatrixXd& lag(std::size_t flat) const { return lags_[flat]; }
    const std::vector<Eigen::MatrixXd>& lags() const { return lags_; }

    /// The index grid of the lags, which is also the frequency grid of the
    /// transformed field.
    const FrequencyGrid& grid() const { return grid_; }

    double max_abs() const {
        double s = 0.0;
        for (const auto& r : lags_) s = std::max(s, r.cwiseAbs().maxCoeff());
        return s;
    }

private:
    void check_symmetry(double sym_tol) const {
        const double tol = sym_tol < 0.0 ? 1e-10 * std::max(1.0, max_abs()) : sym_tol;
        for (std::size_t p = 0; p < lags_.size(); ++p) {
            std::vector<int> t = grid_.unflatten(p);
            for (int i = 0; i < grid_.dim(); ++i)
                t[i] = t[i] == 0 ? 0 : grid_.sizes()[i] - t[i]; // (-t) mod N
            const std::size_t q = grid_.flatten(t);
            const double dev = (lags_[p] - lags_[q].transpose()).cwiseAbs().maxCoeff();
            if (dev > tol)
                throw CovarianceError("covariance family violates R_t = R_{-t}^T at lag " +
                                      format_index(grid_.unflatten(p)) + " (deviation " +
                                      std::to_string(dev) + ")");
        }
    }

    FrequencyGrid grid_;
    int m_ = 0;
    std::vector<Eigen::MatrixXd> lags_;
};

namespace detail {

/// Direct DFT along one axis of a flat matrix field, in place.
/// sign = -1 applies the forward kernel e^{-j*2*pi*k*t/n}; sign = +1 the
/// conjugate kernel (no 1/n factor). Twiddles are computed from the exact
/// residue (k*t) mod n so conjugate passes cancel to round-off.
inline void dft_axis(std::vector<ComplexMatrix>& data, const std::vector<int>& sizes,
                     int axis, int sign) {
    std::size_t stride = 1;
    for (std::size_t i = static_cast<std::size_t>(axis) + 1; i < sizes.size(); ++i)
        stride *= static_cast<std::size_t>(sizes[i]);
    const std::size_t n = static_cast<std::size_t>(sizes[static_cast<std::size_t>(axis)]);
    const std::size_t block = stride * n;

    std::vector<Complex> twiddle(n);
    for (std::size_t k = 0; k < n; ++k)
        twiddle[k] = std::polar(1.0, sign * 2.0 * M_PI *
                                         (static_cast<double>(k) / static_cast<double>(n)));

    std::vector<ComplexMatrix> line(n);
    for (std::size_t base = 0; base < data.size(); base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
            for (std::size_t t = 0; t < n; ++t) line[t] = data[base + off + t * stride];
            for (std::size_t k = 0; k < n; ++k) {
                ComplexMatrix acc = ComplexMatrix::Zero(line[0].rows(), line[0].cols());
                for (std::size_t t = 0; t < n; ++t) acc += twiddle[(k * t) % n] * line[t];
                data[base + off + k * stride] = std::move(acc);
            }
        }
    }
}

} // namespace detail

/// Phi(zeta_l) = sum_t R_t zeta_l^{-t} on the discrete torus. The result is
/// Hermitian in exact arithmetic; round-off asymmetry is measured, rejected
/// above 1e-8 (relative to the field scale) as an inconsistent family, and
/// discarded otherwise.
inline PsdField psd_from_covariances(const CovarianceField& r) {
    std::vector<ComplexMatrix> data;
    data.reserve(r.size());
    for (std::size_t p = 0; p < r.size(); ++p)
        data.push_back(r.lag(p).cast<Complex>());
    for (int axis = 0; axis < r.dim(); ++axis)
        detail::dft_axis(data, r.sizes(), axis, -1);

    double scale = 0.0;
    for (const auto& v : data) scale = std::max(scale, max_abs(v));
    const double herm_tol = 1e-8 * std::max(1.0, scale);

    std::vector<HermitianMatrix> values;
    values.reserve(data.size());
    for (std::size_t p = 0; p < data.size(); ++p) {
        const double dev = max_abs(ComplexMatrix(data[p] - data[p].adjoint()));
        if (dev > herm_tol)
            throw CovarianceError(
                "transformed spectrum is not Hermitian at grid point " +
                format_index(r.grid().unflatten(p)) + " (deviation " + std::to_string(dev) +
                "); covariance family is inconsistent");
        values.push_back(HermitianMatrix::from(data[p], herm_tol));
    }
    return PsdField(r.grid(), r.m(), std::move(values));
}

/// R_t = (1/|N|) sum_l Phi(zeta_l) zeta_l^t for a field on a discrete torus.
/// The lags of a Hermitian field are real in exact arithmetic; imaginary
/// round-off is rejected above 1e-8 (relative) and discarded otherwise.
inline CovarianceField covariances_from_psd(const PsdField& phi) {
    if (phi.grid().domain() != DomainKind::DiscreteTorus)
        throw ShapeError("covariances_from_psd: field must live on a discrete torus");

    std::vector<ComplexMatrix> data;
    data.reserve(phi.size());
    for (std::size_t p = 0; p < phi.size(); ++p) data.push_back(phi.value(p).mat());
    for (int axis = 0; axis < phi.grid().dim(); ++axis)
        detail::dft_axis(data, phi.grid().sizes(), axis, +1);
    const double inv_n = phi.grid().weight();
    for (auto& v : data) v *= inv_n;

    double scale = 0.0;
    for (const auto& v : data) scale = std::max(scale, max_abs(v));
    const double imag_tol = 1e-8 * std::max(1.0, scale);

    std::vector<Eigen::MatrixXd> lags;
    lags.reserve(data.size());
    for (std::size_t p = 0; p < data.size(); ++p) {
        const double imag_dev = data[p].imag().cwiseAbs().maxCoeff();
        if (imag_dev > imag_tol)
            throw CovarianceError("inverse transform produced complex lags at " +
                                  format_index(phi.grid().unflatten(p)) + " (imaginary part " +
                                  std::to_string(imag_dev) + "); spectrum is inconsistent");
        lags.push_back(data[p].real());
    }
    return CovarianceField(phi.grid().sizes(), phi.m(), std::move(lags));
}

} // namespace psdot
