#pragma once

// Dense complex Hermitian kernel shared by every other header: spectral
// decompositions, principal square roots and their inverses, nuclear norms,
// and PSD predicates. Matrices are small (m <= 8 in practice), so everything
// is dense and deterministic: same input bits, same output bits.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "psdot/errors.hpp"

namespace psdot {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Entrywise infinity norm (largest |a_ij|).
inline double max_abs(const ComplexMatrix& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().maxCoeff();
}

inline bool all_finite(const ComplexMatrix& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag()))
                return false;
    return true;
}

inline std::string format_matrix(const ComplexMatrix& a) {
    std::ostringstream os;
    os << a.rows() << "x" << a.cols() << " [";
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        if (i) os << "; ";
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (j) os << ", ";
            os << a(i, j).real() << (a(i, j).imag() < 0 ? "-" : "+")
               << std::abs(a(i, j).imag()) << "i";
        }
    }
    os << "]";
    return os.str();
}

/// Square complex matrix that is exactly Hermitian in storage. Construction
/// accepts inputs within hermitian_tol of Hermitian (default 1e-12 * |A|_inf)
/// and symmetrizes; anything further away is rejected rather than repaired.
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    static HermitianMatrix from(const ComplexMatrix& a, double hermitian_tol = -1.0) {
        if (a.rows() != a.cols())
            throw ShapeError("HermitianMatrix: input is " + std::to_string(a.rows()) +
                             "x" + std::to_string(a.cols()) + ", expected square");
        if (!all_finite(a))
            throw Error("HermitianMatrix: non-finite entries in " + format_matrix(a));
        const double scale = psdot::max_abs(a);
        if (hermitian_tol < 0.0) hermitian_tol = 1e-12 * scale;
        const double dev = psdot::max_abs(a - a.adjoint());
        if (dev > hermitian_tol)
            throw Error("HermitianMatrix: asymmetry " + std::to_string(dev) +
                        " exceeds tolerance " + std::to_string(hermitian_tol) +
                        " for " + format_matrix(a));
        // (a + a*)/2 has exactly real diagonal and exact conjugate symmetry.
        ComplexMatrix sym = 0.5 * (a + a.adjoint().eval());
        for (Eigen::Index i = 0; i < sym.rows(); ++i)
            sym(i, i) = Complex(sym(i, i).real(), 0.0);
        return HermitianMatrix(std::move(sym));
    }

    static HermitianMatrix identity(int dim) {
        return HermitianMatrix(ComplexMatrix::Identity(dim, dim));
    }

    static HermitianMatrix diagonal(const Eigen::VectorXd& d) {
        ComplexMatrix m = ComplexMatrix::Zero(d.size(), d.size());
        for (Eigen::Index i = 0; i < d.size(); ++i) m(i, i) = Complex(d(i), 0.0);
        return HermitianMatrix(std::move(m));
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    const ComplexMatrix& mat() const { return m_; }
    Complex operator()(int i, int j) const { return m_(i, j); }

    /// Trace; exactly real because the stored diagonal is real.
    double trace() const { return m_.trace().real(); }
    double max_abs() const { return psdot::max_abs(m_); }

private:
    explicit HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {}
    ComplexMatrix m_;
};

struct EigDecomposition {
    Eigen::VectorXd eigenvalues;   // ascending
    ComplexMatrix eigenvectors;    // unitary, columns match eigenvalues
};

/// Full spectral decomposition A = V diag(lambda) V*.
inline EigDecomposition eig_hermitian(const HermitianMatrix& a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.mat());
    if (solver.info() != Eigen::Success)
        throw NumericalError("eig_hermitian: no convergence for " + format_matrix(a.mat()));
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline Eigen::VectorXd eigenvalues_hermitian(const HermitianMatrix& a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a.mat(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eig_hermitian: no convergence for " + format_matrix(a.mat()));
    return solver.eigenvalues();
}

/// Principal PSD square root. Eigenvalues in [-clip_tol, 0) are treated as
/// quadrature round-off and clipped to zero; anything below -clip_tol is a
/// hard error. Default clip_tol = 1e-10 * |A|_inf.
inline HermitianMatrix sqrt_psd(const HermitianMatrix& a, double clip_tol = -1.0) {
    if (clip_tol < 0.0) clip_tol = 1e-10 * a.max_abs();
    EigDecomposition eig = eig_hermitian(a);
    const double lambda_min = eig.eigenvalues.size() ? eig.eigenvalues(0) : 0.0;
    if (lambda_min < -clip_tol)
        throw NotPsdError("sqrt_psd: lambda_min = " + std::to_string(lambda_min) +
                          " below -" + std::to_string(clip_tol) + " for " +
                          format_matrix(a.mat()),
                          lambda_min);
    Eigen::VectorXd roots(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < roots.size(); ++i)
        roots(i) = eig.eigenvalues(i) > 0.0 ? std::sqrt(eig.eigenvalues(i)) : 0.0;
    ComplexMatrix s = eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.adjoint();
    return HermitianMatrix::from(s);
}

/// Inverse of the principal square root: T with T A T = I. Requires
/// lambda_min >= coercive_tol (default 1e-8 * |A|_inf); no regularization.
inline HermitianMatrix inv_sqrt_psd(const HermitianMatrix& a, double coercive_tol = -1.0) {
    if (coercive_tol < 0.0) coercive_tol = 1e-8 * a.max_abs();
    EigDecomposition eig = eig_hermitian(a);
    const double lambda_min = eig.eigenvalues.size() ? eig.eigenvalues(0) : 0.0;
    if (lambda_min < coercive_tol || lambda_min <= 0.0)
        throw NotCoerciveError("inv_sqrt_psd: lambda_min = " + std::to_string(lambda_min) +
                               " below coercivity tolerance " + std::to_string(coercive_tol) +
                               " for " + format_matrix(a.mat()),
                               lambda_min);
    Eigen::VectorXd inv_roots(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < inv_roots.size(); ++i)
        inv_roots(i) = 1.0 / std::sqrt(eig.eigenvalues(i));
    ComplexMatrix t = eig.eigenvectors * inv_roots.asDiagonal() * eig.eigenvectors.adjoint();
    return HermitianMatrix::from(t);
}

/// Sum of singular values.
inline double nuclear_norm(const ComplexMatrix& m) {
    if (!all_finite(m))
        throw Error("nuclear_norm: non-finite entries in " + format_matrix(m));
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    if (svd.info() != Eigen::Success)
        throw NumericalError("nuclear_norm: SVD failed for " + format_matrix(m));
    return svd.singularValues().sum();
}

struct PsdWitness {
    bool psd = false;
    double lambda_min = 0.0;
    explicit operator bool() const { return psd; }
};

/// True iff lambda_min(A) >= -tol; the witness carries lambda_min.
inline PsdWitness is_psd(const HermitianMatrix& a, double tol = 0.0) {
    Eigen::VectorXd lambda = eigenvalues_hermitian(a);
    const double lambda_min = lambda.size() ? lambda(0) : 0.0;
    return {lambda_min >= -tol, lambda_min};
}

} // namespace psdot
