#pragma once

// Per-frequency coupling problem behind the Hellinger cross term:
//
//   maximize 2 Re tr(O Pxy)  over Pxy  s.t.  [[Px, Pxy], [Pxy*, Py]] >= 0.
//
// Writing Pxy = Px^{1/2} K Py^{1/2} turns the constraint into ||K||_op <= 1,
// so the feasible set is the unit operator-norm ball and the objective is
// linear: 2 Re tr(M K) with M = Py^{1/2} O Px^{1/2}. The analytic maximum is
// 2 tr(Sigma) = 2 ||M||_* at K = V U^* (SVD M = U Sigma V^*). The brute-force
// solver knows none of that: it runs projected gradient ascent in K-space
// (projection = clip singular values at 1) and exists purely to check the
// closed form. Monotonicity of the ascent follows from the projection
// theorem, so it is asserted, not hoped for.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "psdot/hermlin.hpp"
#include "psdot/random.hpp"

namespace psdot {

struct CouplingProblem {
    HermitianMatrix phi_x;
    HermitianMatrix phi_y;
    HermitianMatrix omega;
};

struct CouplingSolution {
    ComplexMatrix cross_spectrum;    // Pxy
    double objective = 0.0;          // 2 Re tr(O Pxy)
    bool feasible = false;           // Schur-complement verdict on Pxy
    double gap_to_closed_form = 0.0; // closed-form objective minus this one
};

struct FeasibilityReport {
    bool feasible = false;         // primary verdict (Schur complement)
    double schur_lambda_min = 0.0; // min eigenvalue of Px - Pxy Py^{-1} Pxy*
    double block_lambda_min = 0.0; // min eigenvalue of [[Px, Pxy],[Pxy*, Py]]
    bool tests_agree = false;      // Schur and block verdicts match
};

/// Feasibility of a cross spectrum: Px - Pxy Py^{-1} Pxy* must be PSD
/// (within an absolute 1e-9 slack). The equivalent 2m x 2m block test runs
/// alongside as a cross-check; the report carries both witnesses.
inline FeasibilityReport check_feasibility(const HermitianMatrix& phi_x,
                                           const HermitianMatrix& phi_y,
                                           const ComplexMatrix& phi_xy, double tol = 1e-9) {
    const int m = phi_x.dim();
    if (phi_y.dim() != m || phi_xy.rows() != m || phi_xy.cols() != m)
        throw ShapeError("check_feasibility: dimension mismatch");

    // Pxy Py^{-1} Pxy* as the Gram product G G* with G = Pxy Py^{-1/2}: a
    // Gram product is exactly Hermitian in floating point, so the Schur
    // complement stays exactly Hermitian even when it is analytically zero
    // (the case at the coupling optimum, where K is unitary).
    const HermitianMatrix y_inv_sqrt = inv_sqrt_psd(phi_y); // throws if Py is singular
    const ComplexMatrix g = phi_xy * y_inv_sqrt.mat();
    const HermitianMatrix schur =
        HermitianMatrix::from(ComplexMatrix(phi_x.mat() - g * g.adjoint()));

    ComplexMatrix block(2 * m, 2 * m);
    block.topLeftCorner(m, m) = phi_x.mat();
    block.topRightCorner(m, m) = phi_xy;
    block.bottomLeftCorner(m, m) = phi_xy.adjoint();
    block.bottomRightCorner(m, m) = phi_y.mat();

    FeasibilityReport report;
    report.schur_lambda_min = eigenvalues_hermitian(schur)(0);
    report.block_lambda_min = eigenvalues_hermitian(HermitianMatrix::from(block))(0);
    report.feasible = report.schur_lambda_min >= -tol;
    const bool block_feasible = report.block_lambda_min >= -tol;
    report.tests_agree = report.feasible == block_feasible;
    return report;
}

namespace detail {

/// Reject problems whose matrices are not strictly positive definite.
inline void validate_coupling_problem(const CouplingProblem& p) {
    const struct {
        const char* name;
        const HermitianMatrix* mat;
    } parts[] = {{"phi_x", &p.phi_x}, {"phi_y", &p.phi_y}, {"omega", &p.omega}};
    for (const auto& part : parts) {
        if (part.mat->dim() != p.phi_x.dim())
            throw ShapeError("coupling problem: dimension mismatch");
        const double lambda_min = eigenvalues_hermitian(*part.mat)(0);
        const double tol = 1e-8 * std::max(1.0, part.mat->max_abs());
        if (lambda_min < tol)
            throw NotCoerciveError(std::string("coupling problem: ") + part.name +
                                       " is not positive definite",
                                   lambda_min);
    }
}

/// M = Py^{1/2} O Px^{1/2}: the objective is 2 Re tr(M K).
inline ComplexMatrix coupling_kernel(const CouplingProblem& p) {
    return sqrt_psd(p.phi_y).mat() * p.omega.mat() * sqrt_psd(p.phi_x).mat();
}

/// Project onto the unit operator-norm ball: clip singular values at 1.
inline ComplexMatrix clip_singular_values(const ComplexMatrix& k) {
    Eigen::JacobiSVD<ComplexMatrix> svd(k, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::min(s(i), 1.0);
    return svd.matrixU() * s.asDiagonal() * svd.matrixV().adjoint();
}

} // namespace detail

/// Analytic optimum via the SVD of M = Py^{1/2} O Px^{1/2}: K = V U^*,
/// objective 2 tr(Sigma), cross spectrum Px^{1/2} K Py^{1/2}.
inline CouplingSolution closed_form_coupling(const CouplingProblem& p) {
    detail::validate_coupling_problem(p);
    const HermitianMatrix x_sqrt = sqrt_psd(p.phi_x);
    const HermitianMatrix y_sqrt = sqrt_psd(p.phi_y);
    const ComplexMatrix m = y_sqrt.mat() * p.omega.mat() * x_sqrt.mat();

    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const ComplexMatrix k = svd.matrixV() * svd.matrixU().adjoint();

    CouplingSolution sol;
    sol.cross_spectrum = x_sqrt.mat() * k * y_sqrt.mat();
    sol.objective = 2.0 * svd.singularValues().sum();
    sol.feasible = check_feasibility(p.phi_x, p.phi_y, sol.cross_spectrum).feasible;
    sol.gap_to_closed_form = 0.0;
    return sol;
}

/// Projected gradient ascent over the unit-ball parameterization, seeded and
/// deterministic. Knows nothing about the SVD solution; used to verify it.
/// `objective_history`, when supplied, receives the objective after every
/// iteration (analytically nondecreasing).
inline CouplingSolution brute_force_coupling(const CouplingProblem& p, std::uint64_t seed,
                                             int iters = 500,
                                             std::vector<double>* objective_history = nullptr) {
    detail::validate_coupling_problem(p);
    if (iters < 1) throw Error("brute_force_coupling: need at least one iteration");
    const HermitianMatrix x_sqrt = sqrt_psd(p.phi_x);
    const HermitianMatrix y_sqrt = sqrt_psd(p.phi_y);
    const ComplexMatrix m = y_sqrt.mat() * p.omega.mat() * x_sqrt.mat();
    const ComplexMatrix ascent = m.adjoint(); // gradient of Re tr(M K) in <A,B> = Re tr(A*B)

    Eigen::JacobiSVD<ComplexMatrix> msvd(m);
    const double m_norm = msvd.singularValues()(0);
    if (!(m_norm > 0.0))
        throw NumericalError("brute_force_coupling: degenerate kernel");
    const double step = 0.1 / m_norm;

    const int dim = p.phi_x.dim();
    GaussianStream rng(seed);
    ComplexMatrix k(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) k(i, j) = rng.complex_normal();
    k = detail::clip_singular_values(k);

    const auto objective_at = [&](const ComplexMatrix& kk) {
        return 2.0 * (m * kk).trace().real();
    };

    double best_objective = objective_at(k);
    ComplexMatrix best_k = k;
    if (objective_history) objective_history->push_back(best_objective);
    for (int it = 0; it < iters; ++it) {
        k = detail::clip_singular_values(k + step * ascent);
        const double obj = objective_at(k);
        if (objective_history) objective_history->push_back(obj);
        if (obj > best_objective) {
            best_objective = obj;
            best_k = k;
        }
    }

    CouplingSolution sol;
    sol.cross_spectrum = x_sqrt.mat() * best_k * y_sqrt.mat();
    sol.objective = best_objective;
    sol.feasible = check_feasibility(p.phi_x, p.phi_y, sol.cross_spectrum).feasible;
    sol.gap_to_closed_form = closed_form_coupling(p).objective - best_objective;
    return sol;
}

/// Iteration budget for brute_force_coupling sized to close the relative gap
/// to `relative_target` with the fixed ascent step: a singular mode sigma_i
/// of the kernel needs on the order of sigma_max/sigma_i iterations to
/// traverse the ball and align its phase, while modes below the significance
/// floor (too small to move the relative gap) can stay unconverged. The
/// count is capped, so pathological kernels degrade to best-effort.
inline int suggested_iterations(const CouplingProblem& p, double relative_target = 1e-6) {
    detail::validate_coupling_problem(p);
    Eigen::JacobiSVD<ComplexMatrix> svd(detail::coupling_kernel(p));
    const Eigen::VectorXd s = svd.singularValues(); // descending
    const double floor =
        0.25 * relative_target * s.sum() / static_cast<double>(s.size());
    const double significant_min = std::max(s(s.size() - 1), floor);
    const double budget = 120.0 * s(0) / significant_min + 500.0;
    return static_cast<int>(std::min(budget, 3.0e6));
}

/// Random strictly-PD test problem: each matrix is A A^* + floor * I with A
/// standard-complex-normal. Seeded via the caller's stream so batch runs are
/// reproducible.
inline CouplingProblem make_random_problem(GaussianStream& rng, int m, double floor = 1e-8) {
    const auto random_pd = [&]() {
        ComplexMatrix a(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) a(i, j) = rng.complex_normal();
        const ComplexMatrix prod =
            a * a.adjoint() + floor * ComplexMatrix::Identity(m, m);
        return HermitianMatrix::from(prod);
    };
    CouplingProblem p{random_pd(), random_pd(), random_pd()};
    return p;
}

} // namespace psdot
