#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "psdot/coupling.hpp"
#include "psdot/hermlin.hpp"
#include "psdot/random.hpp"
#include "support/matrix_gen.hpp"

using namespace psdot;

namespace {

CouplingProblem identity_problem(int m) {
    return CouplingProblem{HermitianMatrix::identity(m), HermitianMatrix::identity(m),
                           HermitianMatrix::identity(m)};
}

CouplingProblem diagonal_problem() {
    return CouplingProblem{HermitianMatrix::diagonal(Eigen::Vector2d(1.0, 4.0)),
                           HermitianMatrix::diagonal(Eigen::Vector2d(9.0, 16.0)),
                           HermitianMatrix::identity(2)};
}

} // namespace

TEST_CASE("closed_form_coupling: frozen values") {
    SECTION("identity everything") {
        const CouplingSolution sol = closed_form_coupling(identity_problem(2));
        CHECK(max_abs(ComplexMatrix(sol.cross_spectrum - ComplexMatrix::Identity(2, 2))) <=
              1e-12);
        CHECK(sol.objective == Catch::Approx(4.0).margin(1e-12));
        CHECK(sol.feasible);
    }

    SECTION("commuting diagonal case") {
        const CouplingSolution sol = closed_form_coupling(diagonal_problem());
        ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
        expected(0, 0) = Complex(3.0, 0.0);
        expected(1, 1) = Complex(8.0, 0.0);
        CHECK(max_abs(ComplexMatrix(sol.cross_spectrum - expected)) <= 1e-12);
        CHECK(sol.objective == Catch::Approx(22.0).margin(1e-12));
        CHECK(sol.feasible);
    }

    SECTION("objective equals twice the nuclear norm of the kernel") {
        GaussianStream rng(111);
        for (int m : {2, 3}) {
            for (int i = 0; i < 10; ++i) {
                CouplingProblem p = make_random_problem(rng, m);
                const CouplingSolution sol = closed_form_coupling(p);
                const ComplexMatrix kernel =
                    sqrt_psd(p.phi_y).mat() * p.omega.mat() * sqrt_psd(p.phi_x).mat();
                CHECK(std::abs(sol.objective - 2.0 * nuclear_norm(kernel)) <=
                      1e-10 * std::max(1.0, sol.objective));
                CHECK(sol.feasible);
            }
        }
    }

    SECTION("indefinite input is rejected") {
        CouplingProblem p = identity_problem(2);
        p.phi_x = HermitianMatrix::diagonal(Eigen::Vector2d(1.0, -1.0));
        CHECK_THROWS_AS(closed_form_coupling(p), NotCoerciveError);
    }
}

TEST_CASE("brute_force_coupling: known optima") {
    SECTION("identity problem reaches 2m within 500 iterations") {
        for (std::uint64_t seed : {0ULL, 7ULL, 123ULL}) {
            const CouplingSolution sol = brute_force_coupling(identity_problem(2), seed, 500);
            CHECK(std::abs(sol.objective - 4.0) <= 1e-8);
            CHECK(sol.feasible);
        }
    }

    SECTION("scalar problems are solved to round-off") {
        GaussianStream rng(222);
        for (int i = 0; i < 5; ++i) {
            CouplingProblem p = make_random_problem(rng, 1);
            const CouplingSolution sol = brute_force_coupling(p, 9, 500);
            CHECK(std::abs(sol.gap_to_closed_form) <= 1e-10);
        }
    }

    SECTION("diagonal case reaches 22 within 1e-6") {
        const CouplingSolution sol = brute_force_coupling(diagonal_problem(), 1, 5000);
        CHECK(std::abs(sol.objective - 22.0) <= 1e-6);
    }

    SECTION("iteration count must be positive") {
        CHECK_THROWS_AS(brute_force_coupling(identity_problem(2), 0, 0), Error);
    }
}

TEST_CASE("brute_force_coupling: ascent is monotone and bounded by the closed form") {
    GaussianStream rng(333);
    for (int i = 0; i < 5; ++i) {
        CouplingProblem p = make_random_problem(rng, 2);
        std::vector<double> history;
        const CouplingSolution sol =
            brute_force_coupling(p, static_cast<std::uint64_t>(i), 2000, &history);
        REQUIRE(history.size() == 2001);
        for (std::size_t t = 1; t < history.size(); ++t)
            CHECK(history[t] >= history[t - 1] - 1e-9);
        const double closed = closed_form_coupling(p).objective;
        CHECK(sol.objective <= closed + 1e-8);
        CHECK(sol.gap_to_closed_form >= -1e-8);
    }
}

TEST_CASE("brute_force_coupling: 200 seeded instances match the closed form") {
    GaussianStream rng(4242);
    double max_relative_gap = 0.0;
    for (int i = 0; i < 200; ++i) {
        const int m = i % 2 == 0 ? 2 : 3;
        CouplingProblem p = make_random_problem(rng, m);
        const int iters = suggested_iterations(p);
        const CouplingSolution sol =
            brute_force_coupling(p, static_cast<std::uint64_t>(1000 + i), iters);
        const double closed = closed_form_coupling(p).objective;
        max_relative_gap = std::max(max_relative_gap, std::abs(sol.gap_to_closed_form) / closed);
    }
    CHECK(max_relative_gap <= 1e-6);
}

TEST_CASE("check_feasibility") {
    GaussianStream rng(444);

    SECTION("zero cross spectrum is always feasible") {
        const HermitianMatrix x = testgen::random_pd(rng, 2);
        const HermitianMatrix y = testgen::random_pd(rng, 2);
        const FeasibilityReport rep = check_feasibility(x, y, ComplexMatrix::Zero(2, 2));
        CHECK(rep.feasible);
        CHECK(rep.tests_agree);
    }

    SECTION("frozen infeasible witness: identity pair with doubled coupling") {
        const FeasibilityReport rep =
            check_feasibility(HermitianMatrix::identity(2), HermitianMatrix::identity(2),
                              ComplexMatrix(2.0 * ComplexMatrix::Identity(2, 2)));
        CHECK_FALSE(rep.feasible);
        CHECK(rep.schur_lambda_min == Catch::Approx(-3.0).margin(1e-12));
        CHECK(rep.tests_agree);
    }

    SECTION("singular second marginal is rejected") {
        CHECK_THROWS_AS(check_feasibility(HermitianMatrix::identity(2),
                                          HermitianMatrix::diagonal(Eigen::Vector2d(1.0, 0.0)),
                                          ComplexMatrix::Zero(2, 2)),
                        NotCoerciveError);
    }

    SECTION("contraction parameterization: inside the ball is feasible, outside is not") {
        for (int i = 0; i < 20; ++i) {
            const HermitianMatrix x = testgen::random_pd(rng, 2);
            const HermitianMatrix y = testgen::random_pd(rng, 2);
            ComplexMatrix k = testgen::random_complex(rng, 2, 2);
            Eigen::JacobiSVD<ComplexMatrix> svd(k);
            const double norm = svd.singularValues()(0);

            const ComplexMatrix inside =
                sqrt_psd(x).mat() * (k / std::max(norm, 1.0)) * sqrt_psd(y).mat();
            CHECK(check_feasibility(x, y, inside).feasible);

            for (double eps : {1e-4, 1e-2, 0.5}) {
                const ComplexMatrix outside =
                    sqrt_psd(x).mat() * (k * ((1.0 + eps) / norm)) * sqrt_psd(y).mat();
                CHECK_FALSE(check_feasibility(x, y, outside).feasible);
            }
        }
    }

    SECTION("Schur and block verdicts agree on 1000 random instances") {
        for (int i = 0; i < 1000; ++i) {
            const HermitianMatrix x = testgen::random_pd(rng, 2);
            const HermitianMatrix y = testgen::random_pd(rng, 2);
            // Cover both sides of the boundary: scale the contraction across
            // operator norms from 0.5 to 1.5.
            ComplexMatrix k = testgen::random_complex(rng, 2, 2);
            Eigen::JacobiSVD<ComplexMatrix> svd(k);
            const double target = 0.5 + rng.uniform();
            k *= target / svd.singularValues()(0);
            const ComplexMatrix xy = sqrt_psd(x).mat() * k * sqrt_psd(y).mat();
            CHECK(check_feasibility(x, y, xy).tests_agree);
        }
    }
}

TEST_CASE("closed-form objective is monotone in the weight") {
    GaussianStream rng(555);
    for (int i = 0; i < 10; ++i) {
        CouplingProblem p = make_random_problem(rng, 2);
        const double base = closed_form_coupling(p).objective;
        for (double c : {0.1, 1.0}) {
            CouplingProblem bumped = p;
            bumped.omega = HermitianMatrix::from(
                p.omega.mat() + c * ComplexMatrix::Identity(2, 2));
            CHECK(closed_form_coupling(bumped).objective >= base - 1e-10);
        }
    }
}

TEST_CASE("make_random_problem is deterministic and strictly positive definite") {
    GaussianStream rng_a(999);
    GaussianStream rng_b(999);
    const CouplingProblem p = make_random_problem(rng_a, 3);
    const CouplingProblem q = make_random_problem(rng_b, 3);
    CHECK(max_abs(ComplexMatrix(p.phi_x.mat() - q.phi_x.mat())) == 0.0);
    CHECK(max_abs(ComplexMatrix(p.omega.mat() - q.omega.mat())) == 0.0);
    for (const HermitianMatrix* h : {&p.phi_x, &p.phi_y, &p.omega})
        CHECK(eigenvalues_hermitian(*h)(0) > 0.0);
}
