#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "psdot/coupling.hpp"
#include "psdot/field.hpp"
#include "psdot/hellinger.hpp"
#include "psdot/random.hpp"
#include "support/demo_fields.hpp"
#include "support/field_gen.hpp"
#include "support/matrix_gen.hpp"

using namespace psdot;

namespace {

HermitianMatrix scalar_matrix(double v) {
    return HermitianMatrix::diagonal(Eigen::VectorXd::Constant(1, v));
}

PsdField constant_scalar_field(const FrequencyGrid& g, double v) {
    return PsdField::constant(g, scalar_matrix(v));
}

/// The expanded trace expression the norm-form implementation must match.
double three_trace_cost(const HermitianMatrix& x, const HermitianMatrix& y,
                        const HermitianMatrix& w) {
    const double tx = (w.mat() * x.mat()).trace().real();
    const double ty = (w.mat() * y.mat()).trace().real();
    const ComplexMatrix ys = sqrt_psd(y).mat();
    const ComplexMatrix inner = ys * w.mat() * x.mat() * w.mat() * ys;
    const double ts = sqrt_psd(HermitianMatrix::from(inner)).trace();
    return tx + ty - 2.0 * ts;
}

} // namespace

TEST_CASE("pointwise_cost: frozen values") {
    SECTION("scalar 1 vs 4 with weight 2") {
        const double c = pointwise_cost(scalar_matrix(1.0), scalar_matrix(4.0), scalar_matrix(2.0));
        CHECK(c == Catch::Approx(2.0).margin(1e-12));
    }
    SECTION("commuting diagonal pair, identity weight") {
        const double c = pointwise_cost(HermitianMatrix::identity(2),
                                        HermitianMatrix::diagonal(Eigen::Vector2d(4.0, 9.0)),
                                        HermitianMatrix::identity(2));
        CHECK(c == Catch::Approx(5.0).margin(1e-12));
    }
    SECTION("a spectrum against itself costs nothing") {
        GaussianStream rng(11);
        for (int i = 0; i < 10; ++i) {
            const HermitianMatrix a = testgen::random_pd(rng, 3);
            const HermitianMatrix w = testgen::random_pd(rng, 3);
            CHECK(pointwise_cost(a, a, HermitianMatrix::identity(3)) <= 1e-12);
            CHECK(pointwise_cost(a, a, w) <= 1e-12);
        }
    }
    SECTION("dimension mismatch") {
        CHECK_THROWS_AS(pointwise_cost(HermitianMatrix::identity(2), HermitianMatrix::identity(3),
                                       HermitianMatrix::identity(2)),
                        ShapeError);
    }
}

TEST_CASE("pointwise_cost: norm form equals the trace expression") {
    GaussianStream rng(22);
    for (int m : {1, 2, 3}) {
        for (int i = 0; i < 10; ++i) {
            const HermitianMatrix x = testgen::random_pd(rng, m);
            const HermitianMatrix y = testgen::random_pd(rng, m);
            const HermitianMatrix w = testgen::random_pd(rng, m);
            const double cost = pointwise_cost(x, y, w);
            const double expanded = three_trace_cost(x, y, w);
            const double scale = std::max(1.0, std::abs(expanded));
            CHECK(std::abs(cost - expanded) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("pointwise_cost: nuclear-norm lower bound") {
    // cost >= (sqrt(tr(O*Px)) - sqrt(tr(O*Py)))^2 since the cross term is at
    // most sqrt(tr(O*Px) * tr(O*Py)).
    GaussianStream rng(33);
    for (int i = 0; i < 25; ++i) {
        const HermitianMatrix x = testgen::random_pd(rng, 2, 0.1);
        const HermitianMatrix y = testgen::random_pd(rng, 2, 0.1);
        const HermitianMatrix w = testgen::random_pd(rng, 2, 0.1);
        const double tx = (w.mat() * x.mat()).trace().real();
        const double ty = (w.mat() * y.mat()).trace().real();
        const double bound = std::pow(std::sqrt(tx) - std::sqrt(ty), 2);
        CHECK(pointwise_cost(x, y, w) >= bound - 1e-9);
    }
}

TEST_CASE("hellinger_distance: basic contract") {
    FrequencyGrid g({4, 4}, DomainKind::ContinuousQuadrature);

    SECTION("distance to itself is zero") {
        GaussianStream rng(44);
        PsdField phi = testgen::random_coercive_field(rng, g, 2);
        const DistanceResult r = hellinger_distance(phi, phi);
        CHECK(r.distance <= 1e-12);
    }

    SECTION("constant scalar fields 1 and 4") {
        const DistanceResult r =
            hellinger_distance(constant_scalar_field(g, 1.0), constant_scalar_field(g, 4.0));
        CHECK(r.squared == Catch::Approx(1.0).margin(1e-12));
        CHECK(r.distance == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("result invariants: reduction identity and clamped costs") {
        GaussianStream rng(55);
        PsdField a = testgen::random_coercive_field(rng, g, 2);
        PsdField b = testgen::random_coercive_field(rng, g, 2);
        const DistanceResult r = hellinger_distance(a, b);
        REQUIRE(r.pointwise_cost.size() == g.point_count());
        double sum = 0.0;
        for (double c : r.pointwise_cost) {
            CHECK(c >= 0.0);
            sum += c;
        }
        CHECK(r.squared == g.weight() * sum);
        CHECK(r.distance == std::sqrt(r.squared));
    }

    SECTION("grid mismatch is rejected") {
        FrequencyGrid other({2, 2}, DomainKind::ContinuousQuadrature);
        CHECK_THROWS_AS(hellinger_distance(constant_scalar_field(g, 1.0),
                                           constant_scalar_field(other, 1.0)),
                        ShapeError);
    }

    SECTION("shipped fields: squared distance stable under grid doubling") {
        FrequencyGrid g64({64, 64}, DomainKind::ContinuousQuadrature);
        FrequencyGrid g128({128, 128}, DomainKind::ContinuousQuadrature);
        const double d64 = hellinger_distance(testgen::demo_psd(0, g64),
                                              testgen::demo_psd(1, g64)).squared;
        const double d128 = hellinger_distance(testgen::demo_psd(0, g128),
                                               testgen::demo_psd(1, g128)).squared;
        CHECK(d64 > 0.0);
        CHECK(std::abs(d64 - d128) / d128 < 0.01);
    }
}

TEST_CASE("weighted_hellinger_distance") {
    FrequencyGrid g({4, 4}, DomainKind::ContinuousQuadrature);
    GaussianStream rng(66);
    PsdField a = testgen::random_coercive_field(rng, g, 2);
    PsdField b = testgen::random_coercive_field(rng, g, 2);

    SECTION("identity weight reduces to the unweighted distance") {
        WeightField eye = PsdField::constant(g, HermitianMatrix::identity(2));
        const DistanceResult rw = weighted_hellinger_distance(a, b, eye);
        const DistanceResult ru = hellinger_distance(a, b);
        CHECK(std::abs(rw.squared - ru.squared) <= 1e-12);
        CHECK(std::abs(rw.distance - ru.distance) <= 1e-12);
        CHECK(rw.weighted);
        CHECK_FALSE(ru.weighted);
    }

    SECTION("constant fields recover the scalar pointwise example") {
        const DistanceResult r = weighted_hellinger_distance(
            constant_scalar_field(g, 1.0), constant_scalar_field(g, 4.0),
            PsdField::constant(g, scalar_matrix(2.0)));
        CHECK(r.squared == Catch::Approx(2.0).margin(1e-12));
    }

    SECTION("squared distance equals the averaged per-point coupling optima") {
        WeightField omega = testgen::random_coercive_field(rng, g, 2);
        const DistanceResult r = weighted_hellinger_distance(a, b, omega);
        double sum = 0.0;
        for (std::size_t p = 0; p < g.point_count(); ++p) {
            const CouplingProblem problem{a.value(p), b.value(p), omega.value(p)};
            const double tx = (omega.value(p).mat() * a.value(p).mat()).trace().real();
            const double ty = (omega.value(p).mat() * b.value(p).mat()).trace().real();
            sum += tx + ty - closed_form_coupling(problem).objective;
        }
        CHECK(std::abs(r.squared - g.weight() * sum) <= 1e-10);
    }

    SECTION("indefinite weight is rejected") {
        std::vector<HermitianMatrix> values(g.point_count(), HermitianMatrix::identity(2));
        values[3] = HermitianMatrix::diagonal(Eigen::Vector2d(1.0, -1.0));
        CHECK_THROWS_AS(weighted_hellinger_distance(a, b, PsdField(g, 2, values)),
                        NotCoerciveError);
    }
}

TEST_CASE("metric properties on random fields") {
    FrequencyGrid g({4, 4}, DomainKind::ContinuousQuadrature);
    GaussianStream rng(77);

    SECTION("symmetry within 1e-10 relative") {
        for (int i = 0; i < 5; ++i) {
            PsdField a = testgen::random_coercive_field(rng, g, 2);
            PsdField b = testgen::random_coercive_field(rng, g, 2);
            WeightField w = testgen::random_coercive_field(rng, g, 2);
            const double ab = hellinger_distance(a, b).squared;
            const double ba = hellinger_distance(b, a).squared;
            CHECK(std::abs(ab - ba) <= 1e-10 * std::max(1.0, ab));
            const double wab = weighted_hellinger_distance(a, b, w).squared;
            const double wba = weighted_hellinger_distance(b, a, w).squared;
            CHECK(std::abs(wab - wba) <= 1e-10 * std::max(1.0, wab));
        }
    }

    SECTION("identity of indiscernibles, both directions") {
        PsdField a = testgen::random_coercive_field(rng, g, 2);
        // Perturb by 1e-9 in max norm: distance must stay below 1e-8.
        std::vector<HermitianMatrix> perturbed;
        for (std::size_t p = 0; p < a.size(); ++p) {
            HermitianMatrix noise = testgen::random_hermitian(rng, 2);
            const ComplexMatrix bump = (1e-9 / noise.max_abs()) * noise.mat();
            perturbed.push_back(HermitianMatrix::from(a.value(p).mat() + bump));
        }
        const double d_close = hellinger_distance(a, PsdField(g, 2, perturbed)).distance;
        CHECK(d_close <= 1e-8);

        // A genuinely different field must land far above the threshold.
        PsdField b = testgen::random_coercive_field(rng, g, 2);
        CHECK(hellinger_distance(a, b).distance > 1e-8);
    }

    SECTION("triangle inequality, unweighted and weighted") {
        for (int i = 0; i < 5; ++i) {
            PsdField a = testgen::random_coercive_field(rng, g, 2);
            PsdField b = testgen::random_coercive_field(rng, g, 2);
            PsdField c = testgen::random_coercive_field(rng, g, 2);
            CHECK(hellinger_distance(a, c).distance <=
                  hellinger_distance(a, b).distance + hellinger_distance(b, c).distance + 1e-9);
            WeightField w = testgen::random_coercive_field(rng, g, 2);
            CHECK(weighted_hellinger_distance(a, c, w).distance <=
                  weighted_hellinger_distance(a, b, w).distance +
                      weighted_hellinger_distance(b, c, w).distance + 1e-9);
        }
    }
}
