#include <doctest.h>

#include <cmath>

#include "hyplab/boundary.hpp"
#include "test_helpers.hpp"

using namespace hyplab;
using namespace hyplab::testutil;

TEST_CASE("gromov product at the disk center") {
    const MetricField g0 = MetricField::hyperbolic();
    // geodesic through the basepoint: product 0
    const BoundaryMeasurement diam = gromov_product(g0, {0.0, 0.0}, 0.4, 0.4 + kPi);
    CHECK(std::abs(diam.value) < 1e-6);
    CHECK(diam.converged);

    // closed form -log sin(gap/2) at the center
    for (const double gap : {0.8, 1.6, 2.6}) {
        const BoundaryMeasurement m = gromov_product(g0, {0.0, 0.0}, 0.3, 0.3 + gap);
        CHECK(m.value == doctest::Approx(-std::log(std::sin(0.5 * gap))).epsilon(2e-6));
    }
}

TEST_CASE("gromov product ladder is Cauchy with decaying increments") {
    const MetricField g = conformal_metric();
    const BoundaryMeasurement m = gromov_product(g, {0.1, 0.0}, 0.2, 0.2 + 2.4);
    REQUIRE(m.history.size() >= 3);
    for (std::size_t i = 2; i < m.history.size(); ++i) {
        const double inc1 = std::abs(m.history[i - 1].second - m.history[i - 2].second);
        const double inc2 = std::abs(m.history[i].second - m.history[i - 1].second);
        if (inc1 > 1e-9) CHECK(inc2 < 0.5 * inc1);
    }
}

TEST_CASE("gromov product unchanged when rays avoid the support") {
    const MetricField g = conformal_metric();   // support 0.5
    const MetricField g0 = MetricField::hyperbolic();
    const Vec2 x{0.8, 0.0};
    const double xi = 0.15, eta = -0.2;   // both rays head outward, away from the disk
    REQUIRE(hyp_ray_min_radius(x, xi) >= 0.5);
    REQUIRE(hyp_ray_min_radius(x, eta) >= 0.5);
    const double vg = gromov_product(g, x, xi, eta).value;
    const double v0 = gromov_product(g0, x, xi, eta).value;
    CHECK(vg == doctest::Approx(v0).epsilon(1e-6));
}

TEST_CASE("visual distances") {
    const MetricField g0 = MetricField::hyperbolic();
    const BoundaryMeasurement anti = visual_distance(g0, {0.0, 0.0}, 1.0, 1.0 + kPi);
    CHECK(anti.value == doctest::Approx(1.0).epsilon(1e-6));

    const BoundaryMeasurement quarter = visual_distance(g0, {0.0, 0.0}, 0.0, 0.5 * kPi);
    CHECK(quarter.value == doctest::Approx(std::sin(0.25 * kPi)).epsilon(1e-5));

    // symmetry under swapping the ideal points (perturbed metric)
    const MetricField g = conformal_metric();
    const double ab = visual_distance(g, {0.1, -0.05}, 0.7, 2.9).value;
    const double ba = visual_distance(g, {0.1, -0.05}, 2.9, 0.7).value;
    CHECK(std::abs(std::log(ab) - std::log(ba)) < 1e-9);
}

TEST_CASE("busemann limits") {
    const MetricField g = conformal_metric();
    // collinear: y at arclength s along the ray from x
    const Vec2 x{-0.2, 0.1};
    const double xi = 0.3;
    const GeodesicPath ray = ray_from(g, x, xi);
    const double s = 0.9;
    const Vec2 y = ray.state_at(s).x;
    const BoundaryMeasurement b = busemann(g, xi, x, y);
    CHECK(b.value == doctest::Approx(s).epsilon(2e-6));

    // x = y
    CHECK(busemann(g, xi, x, x).value == 0.0);

    // cocycle identity on random triples
    Rng rng(211);
    for (int i = 0; i < 3; ++i) {
        const Vec2 a = sample_point(rng, 1.5);
        const Vec2 bb = sample_point(rng, 1.5);
        const Vec2 c = sample_point(rng, 1.5);
        const double angle = rng.uniform(0.0, kTwoPi);
        const double bab = busemann(g, angle, a, bb).value;
        const double bbc = busemann(g, angle, bb, c).value;
        const double bac = busemann(g, angle, a, c).value;
        CHECK(std::abs(bab + bbc - bac) < 2e-6);
    }
}

TEST_CASE("cross-ratio preconditions and symmetries") {
    const MetricField g0 = MetricField::hyperbolic();
    CHECK_THROWS_AS(cross_ratio(g0, {0.0, 0.0}, 0.5, 0.5, 1.5, 2.5), Error);

    // basepoint invariance (visual metrics are Moebius equivalent)
    const double at_origin = cross_ratio(g0, {0.0, 0.0}, 0.2, 1.1, 2.4, 3.6).value;
    const double at_other = cross_ratio(g0, {0.25, -0.2}, 0.2, 1.1, 2.4, 3.6).value;
    CHECK(at_origin == doctest::Approx(at_other).epsilon(1e-5));

    // swapping xi<->xi2 and eta<->eta2 simultaneously leaves the value fixed
    const double swapped = cross_ratio(g0, {0.0, 0.0}, 1.1, 0.2, 3.6, 2.4).value;
    CHECK(at_origin == doctest::Approx(swapped).epsilon(1e-12));
}

TEST_CASE("conformal derivative of the identity") {
    const MetricField g0 = MetricField::hyperbolic();
    const BoundaryMeasurement one = conformal_derivative(g0, g0, 0.7, {0.1, 0.2}, {0.1, 0.2});
    CHECK(one.value == doctest::Approx(1.0).epsilon(1e-12));

    // base metric, two basepoints: derivative of visual metrics is exp(B)
    const Vec2 x{0.05, -0.1}, y{0.3, 0.25};
    for (const double xi : {0.5, 2.0, 4.4}) {
        const double df = conformal_derivative(g0, g0, xi, x, y).value;
        const double b = busemann(g0, xi, x, y).value;   // independent numerical limit
        CHECK(df == doctest::Approx(std::exp(b)).epsilon(1e-5));
    }
}

TEST_CASE("conformal derivative of a pullback deformation outside the support") {
    const MetricField g0 = MetricField::hyperbolic();
    const MetricField g = twist_metric();
    const Vec2 x{0.75, 0.1};   // outside the support disk
    const double df = conformal_derivative(g0, g, 1.9, x, x).value;
    CHECK(df == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("basepoint-change covariance of visual metrics") {
    const MetricField g = conformal_metric();
    const Vec2 x{0.0, 0.0}, y{0.2, -0.15};
    const double xi = 0.4, eta = 2.7;
    const double lx = std::log(visual_distance(g, x, xi, eta).value);
    const double ly = std::log(visual_distance(g, y, xi, eta).value);
    const double bx = busemann(g, xi, x, y).value;
    const double be = busemann(g, eta, x, y).value;
    CHECK(std::abs((ly - lx) - 0.5 * (bx + be)) < 2e-5);
}

TEST_CASE("geometric mean-value theorem for a Moebius boundary map") {
    const MetricField g0 = MetricField::hyperbolic();
    const MetricField g = twist_metric();
    const Vec2 x{0.0, 0.0};
    const double xi = 0.9, eta = 3.4;
    const double rho_g = visual_distance(g, x, xi, eta).value;
    const double rho_0 = visual_distance(g0, x, xi, eta).value;
    const double dfx = conformal_derivative(g0, g, xi, x, x).value;
    const double dfe = conformal_derivative(g0, g, eta, x, x).value;
    CHECK(rho_g * rho_g == doctest::Approx(dfx * dfe * rho_0 * rho_0).epsilon(1e-4));
}

TEST_CASE("moebius deviation separates pullbacks from conformal bumps") {
    const MetricField g0 = MetricField::hyperbolic();
    const auto quadruples = sample_quadruples(42, 8);

    const MoebiusReport pull = moebius_deviation(g0, twist_metric(), quadruples);
    CHECK(pull.max_deviation <= 1e-5);

    const MoebiusReport conf = moebius_deviation(g0, conformal_metric(0.05, 0.5), quadruples);
    CHECK(conf.max_deviation >= 10.0 * std::max(pull.max_deviation, 1e-6));
}
