#include <doctest.h>

#include <cmath>

#include "hyplab/geometry_ops.hpp"
#include "hyplab/quad.hpp"
#include "test_helpers.hpp"

using namespace hyplab;
using namespace hyplab::testutil;

TEST_CASE("base metric values") {
    const MetricField g0 = MetricField::hyperbolic();
    const Sym2 at0 = g0.value({0.0, 0.0});
    CHECK(at0.xx == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(at0.yy == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(at0.xy == 0.0);

    const Sym2 at_half = g0.value({0.5, 0.0});
    CHECK(at_half.xx == doctest::Approx(64.0 / 9.0).epsilon(1e-14));

    CHECK_THROWS_AS(g0.value({1.0, 0.0}), PointOutsideChart);
}

TEST_CASE("perturbed metric equals base outside the support, bit-exact") {
    for (const MetricField& g : {conformal_metric(), anisotropic_metric(), twist_metric(),
                                 potential_metric()}) {
        Rng rng(7);
        for (int i = 0; i < 50; ++i) {
            const double r = rng.uniform(g.support_radius(), 0.97);
            const double th = rng.uniform(0.0, kTwoPi);
            const Vec2 p{r * std::cos(th), r * std::sin(th)};
            const Sym2 a = g.value(p);
            const Sym2 b = MetricField::hyperbolic().value(p);
            CHECK(a.xx == b.xx);
            CHECK(a.xy == b.xy);
            CHECK(a.yy == b.yy);
        }
    }
}

TEST_CASE("metric positive definite at random points") {
    Rng rng(11);
    for (const MetricField& g : {conformal_metric(), anisotropic_metric(), twist_metric(),
                                 potential_metric()}) {
        for (int i = 0; i < 200; ++i) {
            const double r = rng.uniform(0.0, 0.9);
            const double th = rng.uniform(0.0, kTwoPi);
            CHECK(g.value({r * std::cos(th), r * std::sin(th)}).positive_definite());
        }
    }
}

TEST_CASE("christoffel symbols of the base metric") {
    const MetricField g0 = MetricField::hyperbolic();
    const auto at0 = christoffel(g0, {0.0, 0.0});
    for (int k = 0; k < 2; ++k) CHECK(max_abs(at0[k]) < 1e-14);

    // Gamma^1_{11} = d_1 log(lambda) = 2x/(1-|x|^2) = 4/3 at (0.5, 0)
    const auto at_half = christoffel(g0, {0.5, 0.0});
    CHECK(at_half[0].xx == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("analytic jets match central differences with second-order decay") {
    struct Case {
        const char* name;
        SymTensorField f;
    };
    const Case cases[] = {
        {"conformal", SymTensorField::conformal_bump(0.05, 0.5)},
        {"traceless", SymTensorField::traceless_bump(0.02, 0.5)},
        {"twist", SymTensorField::twist_pullback_minus_base(0.4, 0.5, 0.7)},
        {"twist velocity", SymTensorField::twist_velocity(0.4, 0.5, 0.7)},
        {"potential", sym_derivative(MetricField::hyperbolic(), test_form())},
    };
    Rng rng(3);
    for (const auto& c : cases) {
        CAPTURE(c.name);
        for (int i = 0; i < 20; ++i) {
            const double r = rng.uniform(0.0, 0.45);
            const double th = rng.uniform(0.0, kTwoPi);
            const Vec2 p{r * std::cos(th), r * std::sin(th)};
            const TensorJet jet = c.f.jet(p);
            auto fd_err = [&](double h) {
                double worst = 0.0;
                for (int k = 0; k < 2; ++k) {
                    Vec2 pp = p, pm = p;
                    (k == 0 ? pp.x : pp.y) += h;
                    (k == 0 ? pm.x : pm.y) -= h;
                    const Sym2 fd = (c.f.value(pp) - c.f.value(pm)) * (1.0 / (2.0 * h));
                    worst = std::max(worst, max_abs(fd - jet.partial(k)));
                }
                return worst;
            };
            const double e1 = fd_err(1e-3);
            const double e2 = fd_err(5e-4);
            if (e1 > 1e-10)   // below that, roundoff dominates
                CHECK(e1 / e2 > 3.5);
            else
                CHECK(e2 < 1e-9);
        }
    }
}

TEST_CASE("metric family velocity matches finite differences in t") {
    const MetricFamily family = MetricFamily::twist(0.4, 0.5);
    Rng rng(5);
    for (int i = 0; i < 10; ++i) {
        const double t = rng.uniform(0.1, 0.9);
        const double r = rng.uniform(0.0, 0.45);
        const double th = rng.uniform(0.0, kTwoPi);
        const Vec2 p{r * std::cos(th), r * std::sin(th)};
        const Sym2 vel = family.velocity(t).value(p);
        auto fd = [&](double dt) {
            return (family.at(t + dt).value(p) - family.at(t - dt).value(p)) * (1.0 / (2.0 * dt));
        };
        const double e1 = max_abs(fd(1e-3) - vel);
        const double e2 = max_abs(fd(5e-4) - vel);
        if (e1 > 1e-11)
            CHECK(e1 / e2 > 3.5);
        else
            CHECK(e2 < 1e-10);
    }
}

TEST_CASE("gaussian curvature of the base metric is -1") {
    const MetricField g0 = MetricField::hyperbolic();
    Rng rng(17);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double r = rng.uniform(0.0, 0.9);
        const double th = rng.uniform(0.0, kTwoPi);
        worst = std::max(worst,
                         std::abs(gaussian_curvature(g0, {r * std::cos(th), r * std::sin(th)}) + 1.0));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("curvature outside the support is -1") {
    const MetricField g = conformal_metric();
    Rng rng(19);
    for (int i = 0; i < 100; ++i) {
        const double r = rng.uniform(0.55, 0.9);
        const double th = rng.uniform(0.0, kTwoPi);
        CHECK(std::abs(gaussian_curvature(g, {r * std::cos(th), r * std::sin(th)}) + 1.0) < 1e-8);
    }
}

TEST_CASE("curvature of a conformal bump against the conformal formula") {
    // independent oracle: K = exp(-2u) (-1 - Lap_{g0} u), u = log(1+eps psi)/2,
    // with the Laplacian evaluated by central differences of u alone
    const double eps = 0.05, r0 = 0.5;
    const MetricField g = conformal_metric(eps, r0);
    auto u = [&](Vec2 p) { return 0.5 * std::log(1.0 + eps * bump_value(p, {}, r0)); };
    Rng rng(23);
    for (int i = 0; i < 40; ++i) {
        const double r = rng.uniform(0.0, 0.48);
        const double th = rng.uniform(0.0, kTwoPi);
        const Vec2 p{r * std::cos(th), r * std::sin(th)};
        const double h = 1e-4;
        const double lap_e = (u({p.x + h, p.y}) + u({p.x - h, p.y}) + u({p.x, p.y + h}) +
                              u({p.x, p.y - h}) - 4.0 * u(p)) /
                             (h * h);
        const double lam2 = hyp_lambda(p) * hyp_lambda(p);
        const double expected = std::exp(-2.0 * u(p)) * (-1.0 - lap_e / lam2);
        CHECK(gaussian_curvature(g, p) == doctest::Approx(expected).epsilon(5e-6));
    }
}

TEST_CASE("twist pullback has curvature exactly -1") {
    const MetricField g = twist_metric(0.5, 0.5, 0.8);
    Rng rng(29);
    for (int i = 0; i < 60; ++i) {
        const double r = rng.uniform(0.0, 0.48);
        const double th = rng.uniform(0.0, kTwoPi);
        CHECK(std::abs(gaussian_curvature(g, {r * std::cos(th), r * std::sin(th)}) + 1.0) < 1e-7);
    }
}

TEST_CASE("curvature bound verdicts") {
    CHECK(curvature_scan(MetricField::hyperbolic(), 24, 1e-6).pass);
    CHECK(curvature_scan(twist_metric(), 24, 1e-6).pass);
    // a tiny conformal bump passes at a loose margin, a large one violates
    CHECK(curvature_scan(conformal_metric(1e-4, 0.5), 24, 1e-2).pass);
    const CurvatureReport bad = curvature_scan(conformal_metric(0.4, 0.5), 24, 1e-2);
    CHECK(!bad.pass);
    CHECK_THROWS_AS(verify_curvature_bound(conformal_metric(0.4, 0.5), 24, 1e-2),
                    HypothesisViolation);
}

TEST_CASE("sym derivative: zero form, support propagation") {
    const MetricField g0 = MetricField::hyperbolic();
    const SymTensorField zero = sym_derivative(g0, OneFormField::zero());
    CHECK(max_abs(zero.value({0.1, 0.2})) == 0.0);

    const SymTensorField dv = sym_derivative(g0, test_form());
    Rng rng(31);
    for (int i = 0; i < 50; ++i) {
        const double r = rng.uniform(dv.support_radius(), 0.95);
        const double th = rng.uniform(0.0, kTwoPi);
        CHECK(max_abs(dv.value({r * std::cos(th), r * std::sin(th)})) == 0.0);
    }
}

TEST_CASE("fundamental theorem of calculus along a geodesic chord") {
    // int (d v)(gdot, gdot) ds = 2 [v(gdot)] between the endpoints
    const MetricField g0 = MetricField::hyperbolic();
    const OneFormField v = test_form();
    const SymTensorField dv = sym_derivative(g0, v);

    const Vec2 start{-0.25, 0.07};
    const Vec2 dir0 = hyp_unit_velocity(start, 0.3);
    const GeodesicPath path = integrate_ivp(g0, start, dir0, 0.8);

    auto integrand = [&](double s) {
        const GeoState st = path.state_at(s);
        return dv.value(st.x).quad(st.v);
    };
    const double lhs = simpson_along(integrand, 0.0, 0.8, 400);

    auto vdot = [&](double s) {
        const GeoState st = path.state_at(s);
        return dot(v.value(st.x), st.v);
    };
    const double rhs = 2.0 * (vdot(0.8) - vdot(0.0));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-7));
}

TEST_CASE("divergence is L2-adjoint to the symmetric derivative") {
    Rng rng(37);
    for (const MetricField& g : {MetricField::hyperbolic(), conformal_metric(), twist_metric()}) {
        for (int i = 0; i < 7; ++i) {
            const OneFormField v = sample_bump_form(rng.next(), 0.45, 0.05);
            SymTensorField f = SymTensorField::conformal_bump(rng.uniform(-0.05, 0.05), 0.45);
            if (i % 2 == 1) f = SymTensorField::traceless_bump(rng.uniform(-0.05, 0.05), 0.4);
            const double lhs = l2_inner(g, sym_derivative(g, v), f, 0.6, 256, 512);
            const double rhs = form_l2_inner(g, v, divergence(g, f), 0.6, 256, 512);
            CHECK(std::abs(lhs - rhs) < 1e-8);   // quadrature floor at 256x512
        }
    }
}

TEST_CASE("divergence of a symmetric derivative matches nested finite differences") {
    const MetricField g0 = MetricField::hyperbolic();
    const OneFormField v = test_form();
    const SymTensorField dv = sym_derivative(g0, v);
    const OneFormField ddv = divergence(g0, dv);

    // independent evaluation: delta f at p with partial_i f via half-step
    // central differences of tensor values only
    auto delta_fd = [&](Vec2 p) {
        const double h = 5e-6;
        TensorJet fj;
        fj.value = dv.value(p);
        fj.d1 = (dv.value({p.x + h, p.y}) - dv.value({p.x - h, p.y})) * (1.0 / (2.0 * h));
        fj.d2 = (dv.value({p.x, p.y + h}) - dv.value({p.x, p.y - h})) * (1.0 / (2.0 * h));
        return divergence_at(g0, fj, p);
    };
    Rng rng(41);
    for (int i = 0; i < 20; ++i) {
        const double r = rng.uniform(0.0, 0.4);
        const double th = rng.uniform(0.0, kTwoPi);
        const Vec2 p{r * std::cos(th), r * std::sin(th)};
        const Vec2 a = ddv.value(p);
        const Vec2 b = delta_fd(p);
        CHECK(a.x == doctest::Approx(b.x).epsilon(1e-5).scale(0.1));
        CHECK(a.y == doctest::Approx(b.y).epsilon(1e-5).scale(0.1));
    }
}

TEST_CASE("volume of hyperbolic balls matches the closed form") {
    const MetricField g0 = MetricField::hyperbolic();
    for (const double r : {0.3, 0.5, 0.7, 0.9}) {
        const double R = 2.0 * std::atanh(r);
        const double expected = kTwoPi * (std::cosh(R) - 1.0);
        const VolumeResult vol = volume(g0, r);
        CHECK(vol.value == doctest::Approx(expected).epsilon(1e-6));
        CHECK(vol.error_estimate < 1e-6 * expected);
    }
}

TEST_CASE("pullback metrics preserve volume") {
    const VolumeResult v0 = volume(MetricField::hyperbolic(), 0.7);
    const VolumeResult v1 = volume(twist_metric(0.5, 0.5, 1.0), 0.7);
    CHECK(v1.value == doctest::Approx(v0.value).epsilon(1e-12));
}

TEST_CASE("area element scales with the determinant") {
    // doubling g multiplies sqrt(det) by 2 in dimension 2
    const MetricField g = conformal_metric();
    DiskRule rule(0.6, 48, 96);
    double a1 = 0.0, a2 = 0.0;
    for (const auto& n : rule.nodes) {
        const Vec2 p{n.r * std::cos(n.theta), n.r * std::sin(n.theta)};
        const Sym2 m = g.value(p);
        a1 += n.weight * std::sqrt(m.det());
        a2 += n.weight * std::sqrt((m * 2.0).det());
    }
    CHECK(a2 == doctest::Approx(2.0 * a1).epsilon(1e-13));
}

TEST_CASE("l2 inner product identities") {
    const MetricField g0 = MetricField::hyperbolic();
    const SymTensorField f = SymTensorField::traceless_bump(0.03, 0.5);
    const SymTensorField h = SymTensorField::conformal_bump(0.02, 0.4);

    CHECK(l2_inner(g0, SymTensorField::zero(), f, 0.6) == 0.0);

    // (g0, f) = int tr_{g0} f dVol, by direct trace quadrature
    const double lhs = l2_inner(g0, SymTensorField::metric_tensor(g0), h, 0.6);
    DiskRule rule(0.6, 128, 256);
    double rhs = 0.0;
    for (const auto& n : rule.nodes) {
        const Vec2 p{n.r * std::cos(n.theta), n.r * std::sin(n.theta)};
        const Sym2 g = g0.value(p);
        const Sym2 ginv = g.inverse();
        const Sym2 hv = h.value(p);
        const double tr = ginv.xx * hv.xx + 2.0 * ginv.xy * hv.xy + ginv.yy * hv.yy;
        rhs += n.weight * std::sqrt(g.det()) * tr;
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

    // symmetry
    const double ab = l2_inner(g0, f, h, 0.6, 64, 128);
    const double ba = l2_inner(g0, h, f, 0.6, 64, 128);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-13));
}
