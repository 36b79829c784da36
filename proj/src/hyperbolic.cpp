#include "hyplab/hyperbolic.hpp"

#include <cmath>

namespace hyplab {

namespace {

using cdouble = std::complex<double>;

// disk automorphism sending p to 0: T_p(z) = (z - p) / (1 - conj(p) z).
// Its derivative at p is the positive real number 1/(1-|p|^2), so chart
// direction angles at p are preserved by the normalization.
cdouble mobius_to_origin(cdouble p, cdouble z) { return (z - p) / (1.0 - std::conj(p) * z); }
// inverse map: M_p(w) = (w + p) / (1 + conj(p) w)
cdouble mobius_from_origin(cdouble p, cdouble w) { return (w + p) / (1.0 + std::conj(p) * w); }

} // namespace

double hyp_distance(Vec2 p, Vec2 q) {
    const double num = (p - q).norm2();
    const double den = (1.0 - p.norm2()) * (1.0 - q.norm2());
    return 2.0 * std::asinh(std::sqrt(num / den));
}

double hyp_dir_toward_point(Vec2 p, Vec2 q) {
    return std::arg(mobius_to_origin(to_complex(p), to_complex(q)));
}

double hyp_dir_toward_ideal(Vec2 p, double xi) {
    const cdouble boundary = std::polar(1.0, xi);
    return std::arg(mobius_to_origin(to_complex(p), boundary));
}

double hyp_ideal_angle(Vec2 p, double dir) {
    const cdouble w = std::polar(1.0, dir);
    return canonical_angle(std::arg(mobius_from_origin(to_complex(p), w)));
}

GeoState hyp_state_at(Vec2 p, double dir, double s) {
    const cdouble pc = to_complex(p);
    const cdouble e = std::polar(1.0, dir);
    const double t = std::tanh(0.5 * s);
    const cdouble w = t * e;
    const cdouble denom = 1.0 + std::conj(pc) * w;
    const cdouble z = (w + pc) / denom;
    // dz/ds = M_p'(w) w'(s), with M_p'(w) = (1-|p|^2)/(1+conj(p)w)^2 and
    // w'(s) = e / (2 cosh^2(s/2))
    const double sech2 = 1.0 / (std::cosh(0.5 * s) * std::cosh(0.5 * s));
    const cdouble dz = (1.0 - std::norm(pc)) / (denom * denom) * e * (0.5 * sech2);
    return {to_vec(z), to_vec(dz)};
}

Vec2 hyp_unit_velocity(Vec2 p, double dir) {
    const double lam = 2.0 / (1.0 - p.norm2());
    return unit_from_angle(dir) * (1.0 / lam);
}

namespace {
// Busemann function normalized to vanish at the origin:
// b_xi(z) = log(|xi - z|^2 / (1 - |z|^2)), decreasing toward xi at unit rate.
double busemann_base(double xi, Vec2 z) {
    const cdouble d = std::polar(1.0, xi) - to_complex(z);
    return std::log(std::norm(d) / (1.0 - z.norm2()));
}
} // namespace

double hyp_busemann(double xi, Vec2 x, Vec2 y) {
    return busemann_base(xi, x) - busemann_base(xi, y);
}

double hyp_gromov_product(Vec2 x, double xi, double eta) {
    const double gap = std::abs(wrap_angle(xi - eta));
    // rho_x = sin(gap/2) * exp(-(b_xi(x)+b_eta(x))/2)
    return -std::log(std::sin(0.5 * gap)) +
           0.5 * (busemann_base(xi, x) + busemann_base(eta, x));
}

double hyp_visual_distance(Vec2 x, double xi, double eta) {
    return std::exp(-hyp_gromov_product(x, xi, eta));
}

HypArc hyp_arc_between_ideals(double xi, double eta) {
    HypArc arc;
    arc.xi = canonical_angle(xi);
    arc.eta = canonical_angle(eta);
    const double gap = wrap_angle(xi - eta);
    if (gap == 0.0) throw Error("degenerate ideal pair xi = eta");
    const double mid = eta + 0.5 * gap;
    // closest point of the orthogonal circular arc: |z_c| = tan(pi/4 - |gap|/4)
    const double rc = std::tan(0.25 * kPi - 0.25 * std::abs(gap));
    arc.closest = Vec2{rc * std::cos(mid), rc * std::sin(mid)};
    arc.min_radius = std::abs(rc);
    // two perpendicular candidates; pick the one heading to xi
    const double cand = mid + 0.5 * kPi;
    if (std::abs(wrap_angle(hyp_ideal_angle(arc.closest, cand) - xi)) < 0.5 * kPi)
        arc.dir = cand;
    else
        arc.dir = mid - 0.5 * kPi;
    return arc;
}

std::optional<double> HypArc::crossing_halfwidth(double rho) const {
    if (min_radius >= rho) return std::nullopt;
    // right-triangle relation along the arc: cosh R(s) = cosh R_c cosh s
    const double Rc = hyp_radius(closest);
    const double R = 2.0 * std::atanh(rho);
    const double c = std::cosh(R) / std::cosh(Rc);
    if (c <= 1.0) return std::nullopt;
    return std::acosh(c);
}

double hyp_segment_min_radius(Vec2 p, Vec2 q) {
    const double dir = hyp_dir_toward_point(p, q);
    const HypArc arc = hyp_arc_between_ideals(hyp_ideal_angle(p, dir),
                                              hyp_ideal_angle(p, dir + kPi));
    // signed arc parameters of p and q relative to the closest point
    auto param = [&](Vec2 z) {
        const double d = hyp_distance(arc.closest, z);
        const double toward = hyp_dir_toward_point(arc.closest, z);
        return std::abs(wrap_angle(toward - arc.dir)) < 0.5 * kPi ? d : -d;
    };
    const double sp = param(p), sq = param(q);
    if ((sp <= 0.0 && sq >= 0.0) || (sq <= 0.0 && sp >= 0.0)) return arc.min_radius;
    return std::min(p.norm(), q.norm());
}

double hyp_ray_min_radius(Vec2 p, double xi) {
    const double dir = hyp_dir_toward_ideal(p, xi);
    const HypArc arc = hyp_arc_between_ideals(xi, hyp_ideal_angle(p, dir + kPi));
    const double d = hyp_distance(arc.closest, p);
    const double toward = hyp_dir_toward_point(arc.closest, p);
    const bool p_after_closest =
        d > 1e-14 && std::abs(wrap_angle(toward - arc.dir)) < 0.5 * kPi;
    return p_after_closest ? p.norm() : arc.min_radius;
}

} // namespace hyplab
