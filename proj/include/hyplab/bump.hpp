#pragma once
#include <cmath>

#include "hyplab/chart.hpp"

// Smooth compactly supported bump profile
//   psi(x) = exp(1 - 1/(1 - u)),  u = |x|^2 / r0^2,   for u < 1,  else 0,
// normalized so psi(0) = 1 and psi vanishes to all orders at |x| = r0.
// All fields built from it are exactly zero for |x| >= r0 (bit-exact).

namespace hyplab {

struct BumpJet {
    double value = 0.0;
    double du = 0.0;   // d psi / du
    double duu = 0.0;  // d^2 psi / du^2
};

// derivatives with respect to u = |x|^2 / r0^2
inline BumpJet bump_u_jet(double u) {
    BumpJet j;
    if (u >= 1.0) return j;
    const double w = 1.0 - u;
    const double psi = std::exp(1.0 - 1.0 / w);
    j.value = psi;
    j.du = -psi / (w * w);
    j.duu = psi * (2.0 * u - 1.0) / (w * w * w * w);
    return j;
}

// scalar bump centered at c with radius r0, with Cartesian partials up to
// second order (everything is a smooth function of u, so no axis issues)
struct ScalarBumpJet2 {
    double value = 0.0;
    Vec2 grad;                       // first partials
    Sym2 hess;                       // second partials
};

inline ScalarBumpJet2 bump_jet2(Vec2 p, Vec2 center, double r0) {
    ScalarBumpJet2 out;
    const Vec2 d = p - center;
    const double u = d.norm2() / (r0 * r0);
    if (u >= 1.0) return out;
    const BumpJet b = bump_u_jet(u);
    const double c = 2.0 / (r0 * r0);       // du/dx_i = c * d_i
    out.value = b.value;
    out.grad = {b.du * c * d.x, b.du * c * d.y};
    out.hess.xx = b.duu * c * c * d.x * d.x + b.du * c;
    out.hess.xy = b.duu * c * c * d.x * d.y;
    out.hess.yy = b.duu * c * c * d.y * d.y + b.du * c;
    return out;
}

inline double bump_value(Vec2 p, Vec2 center, double r0) {
    const Vec2 d = p - center;
    const double u = d.norm2() / (r0 * r0);
    if (u >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u));
}

} // namespace hyplab
