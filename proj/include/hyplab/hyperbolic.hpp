#pragma once
#include <complex>
#include <optional>

#include "hyplab/chart.hpp"

// Closed-form disk-model geometry of the unperturbed metric
// g0 = 4 (1-|x|^2)^{-2} delta: distances, geodesic states at arbitrary
// arclength, ideal endpoints, Busemann functions and visual metrics. These
// are both the continuation formulas used beyond the perturbation support
// and the oracles the numerical machinery is tested against.

namespace hyplab {

// geodesic state: chart position and chart velocity of a unit-speed geodesic
struct GeoState {
    Vec2 x;
    Vec2 v;
};

double hyp_distance(Vec2 p, Vec2 q);

// chart angle at p of the unit velocity pointing toward the chart point q
double hyp_dir_toward_point(Vec2 p, Vec2 q);
// chart angle at p of the unit velocity pointing toward the ideal angle xi
double hyp_dir_toward_ideal(Vec2 p, double xi);
// ideal endpoint angle of the geodesic from p with chart direction angle dir
double hyp_ideal_angle(Vec2 p, double dir);

// state at hyperbolic arclength s along the geodesic from p with direction dir
GeoState hyp_state_at(Vec2 p, double dir, double s);

// g0-unit velocity with the given chart direction angle (pure base metric)
Vec2 hyp_unit_velocity(Vec2 p, double dir);

// Busemann function B(xi, x, y) = lim_{a->xi} d(x,a) - d(y,a)
double hyp_busemann(double xi, Vec2 x, Vec2 y);

// Gromov product (xi|eta)_x and visual distance rho_x = exp(-(xi|eta)_x)
double hyp_gromov_product(Vec2 x, double xi, double eta);
double hyp_visual_distance(Vec2 x, double xi, double eta);

// Bi-infinite g0-geodesic with backward ideal endpoint eta and forward ideal
// endpoint xi, parametrized by arclength with s = 0 at the closest point to
// the origin.
struct HypArc {
    double xi = 0.0, eta = 0.0;   // forward / backward ideal angles
    Vec2 closest;                  // chart point nearest the origin
    double dir = 0.0;              // chart direction angle at `closest`
    double min_radius = 0.0;       // |closest|

    GeoState state_at(double s) const { return hyp_state_at(closest, dir, s); }
    // arclength parameters at which the arc meets the circle of Euclidean
    // radius rho (empty when it stays outside); range is [-w, +w]
    std::optional<double> crossing_halfwidth(double rho) const;
};

HypArc hyp_arc_between_ideals(double xi, double eta);

// minimum Euclidean chart radius along the geodesic segment [p, q]
double hyp_segment_min_radius(Vec2 p, Vec2 q);
// minimum Euclidean chart radius along the ray from p toward ideal angle xi
double hyp_ray_min_radius(Vec2 p, double xi);

// hyperbolic radius <-> Euclidean chart radius
inline double hyp_radius(Vec2 p) { return hyp_distance({0.0, 0.0}, p); }
inline double chart_radius_of_hyp(double R) { return std::tanh(0.5 * R); }

} // namespace hyplab
