#pragma once
#include <vector>

#include "hyplab/geodesics.hpp"
#include "hyplab/parallel.hpp"
#include "hyplab/samplers.hpp"

// Boundary-at-infinity quantities of a deformed metric: Gromov products,
// visual metrics, Busemann functions, cross-ratios, conformal derivatives of
// the boundary identification, and the Moebius-deviation scan.
//
// Both boundaries are coordinatized by the circle angle and the extension of
// the identity map is the identity in that coordinate: every geodesic ray
// eventually runs in the unperturbed metric, so its chart trace converges to
// a circle point (an invariant test backs this up).

namespace hyplab {

enum class MeasurementKind {
    gromov_product,
    visual_distance,
    busemann,
    cross_ratio,
    conformal_derivative,
};

struct BoundaryMeasurement {
    MeasurementKind kind = MeasurementKind::gromov_product;
    double value = 0.0;
    double truncation = 0.0;                             // last ladder parameter used
    std::vector<std::pair<double, double>> history;      // (parameter, value)
    bool converged = false;
};

struct LadderOptions {
    double tol = 1e-6;          // stabilization criterion on ladder increments
    double t_max = 15.0;        // truncation cap (double-precision BVP limit)
    double deriv_tol = 1e-4;    // Richardson stabilization for derivatives
    BvpOptions bvp;
};

// limit of (d(x,a_T) + d(x,b_T) - d(a_T,b_T)) / 2 along rays to xi and eta;
// a_T sits at arclength T along the ray, so d(x,a_T) = T exactly (rays are
// minimizing). Throws NotConverged (with history preserved in the message)
// when the ladder fails to stabilize.
BoundaryMeasurement gromov_product(const MetricField& metric, Vec2 x, double xi, double eta,
                                   const LadderOptions& opts = {});

// exp(-(xi|eta)_x), in (0, 1] for distinct endpoints
BoundaryMeasurement visual_distance(const MetricField& metric, Vec2 x, double xi, double eta,
                                    const LadderOptions& opts = {});

// limit of d(x, a_T) - d(y, a_T) with a_T on the ray from the origin anchor
// toward xi
BoundaryMeasurement busemann(const MetricField& metric, double xi, Vec2 x, Vec2 y,
                             const LadderOptions& opts = {});

// [xi xi2 eta eta2] = rho(xi,eta) rho(xi2,eta2) / (rho(xi,eta2) rho(xi2,eta))
// with all four visual distances based at x
BoundaryMeasurement cross_ratio(const MetricField& metric, Vec2 x, double xi, double xi2,
                                double eta, double eta2, const LadderOptions& opts = {});

// derivative of the boundary identification at xi with respect to the visual
// metrics rho_{x,g0} and rho_{y,g}: two-sided angular offsets with one
// Richardson step in the offset
BoundaryMeasurement conformal_derivative(const MetricField& g0, const MetricField& g, double xi,
                                         Vec2 x, Vec2 y, const LadderOptions& opts = {});

struct QuadrupleDeviation {
    Quadruple quadruple;
    double log_cr_g = 0.0;     // log cross-ratio under g
    double log_cr_g0 = 0.0;    // log cross-ratio under g0
    double deviation = 0.0;    // |difference|
};

struct MoebiusReport {
    std::vector<QuadrupleDeviation> entries;
    double max_deviation = 0.0;
};

// max over sampled quadruples of |log CR_g - log CR_g0| at the origin
// basepoint; zero exactly for Moebius boundary maps
MoebiusReport moebius_deviation(const MetricField& g0, const MetricField& g,
                                const std::vector<Quadruple>& quadruples,
                                const LadderOptions& opts = {},
                                par::Exec exec = par::default_exec());

// stabilization rule shared by the truncation ladders: the last increment is
// below tol, or the increments contract geometrically with an estimated tail
// below tol
bool ladder_converged(const std::vector<std::pair<double, double>>& history, double tol);

} // namespace hyplab
