#pragma once
#include <vector>

#include "hyplab/boundary.hpp"
#include "hyplab/ray_transform.hpp"

// Integrated Schwarzian of a compactly supported deformation, computed two
// independent ways: as the renormalized limit of boundary distance
// differences along the base geodesic, and from conformal derivatives of the
// boundary identification. The two routes are each other's oracles.

namespace hyplab {

struct SchwarzianValue {
    enum class Method { renormalized_limit, conformal_derivative };
    double xi = 0.0, eta = 0.0;
    double value = 0.0;
    Method method = Method::renormalized_limit;
    std::vector<std::pair<double, double>> history;   // (R, value) or (shift, value)
    bool converged = false;
};

struct SchwarzianOptions {
    std::vector<double> r_ladder = {4.0, 6.0, 8.0, 10.0, 12.0};
    double tol = 1e-6;                 // ladder stabilization
    double basepoint_shift_tol = 2e-4; // derivative-route independence check
    BvpOptions bvp;
    LadderOptions boundary;
};

// d_g(p_R, q_R) - d_g0(p_R, q_R) for anchors at parameters +-R on the base
// geodesic (xi, eta), s = 0 at its closest point to the origin
SchwarzianValue schwarzian_via_limit(const MetricField& g0, const MetricField& g, double xi,
                                     double eta, const SchwarzianOptions& opts = {});

// log(df(xi) df(eta)) with basepoints on the base and deformed geodesics;
// basepoint independence is asserted by recomputing with shifted basepoints
SchwarzianValue schwarzian_via_derivatives(const MetricField& g0, const MetricField& g,
                                           double xi, double eta,
                                           const SchwarzianOptions& opts = {});

struct DistanceGapEntry {
    Vec2 p, q;
    double base_distance = 0.0;
    double gap = 0.0;                // |d_g - d_g0|
    bool chord_avoids_ball = false;
};

struct DistanceGapReport {
    std::vector<DistanceGapEntry> entries;
    double max_gap = 0.0;
    double diam_g_ball = 0.0;        // diameter of the support ball under g
    double diam_g0_ball = 0.0;
    double bound = 0.0;              // diam_g(B) + 3 diam_g0(B)
    double ball_hyp_radius = 0.0;
    bool pass = false;
};

// |d_g - d_g0| over sampled pairs against the explicit bound from the ball B
// containing the support; chords missing B give exact zeros
DistanceGapReport distance_gap_scan(const MetricField& g0, const MetricField& g,
                                    const std::vector<std::pair<Vec2, Vec2>>& pairs,
                                    const BvpOptions& bvp = {},
                                    par::Exec exec = par::default_exec());

struct RaySchwarzianEntry {
    double xi = 0.0, eta = 0.0;
    double ray_transform = 0.0;      // I_g0(g - g0)
    double twice_schwarzian = 0.0;   // 2 S_g0(g)
    double slack = 0.0;              // lhs - rhs
    bool pass = false;
};

// I_g0(g - g0)(xi, eta) >= 2 S_g0(g)(xi, eta), both sides computed
// independently
RaySchwarzianEntry ray_vs_schwarzian(const MetricField& g0, const MetricField& g, double xi,
                                     double eta, double tolerance = 1e-4,
                                     const SchwarzianOptions& opts = {});

} // namespace hyplab
