#include "hyplab/schwarzian.hpp"

#include <cmath>

#include "hyplab/hyperbolic.hpp"

namespace hyplab {

SchwarzianValue schwarzian_via_limit(const MetricField& g0, const MetricField& g, double xi,
                                     double eta, const SchwarzianOptions& opts) {
    if (wrap_angle(xi - eta) == 0.0) throw Error("Schwarzian requires distinct ideal points");
    SchwarzianValue out;
    out.xi = canonical_angle(xi);
    out.eta = canonical_angle(eta);
    out.method = SchwarzianValue::Method::renormalized_limit;
    if (!g0.is_base())
        throw Error("the reference metric of the Schwarzian is the base metric");

    if (g.is_base()) {   // identity deformation: zero exactly
        out.converged = true;
        out.history.push_back({opts.r_ladder.front(), 0.0});
        return out;
    }

    const HypArc arc = hyp_arc_between_ideals(xi, eta);
    for (const double R : opts.r_ladder) {
        const Vec2 p = arc.state_at(R).x;
        const Vec2 q = arc.state_at(-R).x;
        const double value = distance(g, p, q, opts.bvp).distance - hyp_distance(p, q);
        out.history.push_back({R, value});
        out.value = value;
        if (ladder_converged(out.history, opts.tol)) {
            out.converged = true;
            break;
        }
    }
    if (!out.converged)
        throw NotConverged("Schwarzian limit ladder did not stabilize");
    return out;
}

SchwarzianValue schwarzian_via_derivatives(const MetricField& g0, const MetricField& g,
                                           double xi, double eta,
                                           const SchwarzianOptions& opts) {
    if (wrap_angle(xi - eta) == 0.0) throw Error("Schwarzian requires distinct ideal points");
    SchwarzianValue out;
    out.xi = canonical_angle(xi);
    out.eta = canonical_angle(eta);
    out.method = SchwarzianValue::Method::conformal_derivative;

    const HypArc arc = hyp_arc_between_ideals(xi, eta);
    const GeodesicPath gpath = geodesic_between_ideals(g, xi, eta, opts.bvp);

    auto evaluate = [&](double shift) {
        const Vec2 x = arc.state_at(shift).x;
        const Vec2 y = gpath.state_at(shift).x;
        const double dfx = conformal_derivative(g0, g, xi, x, y, opts.boundary).value;
        const double dfe = conformal_derivative(g0, g, eta, x, y, opts.boundary).value;
        return std::log(dfx * dfe);
    };

    const double s0 = evaluate(0.0);
    const double s1 = evaluate(1.0);   // basepoints shifted along both geodesics
    out.history.push_back({0.0, s0});
    out.history.push_back({1.0, s1});
    out.value = s0;
    out.converged = std::abs(s1 - s0) < opts.basepoint_shift_tol;
    if (!out.converged)
        throw NotConverged("Schwarzian derivative route: basepoint dependence " +
                           std::to_string(std::abs(s1 - s0)) + " above tolerance");
    return out;
}

DistanceGapReport distance_gap_scan(const MetricField& g0, const MetricField& g,
                                    const std::vector<std::pair<Vec2, Vec2>>& pairs,
                                    const BvpOptions& bvp, par::Exec exec) {
    if (!g0.is_base()) throw Error("the gap scan compares against the base metric");
    DistanceGapReport rep;
    rep.ball_hyp_radius = 2.0 * std::atanh(std::min(g.support_radius(), 0.999)) + 0.1;
    rep.diam_g0_ball = 2.0 * rep.ball_hyp_radius;

    // diameter of the ball under g: pairwise maximization over boundary points
    const int nb = 16;
    const double rb = chart_radius_of_hyp(rep.ball_hyp_radius);
    std::vector<Vec2> boundary;
    for (int i = 0; i < nb; ++i)
        boundary.push_back({rb * std::cos(kTwoPi * i / nb), rb * std::sin(kTwoPi * i / nb)});
    std::vector<std::pair<Vec2, Vec2>> bpairs;
    for (int i = 0; i < nb; ++i)
        for (int j = i + 1; j < nb; ++j) bpairs.push_back({boundary[i], boundary[j]});
    std::vector<double> bdist(bpairs.size());
    par::for_index(bpairs.size(), [&](std::size_t k) {
        bdist[k] = distance(g, bpairs[k].first, bpairs[k].second, bvp).distance;
    }, exec);
    for (const double d : bdist) rep.diam_g_ball = std::max(rep.diam_g_ball, d);
    rep.bound = rep.diam_g_ball + 3.0 * rep.diam_g0_ball;

    rep.entries.resize(pairs.size());
    const double ball_chart_radius = rb;
    par::for_index(pairs.size(), [&](std::size_t k) {
        DistanceGapEntry e;
        e.p = pairs[k].first;
        e.q = pairs[k].second;
        e.base_distance = hyp_distance(e.p, e.q);
        e.chord_avoids_ball = hyp_segment_min_radius(e.p, e.q) >= ball_chart_radius;
        e.gap = std::abs(distance(g, e.p, e.q, bvp).distance - e.base_distance);
        rep.entries[k] = e;
    }, exec);
    for (const auto& e : rep.entries) rep.max_gap = std::max(rep.max_gap, e.gap);
    rep.pass = rep.max_gap <= rep.bound;
    return rep;
}

RaySchwarzianEntry ray_vs_schwarzian(const MetricField& g0, const MetricField& g, double xi,
                                     double eta, double tolerance,
                                     const SchwarzianOptions& opts) {
    RaySchwarzianEntry e;
    e.xi = canonical_angle(xi);
    e.eta = canonical_angle(eta);
    if (g.is_base()) {
        e.pass = true;
        return e;
    }
    e.ray_transform = ray_transform(g0, g.perturbation(), xi, eta, opts.bvp).value;
    e.twice_schwarzian = 2.0 * schwarzian_via_limit(g0, g, xi, eta, opts).value;
    e.slack = e.ray_transform - e.twice_schwarzian;
    e.pass = e.slack >= -tolerance;
    return e;
}

} // namespace hyplab
