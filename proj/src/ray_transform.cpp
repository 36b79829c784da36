#include "hyplab/ray_transform.hpp"

#include <cmath>

#include "hyplab/geometry_ops.hpp"
#include "hyplab/hyperbolic.hpp"

namespace hyplab {

namespace {

// RK4 trajectory refollow with per-step Simpson on f(gdot, gdot): two half
// steps per Simpson interval so the midpoint value comes from true nodes
double quad_integrated(const MetricField& metric, GeoState start, double length,
                       const SymTensorField& f, double h_target) {
    if (length <= 0.0) return 0.0;
    const int n = std::max(1, static_cast<int>(std::ceil(length / h_target)));
    const double h = length / n;
    double sum = 0.0;
    GeoState cur = start;
    double f0 = f.value(cur.x).quad(cur.v);
    for (int i = 0; i < n; ++i) {
        const GeoState mid = rk4_geodesic_step(metric, cur, 0.5 * h);
        const GeoState nxt = rk4_geodesic_step(metric, mid, 0.5 * h);
        const double fm = f.value(mid.x).quad(mid.v);
        const double f1 = f.value(nxt.x).quad(nxt.v);
        sum += h / 6.0 * (f0 + 4.0 * fm + f1);
        cur = nxt;
        f0 = f1;
    }
    return sum;
}

// Simpson along a closed-form segment, restricted to the window where the
// underlying base-metric geodesic meets the support of f
double quad_closed_form(const PathSegment& seg, const SymTensorField& f, double s_lo,
                        double s_hi, double h_target) {
    if (f.support_radius() <= 0.0) return 0.0;
    // closest approach of the full geodesic through the anchor
    const double fwd = hyp_ideal_angle(seg.anchor, seg.anchor_dir);
    const double bwd = hyp_ideal_angle(seg.anchor, seg.anchor_dir + kPi);
    const HypArc arc = hyp_arc_between_ideals(fwd, bwd);
    const auto w = arc.crossing_halfwidth(f.support_radius());
    if (!w) return 0.0;
    // parameter of the closest point in the segment's arclength coordinate
    const double d = hyp_distance(seg.anchor, arc.closest);
    const double toward = d > 1e-15 ? hyp_dir_toward_point(seg.anchor, arc.closest) : 0.0;
    const double sign =
        d > 1e-15 && std::abs(wrap_angle(toward - seg.anchor_dir)) < 0.5 * kPi ? 1.0 : -1.0;
    const double s_closest = seg.anchor_s + sign * d;
    const double lo = std::max(s_lo, s_closest - *w);
    const double hi = std::min(s_hi, s_closest + *w);
    if (hi <= lo) return 0.0;
    int n = std::max(2, static_cast<int>(std::ceil((hi - lo) / h_target)));
    if (n % 2 != 0) ++n;
    const double h = (hi - lo) / n;
    auto integrand = [&](double s) {
        const GeoState st = hyp_state_at(seg.anchor, seg.anchor_dir, s - seg.anchor_s);
        return f.value(st.x).quad(st.v);
    };
    double sum = integrand(lo) + integrand(hi);
    for (int i = 1; i < n; ++i) sum += integrand(lo + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
    return sum * h / 3.0;
}

double integrate_along(const GeodesicPath& path, const SymTensorField& f, double s_lo,
                       double s_hi, double h) {
    double total = 0.0;
    for (const PathSegment& seg : path.segments()) {
        const double lo = std::max(s_lo, seg.s0);
        const double hi = std::min(s_hi, seg.s1);
        if (hi <= lo) continue;
        if (seg.kind == PathSegment::Kind::closed_form) {
            total += quad_closed_form(seg, f, lo, hi, h);
        } else {
            const GeoState start = path.state_at(lo);
            total += quad_integrated(path.metric(), start, hi - lo, f, h);
        }
    }
    return total;
}

} // namespace

RayTransformValue integrate_tensor_along(const GeodesicPath& path, const SymTensorField& f,
                                         double s_lo, double s_hi,
                                         const QuadratureOptions& quad) {
    RayTransformValue out;
    out.value = integrate_along(path, f, s_lo, s_hi, quad.step);
    const double coarse = integrate_along(path, f, s_lo, s_hi, 2.0 * quad.step);
    out.error_estimate = std::abs(out.value - coarse) / 15.0;
    out.chord_length = s_hi - s_lo;
    return out;
}

RayTransformValue ray_transform(const MetricField& metric, const SymTensorField& f, double xi,
                                double eta, const BvpOptions& bvp, const QuadratureOptions& quad) {
    if (wrap_angle(xi - eta) == 0.0) throw Error("ray transform requires distinct ideal points");
    if (!metric.is_base() && f.support_radius() > metric.escape_radius() + 1e-12)
        throw Error("tensor support must lie inside the escape radius");

    RayTransformValue out;
    out.pair = BoundaryPair{xi, eta};

    // rays missing both the deformation and the support of f are base-metric
    // geodesics that never meet the integrand: exactly zero
    const HypArc arc = hyp_arc_between_ideals(xi, eta);
    if (arc.min_radius >= std::max(metric.support_radius(), f.support_radius())) return out;

    const GeodesicPath path = geodesic_between_ideals(metric, xi, eta, bvp);
    out.value = integrate_along(path, f, path.s_begin(), path.s_end(), quad.step);
    const double coarse = integrate_along(path, f, path.s_begin(), path.s_end(), 2.0 * quad.step);
    out.error_estimate = std::abs(out.value - coarse) / 15.0;
    out.chord_length = path.length();
    return out;
}

CdrmDisk::CdrmDisk(MetricField metric, double euclidean_radius)
    : metric_(std::move(metric)), radius_(euclidean_radius) {
    if (radius_ <= metric_.support_radius() || radius_ >= 1.0)
        throw Error("CDRM radius must lie strictly between the support radius and 1");
}

Vec2 CdrmDisk::boundary_point(double angle) const {
    return {radius_ * std::cos(angle), radius_ * std::sin(angle)};
}

Vec2 CdrmDisk::outward_normal(double angle) const {
    const Vec2 x = boundary_point(angle);
    const Vec2 radial = unit_from_angle(angle);
    return radial * (1.0 / std::sqrt(metric_.value(x).quad(radial)));
}

CdrmDisk::ConvexityReport CdrmDisk::convexity_check(int n_samples) const {
    // geodesic curvature of the boundary circle with respect to the inward
    // normal: k = g(nabla_T T, n_in) for the g-unit tangent T
    ConvexityReport rep;
    rep.samples = n_samples;
    rep.min_geodesic_curvature = 1e300;
    for (int i = 0; i < n_samples; ++i) {
        const double phi = kTwoPi * i / n_samples;
        const Vec2 x = boundary_point(phi);
        const Sym2 g = metric_.value(x);
        const Vec2 tangent_dir{-std::sin(phi), std::cos(phi)};
        const Vec2 T = tangent_dir * (1.0 / std::sqrt(g.quad(tangent_dir)));
        // nabla_T T = dT/ds + Gamma(T,T); dT/ds along the circle
        const double h = 1e-6;
        auto unit_tangent = [&](double a) {
            const Vec2 p = boundary_point(a);
            const Vec2 td{-std::sin(a), std::cos(a)};
            return td * (1.0 / std::sqrt(metric_.value(p).quad(td)));
        };
        // arclength rate: ds/dphi = |d(boundary_point)/dphi|_g
        const Vec2 dpos{-radius_ * std::sin(phi), radius_ * std::cos(phi)};
        const double ds_dphi = std::sqrt(g.quad(dpos));
        const Vec2 dT_dphi = (unit_tangent(phi + h) - unit_tangent(phi - h)) * (1.0 / (2.0 * h));
        const Vec2 dT_ds = dT_dphi * (1.0 / ds_dphi);
        const auto gamma = christoffel(metric_, x);
        const Vec2 nabla{dT_ds.x + gamma[0].quad(T), dT_ds.y + gamma[1].quad(T)};
        const Vec2 n_in = -outward_normal(phi);
        const double k = g.pair(nabla, n_in);
        rep.min_geodesic_curvature = std::min(rep.min_geodesic_curvature, k);
    }
    rep.pass = rep.min_geodesic_curvature > 0.0;
    return rep;
}

namespace {

// chord integral from an inward-moving state on the boundary circle,
// stepping until the trajectory leaves the disk (exit refined by shrinking
// the final step)
struct ChordResult {
    double value = 0.0;
    double length = 0.0;
};

ChordResult integrate_chord(const CdrmDisk& M, const SymTensorField& f, GeoState start,
                            double h) {
    const MetricField& metric = M.metric();
    const double r2 = M.radius() * M.radius();
    const double cap = 8.0 * std::atanh(M.radius()) + 10.0;

    ChordResult out;
    GeoState cur = start;
    double f0 = f.value(cur.x).quad(cur.v);
    while (out.length < cap) {
        double step = h;
        GeoState mid = rk4_geodesic_step(metric, cur, 0.5 * step);
        GeoState nxt = rk4_geodesic_step(metric, mid, 0.5 * step);
        if (nxt.x.norm2() >= r2) {
            // bisect the step length so the endpoint lands on the boundary
            double lo = 0.0, hi = step;
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (lo + hi);
                const GeoState probe =
                    rk4_geodesic_step(metric, rk4_geodesic_step(metric, cur, 0.5 * m), 0.5 * m);
                (probe.x.norm2() < r2 ? lo : hi) = m;
            }
            step = 0.5 * (lo + hi);
            if (step <= 1e-13) break;
            mid = rk4_geodesic_step(metric, cur, 0.5 * step);
            nxt = rk4_geodesic_step(metric, mid, 0.5 * step);
            const double fm = f.value(mid.x).quad(mid.v);
            const double f1 = f.value(nxt.x).quad(nxt.v);
            out.value += step / 6.0 * (f0 + 4.0 * fm + f1);
            out.length += step;
            break;
        }
        const double fm = f.value(mid.x).quad(mid.v);
        const double f1 = f.value(nxt.x).quad(nxt.v);
        out.value += step / 6.0 * (f0 + 4.0 * fm + f1);
        out.length += step;
        cur = nxt;
        f0 = f1;
    }
    if (out.length >= cap)
        throw SolverFailure("chord failed to exit the disk within the length cap");
    return out;
}

} // namespace

RayTransformValue cdrm_ray_transform(const CdrmDisk& M, const SymTensorField& f, Vec2 x,
                                     Vec2 dir, const QuadratureOptions& quad) {
    if (std::abs(x.norm() - M.radius()) > 1e-9)
        throw Error("base point must lie on the CDRM boundary");
    const Vec2 nu = unit_from_angle(std::atan2(x.y, x.x));
    if (dot(dir, nu) < -1e-12)
        throw NotEntrySphere("direction points strictly inward; I_M is defined on the "
                             "outward half of the unit sphere bundle");
    // integral over the maximal geodesic ending at (x, dir): follow it
    // backward (the integrand is even in the velocity)
    const GeoState back{x, -dir};
    RayTransformValue out;
    const ChordResult fine = integrate_chord(M, f, back, quad.step);
    const ChordResult coarse = integrate_chord(M, f, back, 2.0 * quad.step);
    out.value = fine.value;
    out.error_estimate = std::abs(fine.value - coarse.value) / 15.0;
    out.chord_length = fine.length;
    return out;
}

RayTransformValue cdrm_ray_transform_entry(const CdrmDisk& M, const SymTensorField& f,
                                           const EntryState& entry,
                                           const QuadratureOptions& quad) {
    const Vec2 x = M.boundary_point(entry.boundary_angle);
    const Vec2 e = unit_from_angle(entry.direction_angle);
    const Vec2 w = e * (1.0 / std::sqrt(M.metric().value(x).quad(e)));
    if (dot(w, unit_from_angle(entry.boundary_angle)) > 1e-12)
        throw NotEntrySphere("entry state must point inward");
    RayTransformValue out;
    const ChordResult fine = integrate_chord(M, f, {x, w}, quad.step);
    const ChordResult coarse = integrate_chord(M, f, {x, w}, 2.0 * quad.step);
    out.value = fine.value;
    out.error_estimate = std::abs(fine.value - coarse.value) / 15.0;
    out.chord_length = fine.length;
    out.entry = entry;
    return out;
}

KernelCheckReport potential_kernel_check(const MetricField& metric, const OneFormField& v,
                                         const std::vector<BoundaryPair>& rays, double tolerance,
                                         const BvpOptions& bvp, const QuadratureOptions& quad,
                                         par::Exec exec) {
    if (v.support_radius() > metric.escape_radius() + 1e-12 && !metric.is_base())
        throw Error("1-form support must lie inside the escape radius");
    const SymTensorField dv = sym_derivative(metric, v);
    KernelCheckReport rep;
    rep.tolerance = tolerance;
    rep.entries.resize(rays.size());
    par::for_index(rays.size(), [&](std::size_t i) {
        rep.entries[i].pair = rays[i];
        rep.entries[i].value = ray_transform(metric, dv, rays[i].xi, rays[i].eta, bvp, quad).value;
    }, exec);
    for (const auto& e : rep.entries) rep.max_abs = std::max(rep.max_abs, std::abs(e.value));
    rep.pass = rep.max_abs <= tolerance;
    return rep;
}

} // namespace hyplab
