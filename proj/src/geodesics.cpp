#include "hyplab/geodesics.hpp"

#include <algorithm>
#include <cmath>

namespace hyplab {

namespace {

// g-unit velocity at p with chart direction angle theta
Vec2 g_unit_velocity(const MetricField& metric, Vec2 p, double theta) {
    const Vec2 e = unit_from_angle(theta);
    return e * (1.0 / std::sqrt(metric.value(p).quad(e)));
}

double direction_angle(Vec2 v) { return std::atan2(v.y, v.x); }

GeoState hermite_state(const MetricField& metric, const PathSample& a, const PathSample& b,
                       double s) {
    const double h = b.s - a.s;
    if (h <= 0.0) return {a.x, a.v};
    const double t = (s - a.s) / h;
    const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    const double h10 = t * (1.0 - t) * (1.0 - t);
    const double h01 = t * t * (3.0 - 2.0 * t);
    const double h11 = t * t * (t - 1.0);
    GeoState out;
    out.x = h00 * a.x + (h10 * h) * a.v + h01 * b.x + (h11 * h) * b.v;
    const Vec2 aa = geodesic_acceleration(metric, a.x, a.v);
    const Vec2 ab = geodesic_acceleration(metric, b.x, b.v);
    out.v = h00 * a.v + (h10 * h) * aa + h01 * b.v + (h11 * h) * ab;
    return out;
}

} // namespace

PathSegment PathSegment::closed(Vec2 anchor, double dir, double anchor_s, double s0, double s1) {
    PathSegment seg;
    seg.kind = Kind::closed_form;
    seg.anchor = anchor;
    seg.anchor_dir = dir;
    seg.anchor_s = anchor_s;
    seg.s0 = s0;
    seg.s1 = s1;
    return seg;
}

PathSegment PathSegment::integrated(std::vector<PathSample> samples) {
    PathSegment seg;
    seg.kind = Kind::integrated;
    seg.s0 = samples.front().s;
    seg.s1 = samples.back().s;
    seg.samples = std::move(samples);
    return seg;
}

GeodesicPath::GeodesicPath(MetricField metric, std::vector<PathSegment> segments)
    : metric_(std::move(metric)), segments_(std::move(segments)) {
    s_begin_ = segments_.front().s0;
    s_end_ = segments_.back().s1;
}

GeoState GeodesicPath::state_at(double s) const {
    // pick the segment containing s; clamp to terminal segments beyond the
    // nominal range (closed-form ends extend to the full geodesic)
    const PathSegment* seg = &segments_.front();
    for (const auto& candidate : segments_) {
        if (s <= candidate.s1 || &candidate == &segments_.back()) {
            seg = &candidate;
            if (s <= candidate.s1) break;
        }
    }
    if (seg->kind == PathSegment::Kind::closed_form)
        return hyp_state_at(seg->anchor, seg->anchor_dir, s - seg->anchor_s);

    const auto& sm = seg->samples;
    if (s <= sm.front().s) return {sm.front().x, sm.front().v};
    if (s >= sm.back().s) return {sm.back().x, sm.back().v};
    auto it = std::lower_bound(sm.begin(), sm.end(), s,
                               [](const PathSample& a, double val) { return a.s < val; });
    const PathSample& b = *it;
    const PathSample& a = *(it - 1);
    return hermite_state(metric_, a, b, s);
}

GeodesicPath GeodesicPath::reversed() const {
    const double L = s_end_ + s_begin_;   // new s = L - old s maps [begin,end] onto itself
    std::vector<PathSegment> segs;
    for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
        PathSegment seg;
        seg.kind = it->kind;
        seg.s0 = L - it->s1;
        seg.s1 = L - it->s0;
        if (it->kind == PathSegment::Kind::closed_form) {
            seg.anchor = it->anchor;
            seg.anchor_dir = it->anchor_dir + kPi;
            seg.anchor_s = L - it->anchor_s;
        } else {
            seg.samples.reserve(it->samples.size());
            for (auto sit = it->samples.rbegin(); sit != it->samples.rend(); ++sit)
                seg.samples.push_back({L - sit->s, sit->x, -sit->v});
        }
        segs.push_back(std::move(seg));
    }
    GeodesicPath out(metric_, std::move(segs));
    out.forward_ideal = backward_ideal;
    out.backward_ideal = forward_ideal;
    out.forward_exit = backward_exit;
    out.backward_exit = forward_exit;
    out.max_speed_defect = max_speed_defect;
    return out;
}

std::vector<GeodesicPath::FlatSample> GeodesicPath::trace(double ds) const {
    std::vector<FlatSample> out;
    const int n = std::max(1, static_cast<int>(std::ceil(length() / ds)));
    out.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double s = s_begin_ + length() * i / n;
        const GeoState st = state_at(s);
        out.push_back({s, st.x, st.v, std::abs(metric_.value(st.x).quad(st.v) - 1.0)});
    }
    return out;
}

namespace {

// integrate from a state until escape; throws if the trajectory fails to
// leave the support region within the length cap
IvpResult integrate_until_escape(const MetricField& metric, const GeoState& start,
                                 const StepControl& ctl) {
    const double cap =
        4.0 * (hyp_radius(start.x) + 2.0 * std::atanh(std::min(metric.escape_radius(), 0.99))) +
        10.0;
    IvpResult res = integrate_geodesic(metric, start, cap, ctl, true);
    if (!res.escaped)
        throw BvpNoConvergence("geodesic failed to escape the support region", cap);
    return res;
}

struct ShotEnd {
    GeoState state;   // state at the end of the integrated piece
    double s;         // its arclength
    IvpResult ivp;
};

ShotEnd shoot_until_escape(const MetricField& metric, Vec2 p, double theta,
                           const StepControl& ctl) {
    IvpResult ivp = integrate_until_escape(metric, {p, g_unit_velocity(metric, p, theta)}, ctl);
    const PathSample& last = ivp.samples.back();
    return {{last.x, last.v}, last.s, std::move(ivp)};
}

// ---- direct two-parameter shooting (theta, L) with full integration ----

struct DirectShot {
    double theta, L;
    Vec2 endpoint;
    IvpResult ivp;
};

DirectShot shoot_direct(const MetricField& metric, Vec2 p, double theta, double L,
                        const StepControl& ctl) {
    IvpResult ivp =
        integrate_geodesic(metric, {p, g_unit_velocity(metric, p, theta)}, L, ctl, false);
    const Vec2 end = ivp.samples.back().x;
    return {theta, L, end, std::move(ivp)};
}

struct DirectSolution {
    DirectShot shot;
    double residual;
    int iterations;
};

DirectSolution solve_direct(const MetricField& metric, Vec2 p, Vec2 q, double theta0, double L0,
                            const BvpOptions& opts) {
    const double L_cap = std::max(L0, hyp_distance(p, q)) + 12.0;
    auto try_shoot = [&](double th, double L) -> std::optional<DirectShot> {
        try {
            return shoot_direct(metric, p, th, L, opts.step);
        } catch (const ChartEscape&) {
            return std::nullopt;
        }
    };

    double theta = theta0, L = std::max(L0, 1e-9);
    std::optional<DirectShot> cur = try_shoot(theta, L);
    if (!cur) throw BvpNoConvergence("shooting initialization left the chart", 1e300);
    double best = (cur->endpoint - q).norm();
    double dtheta_fd = 1e-7, dL_fd = 1e-7;
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        const Vec2 F = cur->endpoint - q;
        const double res = F.norm();
        if (res <= opts.tol)
            return {std::move(*cur), res, iter};

        const auto st = try_shoot(theta + dtheta_fd, L);
        const auto sl = try_shoot(theta, std::min(L + dL_fd, L_cap));
        if (!st || !sl) break;
        const Vec2 c1 = (st->endpoint - cur->endpoint) * (1.0 / dtheta_fd);
        const Vec2 c2 = (sl->endpoint - cur->endpoint) * (1.0 / dL_fd);
        // keep the FD secant displacement around 1e-4 chart units
        if (c1.norm() > 0.0) dtheta_fd = std::clamp(1e-4 / c1.norm(), 1e-12, 1e-6);
        if (c2.norm() > 0.0) dL_fd = std::clamp(1e-4 / c2.norm(), 1e-12, 1e-6);

        // solve [c1 c2] [dtheta dL]^T = -F
        const double det = c1.x * c2.y - c1.y * c2.x;
        if (det == 0.0) break;
        const double dth = (-F.x * c2.y + F.y * c2.x) / det;
        const double dLn = (-c1.x * F.y + c1.y * F.x) / det;

        bool accepted = false;
        double lam = 1.0;
        for (int k = 0; k < 12; ++k, lam *= 0.5) {
            const double th_try = theta + lam * dth;
            const double L_try = std::clamp(L + lam * dLn, 1e-9, L_cap);
            std::optional<DirectShot> trial = try_shoot(th_try, L_try);
            if (trial && (trial->endpoint - q).norm() < res) {
                theta = th_try;
                L = L_try;
                cur = std::move(trial);
                accepted = true;
                break;
            }
        }
        best = std::min(best, (cur->endpoint - q).norm());
        if (!accepted) break;
    }
    const double res = (cur->endpoint - q).norm();
    if (res <= opts.tol) return {std::move(*cur), res, iter};
    throw BvpNoConvergence("two-point shooting did not converge", std::min(best, res));
}

// bisection presolve on the initial direction: which side of the shot ray
// does q fall on (monotone in theta in negative curvature)
double bisect_direction(const MetricField& metric, Vec2 p, Vec2 q, double theta0, double L0,
                        const StepControl& ctl) {
    auto side = [&](double theta) {
        const DirectShot s = shoot_direct(metric, p, theta, L0 + 2.0, ctl);
        double bestd = 1e300;
        double sd = 0.0;
        for (const auto& smp : s.ivp.samples) {
            const double d = (q - smp.x).norm2();
            if (d < bestd) {
                bestd = d;
                sd = cross(smp.v, q - smp.x);
            }
        }
        return sd;
    };
    const double s0 = side(theta0);
    if (s0 == 0.0) return theta0;
    double width = 0.05;
    for (int k = 0; k < 7; ++k, width = std::min(2.0 * width, 3.1)) {
        for (const double sgn : {-1.0, 1.0}) {
            const double cand = theta0 + sgn * width;
            if (side(cand) * s0 > 0.0) continue;
            double lo = theta0, hi = cand;
            for (int it = 0; it < 50; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (side(mid) * s0 <= 0.0)
                    hi = mid;
                else
                    lo = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
    return theta0;
}

// ---- one-parameter shooting from a near point to a far target ----

struct HalfSolution {
    double theta;
    ShotEnd end;
    double residual_angle;
    int iterations;
};

HalfSolution solve_half(const MetricField& metric, Vec2 p, Vec2 q, const BvpOptions& opts) {
    auto residual = [&](double theta) {
        ShotEnd e = shoot_until_escape(metric, p, theta, opts.step);
        const double r =
            wrap_angle(hyp_dir_toward_point(e.state.x, q) - direction_angle(e.state.v));
        return std::pair<double, ShotEnd>(r, std::move(e));
    };
    double theta = hyp_dir_toward_point(p, q);
    auto [r, end] = residual(theta);
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        if (std::abs(r) <= 1e-12)
            return {theta, std::move(end), r, iter};
        const double fd = 1e-8;
        auto [r2, e2] = residual(theta + fd);
        const double drdt = (r2 - r) / fd;
        if (drdt == 0.0) break;
        double step = -r / drdt;
        bool ok = false;
        for (int k = 0; k < 10; ++k, step *= 0.5) {
            auto [rt, et] = residual(theta + step);
            if (std::abs(rt) < std::abs(r)) {
                theta += step;
                r = rt;
                end = std::move(et);
                ok = true;
                break;
            }
        }
        if (!ok) break;
    }
    if (std::abs(r) <= 1e-10) return {theta, std::move(end), r, iter};
    throw BvpNoConvergence("half shooting did not converge", std::abs(r));
}

// ---- entry-state shooting for trajectories crossing the support ----
//
// Unknowns: boundary angle phi and chart direction angle omega of the entry
// state on the escape circle. The backward continuation from the entry state
// is pure base metric (closed form); the forward leg is integrated through
// the support and continued in closed form after escape. Conditions on each
// side are either "the ray passes through a point" or "the ideal endpoint
// angle equals a target" -- both angle residuals of order one.

struct EntryCondition {
    enum class Kind { through_point, ideal_angle } kind;
    Vec2 point;
    double angle = 0.0;
};

struct EntrySolution {
    GeoState entry;           // forward-pointing state on the escape circle
    ShotEnd exit;             // state after crossing the support
    double residual = 0.0;    // max abs angle residual
    int iterations = 0;
};

EntrySolution solve_entry(const MetricField& metric, const EntryCondition& backward,
                          const EntryCondition& forward, double phi0, double omega0,
                          const BvpOptions& opts) {
    const double r1 = metric.escape_radius();

    struct Eval {
        double rb, rf;
        ShotEnd exit;
        GeoState entry;
    };
    auto eval = [&](double phi, double omega) {
        const Vec2 E{r1 * std::cos(phi), r1 * std::sin(phi)};
        double rb;
        if (backward.kind == EntryCondition::Kind::through_point)
            rb = wrap_angle(hyp_dir_toward_point(E, backward.point) - (omega + kPi));
        else
            rb = wrap_angle(hyp_ideal_angle(E, omega + kPi) - backward.angle);
        ShotEnd exit = shoot_until_escape(metric, E, omega, opts.step);
        double rf;
        if (forward.kind == EntryCondition::Kind::through_point)
            rf = wrap_angle(hyp_dir_toward_point(exit.state.x, forward.point) -
                            direction_angle(exit.state.v));
        else
            rf = wrap_angle(hyp_ideal_angle(exit.state.x, direction_angle(exit.state.v)) -
                            forward.angle);
        return Eval{rb, rf, std::move(exit), {E, g_unit_velocity(metric, E, omega)}};
    };

    double phi = phi0, omega = omega0;
    Eval cur = eval(phi, omega);
    double best = std::max(std::abs(cur.rb), std::abs(cur.rf));
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        const double res = std::max(std::abs(cur.rb), std::abs(cur.rf));
        if (res <= 1e-12)
            return {cur.entry, std::move(cur.exit), res, iter};
        const double fd = 1e-8;
        const Eval ep = eval(phi + fd, omega);
        const Eval eo = eval(phi, omega + fd);
        const double j11 = (ep.rb - cur.rb) / fd, j12 = (eo.rb - cur.rb) / fd;
        const double j21 = (ep.rf - cur.rf) / fd, j22 = (eo.rf - cur.rf) / fd;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0) break;
        const double dphi = (-cur.rb * j22 + cur.rf * j12) / det;
        const double domega = (-j11 * cur.rf + j21 * cur.rb) / det;
        bool ok = false;
        double lam = 1.0;
        for (int k = 0; k < 12; ++k, lam *= 0.5) {
            Eval trial = eval(phi + lam * dphi, omega + lam * domega);
            if (std::max(std::abs(trial.rb), std::abs(trial.rf)) < res) {
                phi += lam * dphi;
                omega += lam * domega;
                cur = std::move(trial);
                ok = true;
                break;
            }
        }
        best = std::min(best, std::max(std::abs(cur.rb), std::abs(cur.rf)));
        if (!ok) break;
    }
    const double res = std::max(std::abs(cur.rb), std::abs(cur.rf));
    if (res <= 1e-10) return {cur.entry, std::move(cur.exit), res, iter};
    throw BvpNoConvergence("entry-state shooting did not converge", std::min(best, res));
}

// entry initialization from the closed-form arc of the base metric
struct EntryInit {
    double phi, omega;
};

EntryInit entry_init_from_arc(const HypArc& arc, double r1, bool from_backward_side) {
    const auto w = arc.crossing_halfwidth(r1);
    const double s = w ? (from_backward_side ? -*w : *w) : 0.0;
    const GeoState st = arc.state_at(s);
    return {direction_angle(st.x), direction_angle(st.v)};
}

std::vector<PathSample> shifted(std::vector<PathSample> samples, double ds) {
    for (auto& s : samples) s.s += ds;
    return samples;
}

void attach_exit_data(GeodesicPath& path, const MetricField& metric) {
    // record the first outward crossing of the escape radius in each
    // direction, and the corresponding ideal angles, when present
    const double r1 = metric.escape_radius();
    const double s0 = path.s_begin(), s1 = path.s_end();
    const int n = 512;
    for (int i = 0; i <= n; ++i) {
        const double s = s0 + (s1 - s0) * i / n;
        const GeoState st = path.state_at(s);
        if (st.x.norm() >= r1 && dot(st.x, st.v) >= 0.0) {
            path.forward_exit = st;
            path.forward_ideal = hyp_ideal_angle(st.x, direction_angle(st.v));
            break;
        }
    }
    for (int i = 0; i <= n; ++i) {
        const double s = s1 - (s1 - s0) * i / n;
        const GeoState st = path.state_at(s);
        if (st.x.norm() >= r1 && dot(st.x, st.v) <= 0.0) {
            path.backward_exit = {st.x, -st.v};
            path.backward_ideal = hyp_ideal_angle(st.x, direction_angle(st.v) + kPi);
            break;
        }
    }
}

} // namespace

GeodesicPath integrate_ivp(const MetricField& metric, Vec2 x, Vec2 v, double length,
                           const BvpOptions& opts) {
    require_in_chart(x);
    if (length <= 0.0) throw Error("integrate_ivp requires a positive length");
    const double defect = std::abs(metric.value(x).quad(v) - 1.0);
    if (defect > 1e-9)
        throw Error("integrate_ivp requires a unit tangent, |g(v,v)-1| = " +
                    std::to_string(defect));
    IvpResult ivp = integrate_geodesic(metric, {x, v}, length, opts.step, false);
    GeodesicPath path(metric, {PathSegment::integrated(std::move(ivp.samples))});
    path.max_speed_defect = ivp.max_speed_defect;
    attach_exit_data(path, metric);
    return path;
}

double ideal_endpoint(const MetricField& metric, const GeoState& exit_state) {
    if (exit_state.x.norm() < metric.escape_radius() - 1e-12)
        throw NotEscaped("exit state inside the escape radius");
    if (dot(exit_state.x, exit_state.v) < 0.0)
        throw NotEscaped("exit state is moving inward");
    return canonical_angle(hyp_ideal_angle(exit_state.x, direction_angle(exit_state.v)));
}

DistanceResult distance(const MetricField& metric, Vec2 p, Vec2 q, const BvpOptions& opts) {
    require_in_chart(p);
    require_in_chart(q);
    if ((p - q).norm() == 0.0) throw Error("distance requires distinct endpoints");

    const double d0 = opts.init_length.value_or(hyp_distance(p, q));
    const double theta0 = opts.init_theta.value_or(hyp_dir_toward_point(p, q));

    // chords avoiding the perturbation support coincide with base-metric
    // geodesics: exact closed form
    if (!metric.is_base() && hyp_segment_min_radius(p, q) >= metric.support_radius()) {
        GeodesicPath path(metric, {PathSegment::closed(p, theta0, 0.0, 0.0, d0)});
        attach_exit_data(path, metric);
        return {d0, std::move(path), 0.0, 0};
    }

    const double rp = hyp_radius(p), rq = hyp_radius(q);
    const bool p_near = rp <= opts.near_radius_hyp;
    const bool q_near = rq <= opts.near_radius_hyp;

    if ((p_near && q_near) || metric.is_base()) {
        DirectSolution sol = [&] {
            try {
                return solve_direct(metric, p, q, theta0, d0, opts);
            } catch (const BvpNoConvergence&) {
                const double theta_b = bisect_direction(metric, p, q, theta0, d0, opts.step);
                return solve_direct(metric, p, q, theta_b, d0, opts);
            }
        }();
        GeodesicPath path(metric, {PathSegment::integrated(std::move(sol.shot.ivp.samples))});
        path.max_speed_defect = sol.shot.ivp.max_speed_defect;
        attach_exit_data(path, metric);
        return {sol.shot.L, std::move(path), sol.residual, sol.iterations};
    }

    if (p_near || q_near) {
        if (!p_near) {
            DistanceResult rev = distance(metric, q, p, opts);
            return {rev.distance, rev.path.reversed(), rev.residual, rev.iterations};
        }
        HalfSolution sol = solve_half(metric, p, q, opts);
        const double tail = hyp_distance(sol.end.state.x, q);
        const double total = sol.end.s + tail;
        std::vector<PathSegment> segs;
        segs.push_back(PathSegment::integrated(std::move(sol.end.ivp.samples)));
        segs.push_back(PathSegment::closed(sol.end.state.x, direction_angle(sol.end.state.v),
                                           sol.end.s, sol.end.s, total));
        GeodesicPath path(metric, std::move(segs));
        path.max_speed_defect = sol.end.ivp.max_speed_defect;
        attach_exit_data(path, metric);
        const double chart_res =
            (hyp_state_at(sol.end.state.x, direction_angle(sol.end.state.v), tail).x - q).norm();
        return {total, std::move(path), chart_res, sol.iterations};
    }

    // both endpoints far: entry-state shooting with exact base-metric legs
    const HypArc arc = hyp_arc_between_ideals(hyp_ideal_angle(p, theta0),
                                              hyp_ideal_angle(q, hyp_dir_toward_point(q, p)));
    const EntryInit init = entry_init_from_arc(arc, metric.escape_radius(),
                                               hyp_distance(arc.state_at(-1.0).x, p) <
                                                   hyp_distance(arc.state_at(1.0).x, p));
    EntrySolution sol = solve_entry(metric,
                                    {EntryCondition::Kind::through_point, p, 0.0},
                                    {EntryCondition::Kind::through_point, q, 0.0},
                                    init.phi, init.omega, opts);
    const double head = hyp_distance(p, sol.entry.x);
    const double tail = hyp_distance(sol.exit.state.x, q);
    const double total = head + sol.exit.s + tail;
    std::vector<PathSegment> segs;
    segs.push_back(PathSegment::closed(p, hyp_dir_toward_point(p, sol.entry.x), 0.0, 0.0, head));
    segs.push_back(PathSegment::integrated(shifted(std::move(sol.exit.ivp.samples), head)));
    segs.push_back(PathSegment::closed(sol.exit.state.x, direction_angle(sol.exit.state.v),
                                       head + sol.exit.s, head + sol.exit.s, total));
    GeodesicPath path(metric, std::move(segs));
    path.max_speed_defect = sol.exit.ivp.max_speed_defect;
    attach_exit_data(path, metric);
    const double chart_res =
        (hyp_state_at(sol.exit.state.x, direction_angle(sol.exit.state.v), tail).x - q).norm();
    if (chart_res > opts.tol)
        throw BvpNoConvergence("entry-state distance residual above tolerance", chart_res);
    return {total, std::move(path), chart_res, sol.iterations};
}

GeodesicPath ray_from(const MetricField& metric, Vec2 x, double xi, const BvpOptions& opts) {
    require_in_chart(x);
    const double nominal = opts.trunc_radius_hyp + hyp_radius(x) + 1.0;

    if (!metric.is_base() && hyp_ray_min_radius(x, xi) >= metric.support_radius()) {
        GeodesicPath path(metric, {PathSegment::closed(x, hyp_dir_toward_ideal(x, xi), 0.0, 0.0,
                                                       nominal)});
        attach_exit_data(path, metric);
        path.forward_ideal = canonical_angle(xi);
        return path;
    }

    if (hyp_radius(x) <= opts.near_radius_hyp) {
        // one-parameter shooting on the initial direction angle
        auto residual = [&](double theta) {
            ShotEnd e = shoot_until_escape(metric, x, theta, opts.step);
            const double r = wrap_angle(
                hyp_ideal_angle(e.state.x, direction_angle(e.state.v)) - xi);
            return std::pair<double, ShotEnd>(r, std::move(e));
        };
        double theta = hyp_dir_toward_ideal(x, xi);
        auto [r, end] = residual(theta);
        bool converged = std::abs(r) <= 1e-12;
        for (int iter = 0; iter < opts.max_iter && !converged; ++iter) {
            const double fd = 1e-8;
            auto [r2, e2] = residual(theta + fd);
            const double drdt = (r2 - r) / fd;
            if (drdt == 0.0) break;
            double step = -r / drdt;
            bool ok = false;
            for (int k = 0; k < 10; ++k, step *= 0.5) {
                auto [rt, et] = residual(theta + step);
                if (std::abs(rt) < std::abs(r)) {
                    theta += step;
                    r = rt;
                    end = std::move(et);
                    ok = true;
                    break;
                }
            }
            if (!ok) break;
            converged = std::abs(r) <= 1e-12;
        }
        if (std::abs(r) > 1e-8)
            throw BvpNoConvergence("ray shooting did not converge", std::abs(r));
        std::vector<PathSegment> segs;
        const double s_exit = end.s;
        segs.push_back(PathSegment::integrated(std::move(end.ivp.samples)));
        segs.push_back(PathSegment::closed(end.state.x, direction_angle(end.state.v), s_exit,
                                           s_exit, nominal));
        GeodesicPath path(metric, std::move(segs));
        path.max_speed_defect = end.ivp.max_speed_defect;
        path.forward_exit = end.state;
        path.forward_ideal = hyp_ideal_angle(end.state.x, direction_angle(end.state.v));
        return path;
    }

    // far basepoint: entry-state shooting (backward ray through x, forward
    // ideal endpoint xi)
    const HypArc arc = hyp_arc_between_ideals(xi, hyp_ideal_angle(x, hyp_dir_toward_ideal(x, xi) + kPi));
    const EntryInit init = entry_init_from_arc(arc, metric.escape_radius(), true);
    EntrySolution sol = solve_entry(metric,
                                    {EntryCondition::Kind::through_point, x, 0.0},
                                    {EntryCondition::Kind::ideal_angle, {}, xi},
                                    init.phi, init.omega, opts);
    const double head = hyp_distance(x, sol.entry.x);
    std::vector<PathSegment> segs;
    segs.push_back(PathSegment::closed(x, hyp_dir_toward_point(x, sol.entry.x), 0.0, 0.0, head));
    segs.push_back(PathSegment::integrated(shifted(std::move(sol.exit.ivp.samples), head)));
    segs.push_back(PathSegment::closed(sol.exit.state.x, direction_angle(sol.exit.state.v),
                                       head + sol.exit.s, head + sol.exit.s, nominal));
    GeodesicPath path(metric, std::move(segs));
    path.max_speed_defect = sol.exit.ivp.max_speed_defect;
    path.forward_exit = sol.exit.state;
    path.forward_ideal =
        hyp_ideal_angle(sol.exit.state.x, direction_angle(sol.exit.state.v));
    return path;
}

GeodesicPath geodesic_between_ideals(const MetricField& metric, double xi, double eta,
                                     const BvpOptions& opts) {
    if (wrap_angle(xi - eta) == 0.0) throw Error("degenerate ideal pair xi = eta");
    const HypArc arc = hyp_arc_between_ideals(xi, eta);
    const double R = opts.trunc_radius_hyp;

    if (arc.min_radius >= metric.support_radius()) {
        // the arc avoids the perturbation: it is the g-geodesic, closed form,
        // with s = 0 at the closest point to the origin
        const double Rc = hyp_radius(arc.closest);
        const double smax = Rc >= R ? 1.0 : std::acosh(std::cosh(R) / std::cosh(Rc));
        GeodesicPath path(metric,
                          {PathSegment::closed(arc.closest, arc.dir, 0.0, -smax, smax)});
        attach_exit_data(path, metric);
        path.forward_ideal = canonical_angle(xi);
        path.backward_ideal = canonical_angle(eta);
        return path;
    }

    const EntryInit init = entry_init_from_arc(arc, metric.escape_radius(), true);
    EntrySolution sol = solve_entry(metric,
                                    {EntryCondition::Kind::ideal_angle, {}, eta},
                                    {EntryCondition::Kind::ideal_angle, {}, xi},
                                    init.phi, init.omega, opts);

    const double fwd_angle =
        hyp_ideal_angle(sol.exit.state.x, direction_angle(sol.exit.state.v));
    const double bwd_angle = hyp_ideal_angle(sol.entry.x, direction_angle(sol.entry.v) + kPi);
    const double mismatch =
        std::max(std::abs(wrap_angle(fwd_angle - xi)), std::abs(wrap_angle(bwd_angle - eta)));
    if (mismatch > 1e-6)
        throw EndpointMismatch("recovered ideal endpoints disagree with the requested pair",
                               mismatch);

    // backward leg to hyperbolic radius R: bisect the arclength
    const double dir_back = direction_angle(sol.entry.v) + kPi;
    auto back_radius = [&](double s) { return hyp_radius(hyp_state_at(sol.entry.x, dir_back, s).x); };
    double lo = 0.0, hi = R + hyp_radius(sol.entry.x) + 1.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (back_radius(mid) < R ? lo : hi) = mid;
    }
    const double Lb = 0.5 * (lo + hi);
    const Vec2 B = hyp_state_at(sol.entry.x, dir_back, Lb).x;

    auto fwd_radius = [&](double s) {
        return hyp_radius(
            hyp_state_at(sol.exit.state.x, direction_angle(sol.exit.state.v), s).x);
    };
    lo = 0.0;
    hi = R + hyp_radius(sol.exit.state.x) + 1.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (fwd_radius(mid) < R ? lo : hi) = mid;
    }
    const double Lf = 0.5 * (lo + hi);

    std::vector<PathSegment> segs;
    segs.push_back(
        PathSegment::closed(B, hyp_dir_toward_point(B, sol.entry.x), -Lb, -Lb, 0.0));
    segs.push_back(PathSegment::integrated(sol.exit.ivp.samples));
    segs.push_back(PathSegment::closed(sol.exit.state.x, direction_angle(sol.exit.state.v),
                                       sol.exit.s, sol.exit.s, sol.exit.s + Lf));
    GeodesicPath path(metric, std::move(segs));
    path.max_speed_defect = sol.exit.ivp.max_speed_defect;
    path.forward_exit = sol.exit.state;
    path.backward_exit = {sol.entry.x, -sol.entry.v};
    path.forward_ideal = fwd_angle;
    path.backward_ideal = bwd_angle;
    return path;
}

} // namespace hyplab
