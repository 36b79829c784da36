#include "hyplab/variation.hpp"

#include <cmath>

#include "hyplab/geometry_ops.hpp"
#include "hyplab/hyperbolic.hpp"

namespace hyplab {

namespace {

// renormalized squared-distance functional (d_{g_t}^2 - d_{g_0}^2)/d_{g_0}
double renormalized_sq(const MetricFamily& family, Vec2 p, Vec2 q, double t, double a,
                       const BvpOptions& bvp) {
    const double d = distance(family.at(t), p, q, bvp).distance;
    return (d * d - a * a) / a;
}

double energy_rhs(const MetricFamily& family, Vec2 p, Vec2 q, double t, double a,
                  const VariationOptions& opts) {
    // int_0^a gdot(gamma_t') ds on [0, a] at constant speed d_t/a equals
    // (d_t/a) * (unit-speed integral along the g_t-geodesic)
    const DistanceResult res = distance(family.at(t), p, q, opts.bvp);
    const RayTransformValue unit = integrate_tensor_along(res.path, family.velocity(t),
                                                          res.path.s_begin(), res.path.s_end(),
                                                          opts.quad);
    return res.distance / a * unit.value;
}

double schwarzian2(const MetricFamily& family, double xi, double eta, double t,
                   const SchwarzianOptions& opts) {
    const MetricField g = family.at(t);
    return 2.0 * schwarzian_via_limit(MetricField::hyperbolic(), g, xi, eta, opts).value;
}

} // namespace

VariationEntry distance_variation_check(const MetricFamily& family, Vec2 p, Vec2 q, double t,
                                        const VariationOptions& opts) {
    if ((p - q).norm() == 0.0) throw Error("distance variation requires distinct endpoints");
    VariationEntry e;
    e.t = t;
    const double a = hyp_distance(p, q);
    const double dt = opts.dt;
    e.lhs = (renormalized_sq(family, p, q, t + dt, a, opts.bvp) -
             renormalized_sq(family, p, q, t - dt, a, opts.bvp)) /
            (2.0 * dt);
    e.rhs = energy_rhs(family, p, q, t, a, opts);
    e.abs_err = std::abs(e.lhs - e.rhs);
    e.rel_err = e.abs_err / std::max(1e-12, std::abs(e.rhs));
    return e;
}

namespace {

double order_estimate_from(const std::function<double(double)>& fd, double reference,
                           double dt_big) {
    const double e1 = std::abs(fd(dt_big) - reference);
    const double e2 = std::abs(fd(0.5 * dt_big) - reference);
    if (e2 <= 0.0) return 4.0;
    return std::log2(e1 / e2);
}

} // namespace

VariationReport distance_variation_scan(const MetricFamily& family, Vec2 p, Vec2 q,
                                        const std::vector<double>& t_grid,
                                        const VariationOptions& opts, par::Exec exec) {
    VariationReport rep;
    rep.entries.resize(t_grid.size());
    par::for_index(t_grid.size(), [&](std::size_t i) {
        rep.entries[i] = distance_variation_check(family, p, q, t_grid[i], opts);
    }, exec);
    for (const auto& e : rep.entries) rep.max_rel_err = std::max(rep.max_rel_err, e.rel_err);

    const double a = hyp_distance(p, q);
    const double t_mid = t_grid[t_grid.size() / 2];
    const double ref = energy_rhs(family, p, q, t_mid, a, opts);
    rep.order_estimate = order_estimate_from(
        [&](double dt) {
            return (renormalized_sq(family, p, q, t_mid + dt, a, opts.bvp) -
                    renormalized_sq(family, p, q, t_mid - dt, a, opts.bvp)) /
                   (2.0 * dt);
        },
        ref, opts.dt_order);
    return rep;
}

VariationReport schwarzian_variation_check(const MetricFamily& family, double xi, double eta,
                                           const std::vector<double>& t_grid,
                                           const VariationOptions& opts, par::Exec exec) {
    VariationReport rep;
    rep.entries.resize(t_grid.size());
    par::for_index(t_grid.size(), [&](std::size_t i) {
        const double t = t_grid[i];
        VariationEntry e;
        e.t = t;
        e.lhs = (schwarzian2(family, xi, eta, t + opts.dt, opts.schwarzian) -
                 schwarzian2(family, xi, eta, t - opts.dt, opts.schwarzian)) /
                (2.0 * opts.dt);
        e.rhs = ray_transform(family.at(t), family.velocity(t), xi, eta, opts.bvp, opts.quad)
                    .value;
        e.abs_err = std::abs(e.lhs - e.rhs);
        e.rel_err = e.abs_err / std::max(1e-12, std::abs(e.rhs));
        rep.entries[i] = e;
    }, exec);
    for (const auto& e : rep.entries) rep.max_rel_err = std::max(rep.max_rel_err, e.rel_err);

    const double t_mid = t_grid[t_grid.size() / 2];
    const double ref =
        ray_transform(family.at(t_mid), family.velocity(t_mid), xi, eta, opts.bvp, opts.quad)
            .value;
    rep.order_estimate = order_estimate_from(
        [&](double dt) {
            return (schwarzian2(family, xi, eta, t_mid + dt, opts.schwarzian) -
                    schwarzian2(family, xi, eta, t_mid - dt, opts.schwarzian)) /
                   (2.0 * dt);
        },
        ref, opts.dt_order);
    return rep;
}

VolumeInequalityReport volume_inequality_check(const CdrmDisk& M, const SymTensorField& f,
                                               double sup_norm_cap) {
    VolumeInequalityReport rep;
    const MetricField base = MetricField::hyperbolic();
    const double rM = M.radius();

    // operator sup norm of f against g0 over a sampling grid
    for (int i = 0; i < 48; ++i)
        for (int j = 0; j < 96; ++j) {
            const double r = (i + 0.5) / 48 * rM;
            const double th = kTwoPi * j / 96;
            const Vec2 p{r * std::cos(th), r * std::sin(th)};
            const Sym2 fv = f.value(p);
            const Sym2 ginv = base.value(p).inverse();
            // eigenvalues of g0^{-1} f
            const double m11 = ginv.xx * fv.xx + ginv.xy * fv.xy;
            const double m12 = ginv.xx * fv.xy + ginv.xy * fv.yy;
            const double m21 = ginv.xy * fv.xx + ginv.yy * fv.xy;
            const double m22 = ginv.xy * fv.xy + ginv.yy * fv.yy;
            const double tr = m11 + m22, det = m11 * m22 - m12 * m21;
            const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
            rep.sup_norm = std::max({rep.sup_norm, std::abs(0.5 * (tr + disc)),
                                     std::abs(0.5 * (tr - disc))});
        }

    const MetricField perturbed = MetricField::perturbed(f);
    rep.volume_perturbed = volume(perturbed, rM).value;
    rep.volume_base = volume(base, rM).value;
    rep.hypothesis_met =
        rep.sup_norm <= sup_norm_cap && rep.volume_perturbed <= rep.volume_base + 1e-12;
    if (!rep.hypothesis_met) return rep;

    rep.lhs = l2_inner(base, SymTensorField::metric_tensor(base), f, rM);
    rep.rhs = 2.0 / 3.0 * l2_inner(base, f, f, rM);
    rep.pass = rep.lhs <= rep.rhs + 1e-10;
    return rep;
}

PipelineReport triviality_reconstruction(const MetricFamily& family, const CdrmDisk& M,
                                         const PipelineOptions& opts, par::Exec exec) {
    PipelineReport rep;
    rep.t_values = opts.t_grid;

    // stage (a): the ray transform of the velocity must vanish
    {
        const auto rays = sample_boundary_pairs(opts.seed, opts.rays_per_t, 0.5);
        std::vector<double> worst(opts.t_grid.size(), 0.0);
        par::for_index(opts.t_grid.size(), [&](std::size_t i) {
            const double t = opts.t_grid[i];
            const MetricField g = family.at(t);
            const SymTensorField vel = family.velocity(t);
            double w = 0.0;
            for (const auto& ray : rays)
                w = std::max(w, std::abs(
                        ray_transform(g, vel, ray.xi, ray.eta, opts.bvp, opts.quad).value));
            worst[i] = w;
        }, exec);
        for (const double w : worst) rep.stage_a_max_transform = std::max(rep.stage_a_max_transform, w);
        if (rep.stage_a_max_transform > opts.stage_a_tol) {
            rep.failed_stage = "a: ray transform of the velocity is nonzero";
            return rep;
        }
    }

    // stage (b): solenoidal decompositions of gdot_t with respect to g_t at
    // all flow substep times
    const double t_end = opts.t_grid.back();
    const int n_grid_steps = static_cast<int>(opts.t_grid.size()) - 1;
    const double big_dt = n_grid_steps > 0 ? (t_end - opts.t_grid.front()) / n_grid_steps : 1.0;
    const double h = 0.25 * big_dt;   // RK4 flow step
    const int n_steps = std::max(1, static_cast<int>(std::round((t_end - opts.t_grid.front()) / h)));
    const double h_eff = (t_end - opts.t_grid.front()) / n_steps;

    std::vector<double> sub_times;
    for (int k = 0; k <= 2 * n_steps; ++k)
        sub_times.push_back(opts.t_grid.front() + 0.5 * h_eff * k);

    std::vector<SolenoidalDecomposition> decomps;
    decomps.reserve(sub_times.size());
    double floor_rel = 0.0;
    {
        // relative grid floor from a manufactured potential field
        const OneFormField v_ref = OneFormField::bumps(
            {{{0.03, -0.05}, 0.5 * M.metric().support_radius() + 0.05, {0.02, -0.01}}});
        const MetricField g_ref = family.at(opts.t_grid.front());
        const SolenoidalDecomposition ref = solenoidal_decompose(
            M, sym_derivative(g_ref, v_ref), opts.grid, opts.cg, exec);
        floor_rel = ref.f_l2 > 0.0 ? ref.s_l2 / ref.f_l2 : 0.0;
    }
    for (const double tau : sub_times) {
        const CdrmDisk Mt(family.at(tau), M.radius());
        decomps.push_back(solenoidal_decompose(Mt, family.velocity(tau), opts.grid, opts.cg, exec));
        const SolenoidalDecomposition& d = decomps.back();
        if (d.f_l2 > 1e-14)
            rep.stage_b_max_rel_solenoidal =
                std::max(rep.stage_b_max_rel_solenoidal, d.s_l2 / d.f_l2);
    }
    if (rep.stage_b_max_rel_solenoidal > std::max(20.0 * floor_rel, 1e-8)) {
        rep.failed_stage = "b: velocity is not potential at grid resolution";
        return rep;
    }

    // stage (c): integrate x' = -v_t#(x) for the verification points
    std::vector<Vec2> points;
    for (int i = 1; i <= opts.check_n_r; ++i)
        for (int j = 0; j < opts.check_n_theta; ++j) {
            const double r = M.radius() * 0.95 * i / opts.check_n_r;
            const double th = kTwoPi * (j + 0.3) / opts.check_n_theta;
            points.push_back({r * std::cos(th), r * std::sin(th)});
        }
    const std::vector<Vec2> outside = {{0.85, 0.1}, {-0.2, 0.88}, {0.6, -0.68}};

    auto velocity_at = [&](int sub_index, Vec2 x) -> Vec2 {
        const double tau = sub_times[sub_index];
        const Vec2 v_form = decomps[sub_index].v_at(x);
        const Sym2 ginv = family.at(tau).value(x).inverse();
        return ginv.apply(v_form) * -1.0;   // minus the raised decomposition field
    };

    // flow all points (plus FD satellites for the pullback Jacobian)
    const double fd = 1e-4;
    std::vector<std::vector<Vec2>> flows;   // per point: center, +x, -x, +y, -y
    for (const Vec2 p : points)
        flows.push_back({p, {p.x + fd, p.y}, {p.x - fd, p.y}, {p.x, p.y + fd}, {p.x, p.y - fd}});
    std::vector<std::vector<Vec2>> outside_flow;
    for (const Vec2 p : outside) outside_flow.push_back({p});

    rep.pullback_residual.assign(opts.t_grid.size(), 0.0);
    rep.identity_outside.assign(opts.t_grid.size(), 0.0);
    rep.known_map_mismatch.assign(opts.t_grid.size(), 0.0);

    std::size_t next_check = 0;
    auto run_checks = [&](double t) {
        while (next_check < opts.t_grid.size() &&
               std::abs(opts.t_grid[next_check] - t) < 1e-9) {
            double worst = 0.0, worst_out = 0.0, worst_known = 0.0;
            const MetricField gt = family.at(t);
            for (std::size_t pi = 0; pi < points.size(); ++pi) {
                const Vec2 y = flows[pi][0];
                // Jacobian of f_t by central differences of the satellites
                const Vec2 dx = (flows[pi][1] - flows[pi][2]) * (1.0 / (2.0 * fd));
                const Vec2 dy = (flows[pi][3] - flows[pi][4]) * (1.0 / (2.0 * fd));
                const Sym2 g = gt.value(y);
                Sym2 pb;   // (Df)^T g(f(x)) Df
                pb.xx = g.quad(dx);
                pb.xy = g.pair(dx, dy);
                pb.yy = g.quad(dy);
                const Sym2 g0v = MetricField::hyperbolic().value(points[pi]);
                worst = std::max(worst, max_abs(pb - g0v) / g0v.xx);
            }
            for (std::size_t pi = 0; pi < outside.size(); ++pi)
                worst_out = std::max(worst_out, (outside_flow[pi][0] - outside[pi]).norm());
            if (opts.expected_map)
                for (std::size_t pi = 0; pi < points.size(); ++pi)
                    worst_known = std::max(
                        worst_known, (flows[pi][0] - opts.expected_map(points[pi], t)).norm());
            rep.pullback_residual[next_check] = worst;
            rep.identity_outside[next_check] = worst_out;
            rep.known_map_mismatch[next_check] = worst_known;
            ++next_check;
        }
    };

    run_checks(opts.t_grid.front());
    for (int k = 0; k < n_steps; ++k) {
        auto step_all = [&](std::vector<std::vector<Vec2>>& traj) {
            par::for_index(traj.size(), [&](std::size_t pi) {
                for (Vec2& x : traj[pi]) {
                    // classical RK4 across [t_k, t_k + h]
                    const Vec2 k1 = velocity_at(2 * k, x);
                    const Vec2 k2 = velocity_at(2 * k + 1, x + 0.5 * h_eff * k1);
                    const Vec2 k3 = velocity_at(2 * k + 1, x + 0.5 * h_eff * k2);
                    const Vec2 k4 = velocity_at(2 * k + 2, x + h_eff * k3);
                    x += h_eff / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                }
            }, exec);
        };
        step_all(flows);
        step_all(outside_flow);
        run_checks(opts.t_grid.front() + (k + 1) * h_eff);
    }

    double worst_residual = 0.0;
    for (const double r : rep.pullback_residual) worst_residual = std::max(worst_residual, r);
    const double residual_floor = std::max(20.0 * floor_rel, 1e-6);
    if (worst_residual > residual_floor) {
        rep.failed_stage = "d: pullback residual above the grid floor";
        return rep;
    }
    rep.pass = true;
    return rep;
}

} // namespace hyplab
