#include "hyplab/boundary.hpp"

#include <cmath>

#include "hyplab/hyperbolic.hpp"

namespace hyplab {

namespace {

// ladder of truncation parameters: placed from the closed-form estimate of
// the Gromov product (the tail decays like exp(-2(T - (xi|eta)))), capped at
// t_max where chart-coordinate BVP residuals stop being resolvable
std::vector<double> gromov_ladder(double product_estimate, double t_max) {
    const double hi = std::min(std::max(product_estimate, 0.0) + 9.5, t_max);
    const double lo = std::max(4.0, hi - 6.0);
    return {lo, lo + (hi - lo) / 3.0, lo + 2.0 * (hi - lo) / 3.0, hi};
}

void require_distinct(double xi, double eta) {
    if (wrap_angle(xi - eta) == 0.0)
        throw Error("ideal points must be distinct");
}

} // namespace

// Stabilization rule for exponentially Cauchy ladders: either the last
// increment is below tol, or the increments contract geometrically and the
// estimated remaining tail inc * r/(1-r) is below tol.
bool ladder_converged(const std::vector<std::pair<double, double>>& history, double tol) {
    const std::size_t n = history.size();
    if (n < 2) return false;
    const double inc = std::abs(history[n - 1].second - history[n - 2].second);
    if (inc < tol) return true;
    if (n < 3) return false;
    const double prev = std::abs(history[n - 2].second - history[n - 3].second);
    if (prev <= 0.0) return false;
    const double r = inc / prev;
    return r <= 0.6 && inc * r / (1.0 - r) < tol;
}

BoundaryMeasurement gromov_product(const MetricField& metric, Vec2 x, double xi, double eta,
                                   const LadderOptions& opts) {
    require_distinct(xi, eta);
    BoundaryMeasurement m;
    m.kind = MeasurementKind::gromov_product;

    const GeodesicPath ray_xi = ray_from(metric, x, xi, opts.bvp);
    const GeodesicPath ray_eta = ray_from(metric, x, eta, opts.bvp);

    const double estimate = hyp_gromov_product(x, xi, eta);
    for (const double T : gromov_ladder(estimate, opts.t_max)) {
        const Vec2 a = ray_xi.state_at(T).x;
        const Vec2 b = ray_eta.state_at(T).x;
        // d(x, a_T) = T exactly: rays are minimizing geodesics
        const double value = T - 0.5 * distance(metric, a, b, opts.bvp).distance;
        m.history.push_back({T, value});
        m.truncation = T;
        m.value = value;
        if (ladder_converged(m.history, opts.tol)) {
            m.converged = true;
            break;
        }
    }
    if (!m.converged)
        throw NotConverged("Gromov product ladder did not stabilize at T_max = " +
                           std::to_string(opts.t_max));
    return m;
}

BoundaryMeasurement visual_distance(const MetricField& metric, Vec2 x, double xi, double eta,
                                    const LadderOptions& opts) {
    BoundaryMeasurement m = gromov_product(metric, x, xi, eta, opts);
    if (m.value < -1e-6)
        throw Error("negative Gromov product for distinct boundary points: " +
                    std::to_string(m.value));
    m.kind = MeasurementKind::visual_distance;
    m.value = std::exp(-m.value);
    for (auto& h : m.history) h.second = std::exp(-h.second);
    return m;
}

BoundaryMeasurement busemann(const MetricField& metric, double xi, Vec2 x, Vec2 y,
                             const LadderOptions& opts) {
    BoundaryMeasurement m;
    m.kind = MeasurementKind::busemann;
    if ((x - y).norm() == 0.0) {
        m.converged = true;
        m.history.push_back({0.0, 0.0});
        return m;
    }
    const GeodesicPath ray = ray_from(metric, {0.0, 0.0}, xi, opts.bvp);
    const double shift = std::max(hyp_radius(x), hyp_radius(y));
    for (const double T0 : {6.0, 9.0, 12.0, 15.0}) {
        const double T = std::min(T0 + shift, opts.t_max);
        const Vec2 a = ray.state_at(T).x;
        const double value = distance(metric, x, a, opts.bvp).distance -
                             distance(metric, y, a, opts.bvp).distance;
        m.history.push_back({T, value});
        m.truncation = T;
        m.value = value;
        if (ladder_converged(m.history, opts.tol)) {
            m.converged = true;
            break;
        }
    }
    if (!m.converged)
        throw NotConverged("Busemann ladder did not stabilize at T_max = " +
                           std::to_string(opts.t_max));
    return m;
}

namespace {

double log_cross_ratio(const MetricField& metric, Vec2 x, const Quadruple& q,
                       const LadderOptions& opts, double* max_truncation) {
    const double g_xi_eta = gromov_product(metric, x, q.xi, q.eta, opts).value;
    const double g_xi2_eta2 = gromov_product(metric, x, q.xi2, q.eta2, opts).value;
    const BoundaryMeasurement g_xi_eta2 = gromov_product(metric, x, q.xi, q.eta2, opts);
    const BoundaryMeasurement g_xi2_eta = gromov_product(metric, x, q.xi2, q.eta, opts);
    if (max_truncation)
        *max_truncation = std::max(g_xi_eta2.truncation, g_xi2_eta.truncation);
    // log CR = -(xi|eta) - (xi2|eta2) + (xi|eta2) + (xi2|eta)
    return -g_xi_eta - g_xi2_eta2 + g_xi_eta2.value + g_xi2_eta.value;
}

void require_distinct(const Quadruple& q) {
    const double a[4] = {q.xi, q.xi2, q.eta, q.eta2};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (wrap_angle(a[i] - a[j]) == 0.0)
                throw Error("cross-ratio requires four pairwise distinct ideal points");
}

} // namespace

BoundaryMeasurement cross_ratio(const MetricField& metric, Vec2 x, double xi, double xi2,
                                double eta, double eta2, const LadderOptions& opts) {
    const Quadruple q{xi, xi2, eta, eta2};
    require_distinct(q);
    BoundaryMeasurement m;
    m.kind = MeasurementKind::cross_ratio;
    double trunc = 0.0;
    const double log_cr = log_cross_ratio(metric, x, q, opts, &trunc);
    m.value = std::exp(log_cr);
    m.truncation = trunc;
    m.converged = true;   // component ladders throw when they fail
    m.history.push_back({trunc, m.value});
    return m;
}

namespace {

double visual_for_derivative(const MetricField& metric, Vec2 base, double a, double b,
                             const LadderOptions& opts) {
    // the unperturbed reference metric admits the closed form; the deformed
    // side always goes through the numerical ladder
    if (metric.is_base()) return hyp_visual_distance(base, a, b);
    return visual_distance(metric, base, a, b, opts).value;
}

} // namespace

BoundaryMeasurement conformal_derivative(const MetricField& g0, const MetricField& g, double xi,
                                         Vec2 x, Vec2 y, const LadderOptions& opts) {
    BoundaryMeasurement m;
    m.kind = MeasurementKind::conformal_derivative;

    // The nearby-pair products sit close to the T_max certification budget;
    // the ratio only needs relative accuracy at the Richardson tolerance, so
    // the inner ladders run at a matching (looser) stabilization tolerance.
    LadderOptions inner = opts;
    inner.tol = std::max(opts.tol, 0.1 * opts.deriv_tol);

    // two-sided ratios kill the odd offset error, one Richardson step in
    // delta^2 removes the leading even term
    auto ratio = [&](double delta) {
        const double plus = visual_for_derivative(g, y, xi, xi + delta, inner) /
                            visual_for_derivative(g0, x, xi, xi + delta, inner);
        const double minus = visual_for_derivative(g, y, xi, xi - delta, inner) /
                             visual_for_derivative(g0, x, xi, xi - delta, inner);
        return 0.5 * (plus + minus);
    };

    const double deltas[3] = {1e-2, 5e-3, 2.5e-3};
    double r[3];
    for (int i = 0; i < 3; ++i) {
        r[i] = ratio(deltas[i]);
        m.history.push_back({deltas[i], r[i]});
    }
    const double rich_a = (4.0 * r[1] - r[0]) / 3.0;
    const double rich_b = (4.0 * r[2] - r[1]) / 3.0;
    m.value = rich_b;
    m.truncation = deltas[2];
    m.converged = std::abs(rich_b - rich_a) < opts.deriv_tol * std::max(1.0, std::abs(rich_b));
    if (!m.converged)
        throw NotConverged("conformal derivative Richardson ladder did not stabilize");
    return m;
}

MoebiusReport moebius_deviation(const MetricField& g0, const MetricField& g,
                                const std::vector<Quadruple>& quadruples,
                                const LadderOptions& opts, par::Exec exec) {
    MoebiusReport rep;
    rep.entries.resize(quadruples.size());
    par::for_index(quadruples.size(), [&](std::size_t i) {
        const Quadruple& q = quadruples[i];
        require_distinct(q);
        QuadrupleDeviation e;
        e.quadruple = q;
        e.log_cr_g = log_cross_ratio(g, {0.0, 0.0}, q, opts, nullptr);
        e.log_cr_g0 = log_cross_ratio(g0, {0.0, 0.0}, q, opts, nullptr);
        e.deviation = std::abs(e.log_cr_g - e.log_cr_g0);
        rep.entries[i] = e;
    }, exec);
    for (const auto& e : rep.entries) rep.max_deviation = std::max(rep.max_deviation, e.deviation);
    return rep;
}

} // namespace hyplab
