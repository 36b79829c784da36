#include "hyplab/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "hyplab/geometry_ops.hpp"

namespace hyplab {

Vec2 geodesic_acceleration(const MetricField& metric, Vec2 x, Vec2 v) {
    const auto gamma = christoffel(metric, x);
    return {-gamma[0].quad(v), -gamma[1].quad(v)};
}

namespace {

struct State4 {
    double y[4];

    static State4 from(const GeoState& g) { return {{g.x.x, g.x.y, g.v.x, g.v.y}}; }
    GeoState to_geo() const { return {{y[0], y[1]}, {y[2], y[3]}}; }
};

State4 rhs(const MetricField& metric, const State4& s) {
    const Vec2 x{s.y[0], s.y[1]}, v{s.y[2], s.y[3]};
    const Vec2 a = geodesic_acceleration(metric, x, v);
    return {{v.x, v.y, a.x, a.y}};
}

State4 axpy(const State4& base, double h, const double c[7], const State4 k[7], int n) {
    State4 out = base;
    for (int i = 0; i < 4; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += c[j] * k[j].y[i];
        out.y[i] += h * acc;
    }
    return out;
}

// Dormand-Prince 5(4) coefficients
constexpr double A2[] = {1.0 / 5};
constexpr double A3[] = {3.0 / 40, 9.0 / 40};
constexpr double A4[] = {44.0 / 45, -56.0 / 15, 32.0 / 9};
constexpr double A5[] = {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729};
constexpr double A6[] = {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
                         -5103.0 / 18656};
constexpr double B5[] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84};
constexpr double E[] = {35.0 / 384 - 5179.0 / 57600, 0.0, 500.0 / 1113 - 7571.0 / 16695,
                        125.0 / 192 - 393.0 / 640, -2187.0 / 6784 + 92097.0 / 339200,
                        11.0 / 84 - 187.0 / 2100, -1.0 / 40};

} // namespace

IvpResult integrate_geodesic(const MetricField& metric, GeoState start, double length,
                             const StepControl& ctl, bool stop_at_escape,
                             double max_chart_radius2) {
    IvpResult out;
    const double escape_r2 = metric.escape_radius() * metric.escape_radius();

    State4 y = State4::from(start);
    double s = 0.0;
    double h = std::min({ctl.initial_step, ctl.max_step, length});
    State4 k[7];
    k[0] = rhs(metric, y);

    auto record = [&](double at, const State4& st) {
        out.samples.push_back({at, {st.y[0], st.y[1]}, {st.y[2], st.y[3]}});
        const Vec2 x{st.y[0], st.y[1]}, v{st.y[2], st.y[3]};
        const double defect = std::abs(metric.value(x).quad(v) - 1.0);
        out.max_speed_defect = std::max(out.max_speed_defect, defect);
    };
    record(0.0, y);

    std::size_t steps = 0;
    while (s < length) {
        if (++steps > ctl.max_steps)
            throw Error("geodesic integrator exceeded the step budget");
        h = std::min(h, length - s);

        k[1] = rhs(metric, axpy(y, h, A2, k, 1));
        k[2] = rhs(metric, axpy(y, h, A3, k, 2));
        k[3] = rhs(metric, axpy(y, h, A4, k, 3));
        k[4] = rhs(metric, axpy(y, h, A5, k, 4));
        k[5] = rhs(metric, axpy(y, h, A6, k, 5));
        const State4 y5 = axpy(y, h, B5, k, 6);
        k[6] = rhs(metric, y5);

        double err = 0.0;
        for (int i = 0; i < 4; ++i) {
            double e = 0.0;
            for (int j = 0; j < 7; ++j) e += E[j] * k[j].y[i];
            e *= h;
            const double w = ctl.atol + ctl.rtol * std::max(std::abs(y.y[i]), std::abs(y5.y[i]));
            err += (e / w) * (e / w);
        }
        err = std::sqrt(err / 4.0);

        if (err <= 1.0) {
            y = y5;
            s += h;
            k[0] = k[6];   // FSAL
            record(s, y);
            const Vec2 x{y.y[0], y.y[1]}, v{y.y[2], y.y[3]};
            if (x.norm2() >= max_chart_radius2)
                throw ChartEscape("trajectory too close to the chart boundary; "
                                  "use escape continuation instead");
            if (stop_at_escape && x.norm2() >= escape_r2 && dot(x, v) >= 0.0) {
                out.escaped = true;
                out.escape_index = out.samples.size() - 1;
                return out;
            }
        }
        const double scale = 0.9 * std::pow(std::max(err, 1e-12), -0.2);
        h *= std::clamp(scale, 0.2, 5.0);
        h = std::min(h, ctl.max_step);
        if (h < 1e-14) throw Error("geodesic integrator step collapsed");
    }
    return out;
}

GeoState rk4_geodesic_step(const MetricField& metric, const GeoState& y, double h) {
    const State4 y0 = State4::from(y);
    const State4 k1 = rhs(metric, y0);
    const double half[] = {0.5};
    const State4 k2 = rhs(metric, axpy(y0, h, half, &k1, 1));
    const State4 k3 = rhs(metric, axpy(y0, h, half, &k2, 1));
    const double one[] = {1.0};
    const State4 k4 = rhs(metric, axpy(y0, h, one, &k3, 1));
    State4 out = y0;
    for (int i = 0; i < 4; ++i)
        out.y[i] += h / 6.0 * (k1.y[i] + 2.0 * k2.y[i] + 2.0 * k3.y[i] + k4.y[i]);
    return out.to_geo();
}

} // namespace hyplab
