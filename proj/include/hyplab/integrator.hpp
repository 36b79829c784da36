#pragma once
#include <functional>
#include <vector>

#include "hyplab/fields.hpp"
#include "hyplab/hyperbolic.hpp"

// Adaptive Dormand-Prince 5(4) integration of the geodesic equation in chart
// coordinates, plus a fixed-step RK4 used for quadrature along paths. Unit
// speed is never renormalized; the drift is monitored as an accuracy
// diagnostic.

namespace hyplab {

struct PathSample {
    double s = 0.0;
    Vec2 x, v;
};

struct StepControl {
    double rtol = 1e-12;
    double atol = 1e-12;
    double max_step = 0.25;
    double initial_step = 1e-3;
    std::size_t max_steps = 2'000'000;
};

// acceleration of the geodesic flow: a^k = -Gamma^k_{ij} v^i v^j
Vec2 geodesic_acceleration(const MetricField& metric, Vec2 x, Vec2 v);

struct IvpResult {
    std::vector<PathSample> samples;   // accepted steps, s starting at 0
    double max_speed_defect = 0.0;     // max |g(v,v) - 1| over samples
    bool escaped = false;              // crossed the escape radius moving outward
    std::size_t escape_index = 0;      // sample index at which escape was detected
};

// Integrate for the given arclength. If stop_at_escape is set, integration
// halts at the first accepted step with |x| >= escape_radius and outward
// radial velocity (the remaining trajectory is pure base metric and is
// continued in closed form by callers).
IvpResult integrate_geodesic(const MetricField& metric, GeoState start, double length,
                             const StepControl& ctl, bool stop_at_escape,
                             double max_chart_radius2 = 1.0 - 1e-10);

// classical RK4 step of the geodesic flow
GeoState rk4_geodesic_step(const MetricField& metric, const GeoState& y, double h);

} // namespace hyplab
