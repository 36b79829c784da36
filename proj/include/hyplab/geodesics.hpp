#pragma once
#include <optional>
#include <vector>

#include "hyplab/integrator.hpp"

// Geodesics of a compactly supported deformation: initial-value integration,
// two-point boundary problems (distances), rays to ideal points and
// bi-infinite geodesics between ideal points.
//
// Paths are sequences of segments: integrated segments carry the accepted
// RK45 samples (Hermite interpolation in between), closed-form segments are
// exact base-metric geodesics described by an anchor state. Builders place
// closed-form segments exactly where the trajectory is guaranteed to run in
// the unperturbed metric (outside the escape radius, moving outward).

namespace hyplab {

struct PathSegment {
    enum class Kind { integrated, closed_form };
    Kind kind = Kind::closed_form;
    double s0 = 0.0, s1 = 0.0;

    std::vector<PathSample> samples;   // integrated: covers [s0, s1]

    Vec2 anchor;                        // closed_form: state_at(s) =
    double anchor_dir = 0.0;            //   hyp_state_at(anchor, dir, s - anchor_s)
    double anchor_s = 0.0;

    static PathSegment closed(Vec2 anchor, double dir, double anchor_s, double s0, double s1);
    static PathSegment integrated(std::vector<PathSample> samples);
};

class GeodesicPath {
public:
    GeodesicPath(MetricField metric, std::vector<PathSegment> segments);

    double s_begin() const { return s_begin_; }
    double s_end() const { return s_end_; }
    double length() const { return s_end_ - s_begin_; }

    // Exact on closed-form segments, cubic Hermite on integrated ones.
    // Parameters beyond the nominal range are continued along terminal
    // closed-form segments (pure base metric there).
    GeoState state_at(double s) const;

    const MetricField& metric() const { return metric_; }
    const std::vector<PathSegment>& segments() const { return segments_; }

    std::optional<double> forward_ideal;    // ideal endpoint angles
    std::optional<double> backward_ideal;
    std::optional<GeoState> forward_exit;   // exit states at the escape radius
    std::optional<GeoState> backward_exit;  // (backward: velocity points backward)
    double max_speed_defect = 0.0;

    GeodesicPath reversed() const;

    struct FlatSample {
        double s;
        Vec2 x, v;
        double speed_defect;
    };
    // resampled trace for CSV export
    std::vector<FlatSample> trace(double ds) const;

private:
    MetricField metric_;
    std::vector<PathSegment> segments_;
    double s_begin_ = 0.0, s_end_ = 0.0;
};

struct BvpOptions {
    double tol = 1e-9;                // chart-coordinate endpoint residual
    int max_iter = 50;
    double near_radius_hyp = 6.0;     // direct shooting below this radius
    double trunc_radius_hyp = 15.0;   // truncation of bi-infinite geodesics
    StepControl step;
    // overrides of the closed-form shooting initialization (used by tests to
    // make base-metric solves start away from the exact answer)
    std::optional<double> init_theta;
    std::optional<double> init_length;
};

// unit-speed geodesic of the requested arclength (pre: g(v,v) = 1 to 1e-9)
GeodesicPath integrate_ivp(const MetricField& metric, Vec2 x, Vec2 v, double length,
                           const BvpOptions& opts = {});

struct DistanceResult {
    double distance = 0.0;
    GeodesicPath path;
    double residual = 0.0;
    int iterations = 0;
};

// the unique geodesic joining p to q and its length
DistanceResult distance(const MetricField& metric, Vec2 p, Vec2 q, const BvpOptions& opts = {});

// ideal endpoint of the escape continuation of an outward exit state
double ideal_endpoint(const MetricField& metric, const GeoState& exit_state);

// geodesic ray from x with forward ideal endpoint xi
GeodesicPath ray_from(const MetricField& metric, Vec2 x, double xi, const BvpOptions& opts = {});

// truncated representation of the bi-infinite geodesic from eta (backward)
// to xi (forward)
GeodesicPath geodesic_between_ideals(const MetricField& metric, double xi, double eta,
                                     const BvpOptions& opts = {});

} // namespace hyplab
