#pragma once
#include <optional>
#include <vector>

#include "hyplab/geodesics.hpp"
#include "hyplab/parallel.hpp"
#include "hyplab/samplers.hpp"

// Geodesic ray transform of symmetric 2-tensors: the bi-infinite version
// indexed by boundary pairs and the disk (CDRM) version indexed by boundary
// entry states, plus the kernel check for potential tensors.

namespace hyplab {

struct RayTransformValue {
    double value = 0.0;
    double error_estimate = 0.0;
    std::optional<BoundaryPair> pair;     // bi-infinite ray spec
    std::optional<EntryState> entry;      // CDRM chord spec
    double chord_length = 0.0;            // integrated support-crossing length
};

struct QuadratureOptions {
    double step = 0.005;   // RK4 / Simpson arclength step
};

// integral of f(gdot, gdot) along the bi-infinite g-geodesic from eta to xi
RayTransformValue ray_transform(const MetricField& metric, const SymTensorField& f, double xi,
                                double eta, const BvpOptions& bvp = {},
                                const QuadratureOptions& quad = {});

// integral of f(gdot, gdot) over a parameter window of an existing path
// (used for variation checks; closed-form segments are integrated without
// re-running the ODE)
RayTransformValue integrate_tensor_along(const GeodesicPath& path, const SymTensorField& f,
                                         double s_lo, double s_hi,
                                         const QuadratureOptions& quad = {});

// Closed metric disk around the deformation support: compact, strictly
// convex boundary, no trapped geodesics.
class CdrmDisk {
public:
    CdrmDisk(MetricField metric, double euclidean_radius);

    const MetricField& metric() const { return metric_; }
    double radius() const { return radius_; }

    Vec2 boundary_point(double angle) const;
    // outward g-unit normal at a boundary point (the boundary circle lies in
    // the unperturbed region, where the radial direction is normal)
    Vec2 outward_normal(double angle) const;

    struct ConvexityReport {
        double min_geodesic_curvature = 0.0;
        bool pass = false;
        int samples = 0;
    };
    // geodesic curvature of the boundary with respect to the inward normal,
    // sampled along the circle (closed form oracle: coth of the hyperbolic
    // radius)
    ConvexityReport convexity_check(int n_samples = 64) const;

private:
    MetricField metric_;
    double radius_;
};

// I_M at the outward state (x, dir): integral over the maximal geodesic
// ending at x with velocity dir. Throws NotEntrySphere when dir points
// strictly inward.
RayTransformValue cdrm_ray_transform(const CdrmDisk& M, const SymTensorField& f, Vec2 x,
                                     Vec2 dir, const QuadratureOptions& quad = {});

// same integral indexed by the inward entry state of the chord
RayTransformValue cdrm_ray_transform_entry(const CdrmDisk& M, const SymTensorField& f,
                                           const EntryState& entry,
                                           const QuadratureOptions& quad = {});

struct KernelCheckEntry {
    BoundaryPair pair;
    double value = 0.0;
};

struct KernelCheckReport {
    std::vector<KernelCheckEntry> entries;
    double max_abs = 0.0;
    double tolerance = 1e-6;
    bool pass = false;
};

// max |I_g(d^g v)| over the sampled rays; the exactness of the transform on
// potential tensors realized numerically
KernelCheckReport potential_kernel_check(const MetricField& metric, const OneFormField& v,
                                         const std::vector<BoundaryPair>& rays,
                                         double tolerance = 1e-6,
                                         const BvpOptions& bvp = {},
                                         const QuadratureOptions& quad = {},
                                         par::Exec exec = par::default_exec());

} // namespace hyplab
