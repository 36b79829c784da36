#pragma once
#include <array>
#include <vector>

#include "hyplab/fields.hpp"
#include "hyplab/parallel.hpp"

// Pointwise differential-geometric operators on the disk chart.

namespace hyplab {

// Gamma^k_{ij}; [k] selects the upper index, the Sym2 holds the (i,j) slots.
std::array<Sym2, 2> christoffel(const MetricField& metric, Vec2 p);

// Gaussian curvature, via analytic first partials of g and central
// differences of the Christoffel symbols (step 1e-5).
double gaussian_curvature(const MetricField& metric, Vec2 p);

struct CurvatureReport {
    double max_curvature = 0.0;
    Vec2 worst_point;
    double margin = 0.0;
    bool pass = false;
    int samples = 0;
};

// Samples K on a polar grid covering the support disk (or radius 0.9 for the
// base metric) and checks K <= -1 + margin. Grid sampling reports the worst
// grid value; it cannot certify the continuum bound.
CurvatureReport curvature_scan(const MetricField& metric, int grid_resolution, double margin,
                               par::Exec exec = par::default_exec());

// Same scan, but throws HypothesisViolation when the bound fails.
CurvatureReport verify_curvature_bound(const MetricField& metric, int grid_resolution,
                                       double margin);

// grid values for CSV export: (r, theta, K)
struct CurvatureSample {
    double r, theta, K;
};
std::vector<CurvatureSample> curvature_grid(const MetricField& metric, int n_r, int n_theta,
                                            double radius, par::Exec exec = par::default_exec());

// d^g v = nabla_i v_j + nabla_j v_i (the Lie derivative of g along v sharp);
// support radius equals that of v.
SymTensorField sym_derivative(const MetricField& metric, const OneFormField& v);

// (delta^g f)_j = -2 g^{ik} nabla_i f_{kj}, the L2-adjoint of d^g:
// (d v, f)_{L2} = (v, delta f)_{L2} for compactly supported arguments.
OneFormField divergence(const MetricField& metric, const SymTensorField& f);

// pointwise value of delta^g f (avoids the FD jets of the OneFormField wrapper)
Vec2 divergence_at(const MetricField& metric, const TensorJet& fj, Vec2 p);

struct VolumeResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

// integral of sqrt(det g) over the Euclidean disk of the given radius
VolumeResult volume(const MetricField& metric, double radius, int n_r = 128, int n_theta = 256);

// int g^{ik} g^{jl} u_{ij} w_{kl} dVol_g over the disk of the given radius
double l2_inner(const MetricField& metric, const SymTensorField& u, const SymTensorField& w,
                double radius, int n_r = 128, int n_theta = 256);

// int g^{jl} a_j b_l dVol_g over the disk (1-form inner product)
double form_l2_inner(const MetricField& metric, const OneFormField& a, const OneFormField& b,
                     double radius, int n_r = 128, int n_theta = 256);

} // namespace hyplab
