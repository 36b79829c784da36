#pragma once
#include <functional>
#include <string>
#include <vector>

#include "hyplab/elliptic.hpp"
#include "hyplab/schwarzian.hpp"

// Variational identities along 1-parameter families: the first variation of
// renormalized squared distances, the first variation of the integrated
// Schwarzian against the ray transform of the velocity tensor, the volume
// estimate for small fields, and the end-to-end triviality reconstruction.

namespace hyplab {

struct VariationEntry {
    double t = 0.0;
    double lhs = 0.0;       // central finite difference in t
    double rhs = 0.0;       // transform/integral side
    double abs_err = 0.0;
    double rel_err = 0.0;
};

struct VariationReport {
    std::vector<VariationEntry> entries;
    double max_rel_err = 0.0;
    // observed finite-difference order under dt halving, measured at the
    // t-grid midpoint with the dt_order pair (truncation must dominate the
    // evaluation noise there, hence the larger steps)
    double order_estimate = 0.0;
};

struct VariationOptions {
    double dt = 1e-3;                 // central difference step
    double dt_order = 0.2;            // step pair {dt_order, dt_order/2} for the order estimate
    SchwarzianOptions schwarzian;
    BvpOptions bvp;
    QuadratureOptions quad;
};

// d/dt [(d_{g_t}(p,q)^2 - d_{g_0}(p,q)^2) / d_{g_0}(p,q)]
//   = int_0^a gdot_t(gamma_t'(s)) ds
// with gamma_t the g_t-geodesic parametrized on [0, a], a = d_{g_0}(p,q)
VariationEntry distance_variation_check(const MetricFamily& family, Vec2 p, Vec2 q, double t,
                                        const VariationOptions& opts = {});

VariationReport distance_variation_scan(const MetricFamily& family, Vec2 p, Vec2 q,
                                        const std::vector<double>& t_grid,
                                        const VariationOptions& opts = {},
                                        par::Exec exec = par::default_exec());

// d/dt 2 S_{g_0}(g_t)(xi,eta) = I_{g_t}(gdot_t)(xi,eta) under the angle
// identification of the boundaries
VariationReport schwarzian_variation_check(const MetricFamily& family, double xi, double eta,
                                           const std::vector<double>& t_grid,
                                           const VariationOptions& opts = {},
                                           par::Exec exec = par::default_exec());

struct VolumeInequalityReport {
    double sup_norm = 0.0;            // ||f||_C0 (operator norm against g0)
    double volume_perturbed = 0.0;
    double volume_base = 0.0;
    bool hypothesis_met = false;      // volume non-increasing and cap respected
    double lhs = 0.0;                 // (g0, f)_L2
    double rhs = 0.0;                 // (2/3) ||f||_L2^2
    bool pass = false;                // lhs <= rhs (when the hypothesis holds)
};

// Vol_{g0+f}(M) <= Vol_{g0}(M)  =>  (g0, f) <= (2/3) ||f||^2
VolumeInequalityReport volume_inequality_check(const CdrmDisk& M, const SymTensorField& f,
                                               double sup_norm_cap = 1e-2);

struct PipelineOptions {
    std::vector<double> t_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    int rays_per_t = 10;              // stage (a) sample
    std::uint64_t seed = 7;
    double stage_a_tol = 1e-6;
    GridSpec grid;
    CgOptions cg;
    int check_n_r = 6, check_n_theta = 12;   // verification point grid
    BvpOptions bvp;
    QuadratureOptions quad;
    // optional known answer (manufactured families): expected f_t(x)
    std::function<Vec2(Vec2, double)> expected_map;
};

struct PipelineReport {
    std::string failed_stage;                  // empty when all stages pass
    double stage_a_max_transform = 0.0;
    double stage_b_max_rel_solenoidal = 0.0;   // max ||s||/||gdot|| over substeps
    std::vector<double> t_values;
    std::vector<double> pullback_residual;     // max grid |f_t^* g_t - g0|
    std::vector<double> identity_outside;      // max |f_t(x) - x| outside M
    std::vector<double> known_map_mismatch;    // vs expected_map, when given
    bool pass = false;
};

// (a) I_{g_t}(gdot_t) vanishes over sampled rays; (b) solenoidal-decompose
// gdot_t with respect to g_t on M; (c) integrate the reconstruction flow
// x' = -v_t#(x); (d) check f_t^* g_t = g0 on a verification grid and
// f_t = id outside M
PipelineReport triviality_reconstruction(const MetricFamily& family, const CdrmDisk& M,
                                         const PipelineOptions& opts = {},
                                         par::Exec exec = par::default_exec());

} // namespace hyplab
