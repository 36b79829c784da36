#pragma once
#include <vector>

#include "hyplab/parallel.hpp"
#include "hyplab/ray_transform.hpp"

// Linear solenoidal decomposition f = s + d^g v with v = 0 on the CDRM
// boundary. The operator d^g is discretized on a polar grid (second-order
// stencils, Cartesian components, center node handled by diameter-central
// differences); the discrete divergence is the exact adjoint of the discrete
// d with respect to the weighted inner products, so the solve is the SPD
// normal system  D^T M D v = D^T M f  handled by preconditioned conjugate
// gradients (starting from zero, which yields the minimum-norm solution when
// the discrete kernel is nontrivial).

namespace hyplab {

struct GridSpec {
    int n_r = 64;
    int n_theta = 128;   // must be divisible by 4 (diameter stencils)
};

struct CgOptions {
    double tol = 1e-12;        // relative residual
    int max_iter = 20000;
};

// node layout: id 0 is the center, ring i in 1..n_r holds n_theta nodes
struct PolarGrid {
    int n_r, n_theta;
    double radius;

    PolarGrid(const GridSpec& spec, double radius_);

    int node_count() const { return 1 + n_r * n_theta; }
    // v unknowns live on the center and rings 1..n_r-1 (outer ring clamped)
    int unknown_count() const { return 1 + (n_r - 1) * n_theta; }
    int node_id(int ring, int j) const { return 1 + (ring - 1) * n_theta + (j % n_theta + n_theta) % n_theta; }
    Vec2 position(int id) const;
    double dr() const { return radius / n_r; }
    double dtheta() const { return kTwoPi / n_theta; }
    // quadrature weight of the node's cell (area element, without sqrt(det g))
    double cell_weight(int id) const;
};

struct CsrMatrix {
    int rows = 0, cols = 0;
    std::vector<int> rowptr, col;
    std::vector<double> val;

    void multiply(const std::vector<double>& x, std::vector<double>& y, par::Exec exec) const;
};

struct SolenoidalDecomposition {
    PolarGrid grid;
    std::vector<double> v;        // 2 components per unknown node
    std::vector<double> s;        // 3 components (xx, xy, yy) per node
    std::vector<double> f_grid;   // sampled input tensor, same layout as s

    int cg_iterations = 0;
    double cg_relative_residual = 0.0;
    double s_l2 = 0.0;            // ||s|| in the discrete tensor L2 norm
    double f_l2 = 0.0;
    double delta_s_norm = 0.0;    // ||delta_h s|| in the discrete 1-form norm
    double v_sup = 0.0;           // max |v| over nodes
    double v_support_radius = 0.0;   // largest node radius with |v| above 1e-12

    // bilinear interpolation of v in (r, theta); zero outside the disk
    Vec2 v_at(Vec2 p) const;
    // pointwise d^g v on the grid (s = f - dv), bilinear in (r, theta)
    Sym2 s_at(Vec2 p) const;
};

// discrete operator d^g: (3 * nodes) x (2 * unknowns)
CsrMatrix build_sym_derivative_matrix(const PolarGrid& grid, const MetricField& metric);

SolenoidalDecomposition solenoidal_decompose(const CdrmDisk& M, const SymTensorField& f,
                                             const GridSpec& spec = {},
                                             const CgOptions& cg = {},
                                             par::Exec exec = par::default_exec());

struct KernelProbeReport {
    double max_ray_transform = 0.0;     // max |I_M(f)| over the entry sample
    double mean_abs_ray_transform = 0.0;
    double solenoidal_norm = 0.0;       // ||s|| from the decomposition
    double grid_floor = 0.0;            // ||s|| of a known potential field at
                                        // the same resolution
    bool transform_at_floor = false;
    bool solenoidal_at_floor = false;
    SolenoidalDecomposition decomposition;
};

// numerical witness of the kernel property: a vanishing disk transform must
// come with a vanishing solenoidal part
KernelProbeReport kernel_inverse_probe(const CdrmDisk& M, const SymTensorField& f,
                                       const std::vector<EntryState>& entries,
                                       const GridSpec& spec = {}, const CgOptions& cg = {},
                                       par::Exec exec = par::default_exec());

} // namespace hyplab
