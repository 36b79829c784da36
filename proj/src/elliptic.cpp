#include "hyplab/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include "hyplab/geometry_ops.hpp"

namespace hyplab {

PolarGrid::PolarGrid(const GridSpec& spec, double radius_)
    : n_r(spec.n_r), n_theta(spec.n_theta), radius(radius_) {
    if (n_r < 4 || n_theta < 8 || n_theta % 4 != 0)
        throw SolverFailure("polar grid needs n_r >= 4 and n_theta divisible by 4");
}

Vec2 PolarGrid::position(int id) const {
    if (id == 0) return {0.0, 0.0};
    const int ring = 1 + (id - 1) / n_theta;
    const int j = (id - 1) % n_theta;
    const double r = ring * dr();
    const double th = j * dtheta();
    return {r * std::cos(th), r * std::sin(th)};
}

double PolarGrid::cell_weight(int id) const {
    if (id == 0) return kPi * 0.25 * dr() * dr();
    const int ring = 1 + (id - 1) / n_theta;
    const double r = ring * dr();
    if (ring == n_r) return 0.5 * r * dr() * dtheta();
    return r * dr() * dtheta();
}

void CsrMatrix::multiply(const std::vector<double>& x, std::vector<double>& y,
                         par::Exec exec) const {
    y.assign(rows, 0.0);
    par::for_index(static_cast<std::size_t>(rows), [&](std::size_t r) {
        double acc = 0.0;
        for (int k = rowptr[r]; k < rowptr[r + 1]; ++k) acc += val[k] * x[col[k]];
        y[r] = acc;
    }, exec);
}

namespace {

struct Triplets {
    std::vector<int> r, c;
    std::vector<double> v;
    void add(int row, int column, double value) {
        if (value == 0.0) return;
        r.push_back(row);
        c.push_back(column);
        v.push_back(value);
    }
};

CsrMatrix to_csr(int rows, int cols, const Triplets& t) {
    CsrMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.rowptr.assign(rows + 1, 0);
    for (int row : t.r) ++m.rowptr[row + 1];
    for (int i = 0; i < rows; ++i) m.rowptr[i + 1] += m.rowptr[i];
    m.col.resize(t.r.size());
    m.val.resize(t.r.size());
    std::vector<int> cursor(m.rowptr.begin(), m.rowptr.end() - 1);
    for (std::size_t k = 0; k < t.r.size(); ++k) {
        const int pos = cursor[t.r[k]]++;
        m.col[pos] = t.c[k];
        m.val[pos] = t.v[k];
    }
    return m;
}

CsrMatrix transpose(const CsrMatrix& a) {
    Triplets t;
    for (int r = 0; r < a.rows; ++r)
        for (int k = a.rowptr[r]; k < a.rowptr[r + 1]; ++k) t.add(a.col[k], r, a.val[k]);
    return to_csr(a.cols, a.rows, t);
}

// 3x3 tensor metric block (basis xx, xy, yy): F(u,w) = g^{ik} g^{jl} u_ij w_kl
std::array<double, 6> tensor_block(const Sym2& ginv) {
    const double A = ginv.xx, B = ginv.xy, C = ginv.yy;
    // packed symmetric: (11, 12, 13, 22, 23, 33)
    return {A * A, 2.0 * A * B, B * B, 2.0 * (B * B + A * C), 2.0 * B * C, C * C};
}

} // namespace

CsrMatrix build_sym_derivative_matrix(const PolarGrid& grid, const MetricField& metric) {
    const int n_theta = grid.n_theta;
    const double dr = grid.dr();
    const double dth = grid.dtheta();
    Triplets t;

    // stencil entry: contribution of unknown component (node, comp) to the
    // partial derivative partial_k v_comp at the current node
    struct Dcoef {
        int node;       // -1 for clamped boundary values
        double coeff;
    };

    const int unknowns = grid.unknown_count();
    auto add_tensor_rows = [&](int node_id, const std::vector<Dcoef> dx[1],
                               const std::vector<Dcoef>& dx_c, const std::vector<Dcoef>& dy_c,
                               Vec2 p) {
        (void)dx;
        // rows: (dv)_xx = 2 dx v_x - 2 Gamma^k_xx v_k
        //       (dv)_xy = dx v_y + dy v_x - 2 Gamma^k_xy v_k
        //       (dv)_yy = 2 dy v_y - 2 Gamma^k_yy v_k
        const auto gamma = christoffel(metric, p);
        const int row = 3 * node_id;
        auto emit = [&](int r, const std::vector<Dcoef>& stencil, int comp, double scale) {
            for (const Dcoef& d : stencil)
                if (d.node >= 0 && d.node < unknowns) t.add(r, 2 * d.node + comp, scale * d.coeff);
        };
        emit(row + 0, dx_c, 0, 2.0);
        emit(row + 1, dy_c, 0, 1.0);
        emit(row + 1, dx_c, 1, 1.0);
        emit(row + 2, dy_c, 1, 2.0);
        if (node_id < unknowns) {
            t.add(row + 0, 2 * node_id + 0, -2.0 * gamma[0].xx);
            t.add(row + 0, 2 * node_id + 1, -2.0 * gamma[1].xx);
            t.add(row + 1, 2 * node_id + 0, -2.0 * gamma[0].xy);
            t.add(row + 1, 2 * node_id + 1, -2.0 * gamma[1].xy);
            t.add(row + 2, 2 * node_id + 0, -2.0 * gamma[0].yy);
            t.add(row + 2, 2 * node_id + 1, -2.0 * gamma[1].yy);
        }
    };

    // center node: diameter-central differences
    {
        std::vector<Dcoef> dx_c = {{grid.node_id(1, 0), 1.0 / (2.0 * dr)},
                                   {grid.node_id(1, n_theta / 2), -1.0 / (2.0 * dr)}};
        std::vector<Dcoef> dy_c = {{grid.node_id(1, n_theta / 4), 1.0 / (2.0 * dr)},
                                   {grid.node_id(1, 3 * n_theta / 4), -1.0 / (2.0 * dr)}};
        add_tensor_rows(0, nullptr, dx_c, dy_c, grid.position(0));
    }

    for (int i = 1; i <= grid.n_r; ++i) {
        for (int j = 0; j < n_theta; ++j) {
            const int id = grid.node_id(i, j);
            const double th = j * dth;
            const double r = i * dr;
            const double cs = std::cos(th), sn = std::sin(th);

            // radial and angular difference stencils
            std::vector<Dcoef> ddr, ddth;
            if (i < grid.n_r) {
                const int inner = i == 1 ? 0 : grid.node_id(i - 1, j);
                ddr.push_back({inner, -1.0 / (2.0 * dr)});
                const int outer = i + 1 <= grid.n_r ? grid.node_id(i + 1, j) : -1;
                ddr.push_back({outer, 1.0 / (2.0 * dr)});   // dropped if boundary
                ddth.push_back({grid.node_id(i, j + 1), 1.0 / (2.0 * dth)});
                ddth.push_back({grid.node_id(i, j - 1), -1.0 / (2.0 * dth)});
            } else {
                // outer ring: one-sided second-order, v = 0 on the ring itself
                ddr.push_back({grid.node_id(i - 1, j), -4.0 / (2.0 * dr)});
                ddr.push_back({i - 2 == 0 ? 0 : grid.node_id(i - 2, j), 1.0 / (2.0 * dr)});
                // v vanishes along the ring: no angular term
            }

            // chain rule to Cartesian derivatives
            std::vector<Dcoef> dx_c, dy_c;
            for (const Dcoef& d : ddr) {
                dx_c.push_back({d.node, cs * d.coeff});
                dy_c.push_back({d.node, sn * d.coeff});
            }
            for (const Dcoef& d : ddth) {
                dx_c.push_back({d.node, -sn / r * d.coeff});
                dy_c.push_back({d.node, cs / r * d.coeff});
            }
            add_tensor_rows(id, nullptr, dx_c, dy_c, grid.position(id));
        }
    }

    CsrMatrix m = to_csr(3 * grid.node_count(), 2 * grid.unknown_count(), t);
    return m;
}

namespace {

struct MassBlocks {
    // tensor blocks: 6 packed entries per node; form blocks: 3 packed per node
    std::vector<std::array<double, 6>> tensor;
    std::vector<std::array<double, 3>> form;
};

MassBlocks build_mass(const PolarGrid& grid, const MetricField& metric) {
    MassBlocks mb;
    const int n = grid.node_count();
    mb.tensor.resize(n);
    mb.form.resize(n);
    for (int id = 0; id < n; ++id) {
        const Vec2 p = grid.position(id);
        const Sym2 g = metric.value(p);
        const Sym2 ginv = g.inverse();
        const double wt = grid.cell_weight(id) * std::sqrt(g.det());
        auto tb = tensor_block(ginv);
        for (double& x : tb) x *= wt;
        mb.tensor[id] = tb;
        mb.form[id] = {wt * ginv.xx, wt * ginv.xy, wt * ginv.yy};
    }
    return mb;
}

void apply_tensor_mass(const MassBlocks& mb, const std::vector<double>& x,
                       std::vector<double>& y) {
    const int n = static_cast<int>(mb.tensor.size());
    y.resize(3 * n);
    for (int id = 0; id < n; ++id) {
        const auto& b = mb.tensor[id];
        const double a = x[3 * id], c = x[3 * id + 1], d = x[3 * id + 2];
        y[3 * id] = b[0] * a + b[1] * c + b[2] * d;
        y[3 * id + 1] = b[1] * a + b[3] * c + b[4] * d;
        y[3 * id + 2] = b[2] * a + b[4] * c + b[5] * d;
    }
}

double tensor_norm2(const MassBlocks& mb, const std::vector<double>& x) {
    std::vector<double> y;
    apply_tensor_mass(mb, x, y);
    double sum = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) sum += x[k] * y[k];
    return sum;
}

double dot_serial(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

Vec2 SolenoidalDecomposition::v_at(Vec2 p) const {
    const double r = p.norm();
    if (r >= grid.radius) return {};
    const double dr = grid.dr();
    const double dth = grid.dtheta();
    const double th = canonical_angle(std::atan2(p.y, p.x));
    const int j0 = static_cast<int>(th / dth) % grid.n_theta;
    const double tj = th / dth - j0;
    const int unknowns = grid.unknown_count();
    auto node_value = [&](int ring, int j) -> Vec2 {
        if (ring == 0) return {v[0], v[1]};
        const int id = grid.node_id(ring, j);
        if (id >= unknowns) return {};   // clamped boundary ring
        return {v[2 * id], v[2 * id + 1]};
    };
    const int i0 = static_cast<int>(r / dr);
    const double ti = r / dr - i0;
    auto ring_value = [&](int ring) -> Vec2 {
        if (ring == 0) return node_value(0, 0);
        if (ring >= grid.n_r) return {};
        return node_value(ring, j0) * (1.0 - tj) + node_value(ring, j0 + 1) * tj;
    };
    return ring_value(i0) * (1.0 - ti) + ring_value(i0 + 1) * ti;
}

Sym2 SolenoidalDecomposition::s_at(Vec2 p) const {
    const double r = p.norm();
    if (r >= grid.radius) return {};
    const double dr = grid.dr();
    const double dth = grid.dtheta();
    const double th = canonical_angle(std::atan2(p.y, p.x));
    const int j0 = static_cast<int>(th / dth) % grid.n_theta;
    const double tj = th / dth - j0;
    auto node_value = [&](int ring, int j) -> Sym2 {
        const int id = ring == 0 ? 0 : grid.node_id(ring, j);
        return {s[3 * id], s[3 * id + 1], s[3 * id + 2]};
    };
    const int i0 = static_cast<int>(r / dr);
    const double ti = r / dr - i0;
    auto ring_value = [&](int ring) -> Sym2 {
        if (ring == 0) return node_value(0, 0);
        if (ring > grid.n_r) return {};
        return node_value(ring, j0) * (1.0 - tj) + node_value(ring, (j0 + 1) % grid.n_theta) * tj;
    };
    return ring_value(i0) * (1.0 - ti) + ring_value(std::min(i0 + 1, grid.n_r)) * ti;
}

SolenoidalDecomposition solenoidal_decompose(const CdrmDisk& M, const SymTensorField& f,
                                             const GridSpec& spec, const CgOptions& cg,
                                             par::Exec exec) {
    const MetricField& metric = M.metric();
    PolarGrid grid(spec, M.radius());
    SolenoidalDecomposition out{grid, {}, {}, {}};

    const CsrMatrix D = build_sym_derivative_matrix(grid, metric);
    const CsrMatrix Dt = transpose(D);
    const MassBlocks mass = build_mass(grid, metric);

    // sample f on the grid
    const int nodes = grid.node_count();
    out.f_grid.resize(3 * nodes);
    for (int id = 0; id < nodes; ++id) {
        const Sym2 fv = f.value(grid.position(id));
        out.f_grid[3 * id] = fv.xx;
        out.f_grid[3 * id + 1] = fv.xy;
        out.f_grid[3 * id + 2] = fv.yy;
    }

    // rhs b = D^T M f
    std::vector<double> tmp, b;
    apply_tensor_mass(mass, out.f_grid, tmp);
    Dt.multiply(tmp, b, exec);

    // Jacobi preconditioner from diag(D^T M D) approximated with the
    // diagonal of the mass blocks
    std::vector<double> diag(D.cols, 0.0);
    for (int r = 0; r < D.rows; ++r) {
        const int id = r / 3;
        const int comp = r % 3;
        const double mdiag = mass.tensor[id][comp == 0 ? 0 : comp == 1 ? 3 : 5];
        for (int k = D.rowptr[r]; k < D.rowptr[r + 1]; ++k)
            diag[D.col[k]] += D.val[k] * D.val[k] * mdiag;
    }
    for (double& d : diag)
        if (d <= 0.0) d = 1.0;

    auto apply_A = [&](const std::vector<double>& x, std::vector<double>& y) {
        std::vector<double> dx_, mdx;
        D.multiply(x, dx_, exec);
        apply_tensor_mass(mass, dx_, mdx);
        Dt.multiply(mdx, y, exec);
    };

    // preconditioned conjugate gradients from zero (minimum-norm least
    // squares when the discrete kernel is nontrivial)
    std::vector<double> x(D.cols, 0.0), r = b, z(D.cols), p(D.cols), q;
    const double bnorm = std::sqrt(dot_serial(b, b));
    double relres = bnorm == 0.0 ? 0.0 : 1.0;
    int iter = 0;
    if (bnorm > 0.0) {
        for (int i = 0; i < D.cols; ++i) z[i] = r[i] / diag[i];
        p = z;
        double rz = dot_serial(r, z);
        for (; iter < cg.max_iter; ++iter) {
            const double rnorm = std::sqrt(dot_serial(r, r));
            relres = rnorm / bnorm;
            if (relres <= cg.tol) break;
            apply_A(p, q);
            const double pq = dot_serial(p, q);
            if (pq <= 0.0) break;   // numerical kernel direction: stop (x is min-norm so far)
            const double alpha = rz / pq;
            for (int i = 0; i < D.cols; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            for (int i = 0; i < D.cols; ++i) z[i] = r[i] / diag[i];
            const double rz_new = dot_serial(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (int i = 0; i < D.cols; ++i) p[i] = z[i] + beta * p[i];
        }
        if (relres > std::max(cg.tol * 100.0, 1e-8))
            throw SolverFailure("conjugate gradients stalled at relative residual " +
                                std::to_string(relres));
    }
    out.v = x;
    out.cg_iterations = iter;
    out.cg_relative_residual = relres;

    // s = f - D v on the grid
    std::vector<double> dv;
    D.multiply(out.v, dv, exec);
    out.s.resize(3 * nodes);
    for (int k = 0; k < 3 * nodes; ++k) out.s[k] = out.f_grid[k] - dv[k];

    out.s_l2 = std::sqrt(std::max(0.0, tensor_norm2(mass, out.s)));
    out.f_l2 = std::sqrt(std::max(0.0, tensor_norm2(mass, out.f_grid)));

    // discrete divergence of s: delta_h s = M_v^{-1} D^T M s; its norm in the
    // weighted 1-form inner product is sqrt(r^T M_v^{-1} r)
    std::vector<double> ms, dtms;
    apply_tensor_mass(mass, out.s, ms);
    Dt.multiply(ms, dtms, exec);
    double dsn = 0.0;
    for (int id = 0; id < grid.unknown_count(); ++id) {
        const auto& fb = mass.form[id];
        const double det = fb[0] * fb[2] - fb[1] * fb[1];
        const double rx = dtms[2 * id], ry = dtms[2 * id + 1];
        // r^T B^{-1} r for the 2x2 block B
        dsn += (fb[2] * rx * rx - 2.0 * fb[1] * rx * ry + fb[0] * ry * ry) / det;
    }
    out.delta_s_norm = std::sqrt(std::max(0.0, dsn));

    for (int id = 0; id < grid.unknown_count(); ++id) {
        const double mag = std::hypot(out.v[2 * id], out.v[2 * id + 1]);
        out.v_sup = std::max(out.v_sup, mag);
        if (mag > 1e-12)
            out.v_support_radius = std::max(out.v_support_radius, grid.position(id).norm());
    }
    return out;
}

KernelProbeReport kernel_inverse_probe(const CdrmDisk& M, const SymTensorField& f,
                                       const std::vector<EntryState>& entries,
                                       const GridSpec& spec, const CgOptions& cg,
                                       par::Exec exec) {
    KernelProbeReport rep;
    std::vector<double> values(entries.size());
    par::for_index(entries.size(), [&](std::size_t i) {
        values[i] = cdrm_ray_transform_entry(M, f, entries[i]).value;
    }, exec);
    for (const double v : values) {
        rep.max_ray_transform = std::max(rep.max_ray_transform, std::abs(v));
        rep.mean_abs_ray_transform += std::abs(v);
    }
    if (!values.empty()) rep.mean_abs_ray_transform /= static_cast<double>(values.size());

    rep.decomposition = solenoidal_decompose(M, f, spec, cg, exec);
    rep.solenoidal_norm = rep.decomposition.s_l2;

    // grid floor: decompose a known potential field at the same resolution
    const OneFormField v_ref = OneFormField::bumps(
        {{{0.04, -0.06}, 0.55 * M.metric().support_radius() + 0.05, {0.02, -0.015}}});
    const SymTensorField dv_ref = sym_derivative(M.metric(), v_ref);
    const SolenoidalDecomposition ref = solenoidal_decompose(M, dv_ref, spec, cg, exec);
    const double ref_scale = ref.f_l2 > 0.0 ? ref.f_l2 : 1.0;
    const double f_scale = rep.decomposition.f_l2 > 0.0 ? rep.decomposition.f_l2 : 1.0;
    rep.grid_floor = ref.s_l2 / ref_scale * f_scale;   // floor scaled to the input size

    rep.transform_at_floor = rep.max_ray_transform <= 1e-6;
    rep.solenoidal_at_floor = rep.solenoidal_norm <= 10.0 * rep.grid_floor;
    return rep;
}

} // namespace hyplab
