#include "hyplab/geometry_ops.hpp"

#include <cmath>

#include "hyplab/quad.hpp"

namespace hyplab {

namespace {
constexpr double kFdStep = 1e-5;
} // namespace

std::array<Sym2, 2> christoffel(const MetricField& metric, Vec2 p) {
    const MetricJet j = metric.jet(p);
    const Sym2 ginv = j.g.inverse();
    // lower symbols C_{l,ij} = (partial_i g_{jl} + partial_j g_{il} - partial_l g_{ij}) / 2
    std::array<Sym2, 2> lower;
    for (int l = 0; l < 2; ++l) {
        Sym2 c;
        auto dg = [&](int k, int a, int b) { return j.partial(k).comp(a, b); };
        c.xx = 0.5 * (dg(0, 0, l) + dg(0, 0, l) - dg(l, 0, 0));
        c.xy = 0.5 * (dg(0, 1, l) + dg(1, 0, l) - dg(l, 0, 1));
        c.yy = 0.5 * (dg(1, 1, l) + dg(1, 1, l) - dg(l, 1, 1));
        lower[l] = c;
    }
    std::array<Sym2, 2> gamma;
    gamma[0] = ginv.xx * lower[0] + ginv.xy * lower[1];
    gamma[1] = ginv.xy * lower[0] + ginv.yy * lower[1];
    return gamma;
}

double gaussian_curvature(const MetricField& metric, Vec2 p) {
    require_in_chart(p);
    // fourth-order stencil: bump fields carry large third derivatives near
    // the support edge, so a second-order difference is not enough here
    const double h = 1e-4;
    auto d_gamma = [&](int k) {
        Vec2 p1 = p, p2 = p, m1 = p, m2 = p;
        (k == 0 ? p1.x : p1.y) += h;
        (k == 0 ? p2.x : p2.y) += 2.0 * h;
        (k == 0 ? m1.x : m1.y) -= h;
        (k == 0 ? m2.x : m2.y) -= 2.0 * h;
        const auto gp1 = christoffel(metric, p1);
        const auto gp2 = christoffel(metric, p2);
        const auto gm1 = christoffel(metric, m1);
        const auto gm2 = christoffel(metric, m2);
        std::array<Sym2, 2> out;
        for (int l = 0; l < 2; ++l)
            out[l] = (gm2[l] - gp2[l]) * (1.0 / (12.0 * h)) + (gp1[l] - gm1[l]) * (8.0 / (12.0 * h));
        return out;
    };
    const auto d1 = d_gamma(0);
    const auto d2 = d_gamma(1);
    const auto g0 = christoffel(metric, p);

    // R^l_{122} = d1 Gamma^l_{22} - d2 Gamma^l_{12} + Gamma^l_{1m} Gamma^m_{22}
    //             - Gamma^l_{2m} Gamma^m_{12}
    double R[2];
    for (int l = 0; l < 2; ++l) {
        double quad = 0.0;
        for (int m = 0; m < 2; ++m)
            quad += g0[l].comp(0, m) * g0[m].yy - g0[l].comp(1, m) * g0[m].xy;
        R[l] = d1[l].yy - d2[l].xy + quad;
    }
    const Sym2 g = metric.value(p);
    const double num = g.xx * R[0] + g.xy * R[1];   // <R(e1,e2)e2, e1>
    return num / g.det();
}

CurvatureReport curvature_scan(const MetricField& metric, int grid_resolution, double margin,
                               par::Exec exec) {
    const double cover = metric.support_radius() > 0.0 ? metric.support_radius() : 0.9;
    const int n_r = grid_resolution;
    const int n_theta = 2 * grid_resolution;

    struct Entry {
        double K;
        Vec2 p;
    };
    std::vector<Entry> entries(static_cast<size_t>(n_r) * n_theta + 1);
    par::for_index(entries.size(), [&](std::size_t idx) {
        Vec2 p{0.0, 0.0};
        if (idx > 0) {
            const std::size_t k = idx - 1;
            const int i = static_cast<int>(k / n_theta);
            const int j = static_cast<int>(k % n_theta);
            const double r = (i + 0.5) / n_r * cover;
            const double th = (j + 0.5) / n_theta * kTwoPi;
            p = {r * std::cos(th), r * std::sin(th)};
        }
        entries[idx] = {gaussian_curvature(metric, p), p};
    }, exec);

    CurvatureReport rep;
    rep.margin = margin;
    rep.samples = static_cast<int>(entries.size());
    rep.max_curvature = entries[0].K;
    rep.worst_point = entries[0].p;
    for (const Entry& e : entries) {
        if (e.K > rep.max_curvature) {
            rep.max_curvature = e.K;
            rep.worst_point = e.p;
        }
    }
    rep.pass = rep.max_curvature <= -1.0 + margin;
    return rep;
}

CurvatureReport verify_curvature_bound(const MetricField& metric, int grid_resolution,
                                       double margin) {
    CurvatureReport rep = curvature_scan(metric, grid_resolution, margin);
    if (!rep.pass)
        throw HypothesisViolation(rep.worst_point.x, rep.worst_point.y, rep.max_curvature);
    return rep;
}

std::vector<CurvatureSample> curvature_grid(const MetricField& metric, int n_r, int n_theta,
                                            double radius, par::Exec exec) {
    std::vector<CurvatureSample> out(static_cast<size_t>(n_r) * n_theta);
    par::for_index(out.size(), [&](std::size_t idx) {
        const int i = static_cast<int>(idx / n_theta);
        const int j = static_cast<int>(idx % n_theta);
        const double r = (i + 0.5) / n_r * radius;
        const double th = j * kTwoPi / n_theta;
        const Vec2 p{r * std::cos(th), r * std::sin(th)};
        out[idx] = {r, th, gaussian_curvature(metric, p)};
    }, exec);
    return out;
}

namespace {

// partial_k Gamma^l_{ij}: closed form over the base metric, central
// differences of the analytic Christoffels otherwise
std::array<std::array<Sym2, 2>, 2> christoffel_partials(const MetricField& metric, Vec2 p) {
    if (metric.is_base() || p.norm() >= metric.support_radius() + 2.0 * kFdStep)
        return base_christoffel_jet(p).dgamma;
    std::array<std::array<Sym2, 2>, 2> out;
    for (int k = 0; k < 2; ++k) {
        Vec2 pp = p, pm = p;
        (k == 0 ? pp.x : pp.y) += kFdStep;
        (k == 0 ? pm.x : pm.y) -= kFdStep;
        const auto gp = christoffel(metric, pp);
        const auto gm = christoffel(metric, pm);
        for (int l = 0; l < 2; ++l) out[k][l] = (gp[l] - gm[l]) * (1.0 / (2.0 * kFdStep));
    }
    return out;
}

struct LieTensor final : SymTensorField::Impl {
    MetricField metric;
    OneFormField v;
    LieTensor(MetricField m, OneFormField v_) : metric(std::move(m)), v(std::move(v_)) {}

    Sym2 value(Vec2 p) const override {
        const FormJet2 vj = v.jet2(p);
        if (vj.value.x == 0.0 && vj.value.y == 0.0 && vj.d1.x == 0.0 && vj.d1.y == 0.0 &&
            vj.d2.x == 0.0 && vj.d2.y == 0.0)
            return {};
        const auto gamma = christoffel(metric, p);
        Sym2 out;
        out.xx = 2.0 * vj.d1.x - 2.0 * (gamma[0].xx * vj.value.x + gamma[1].xx * vj.value.y);
        out.xy = vj.d1.y + vj.d2.x - 2.0 * (gamma[0].xy * vj.value.x + gamma[1].xy * vj.value.y);
        out.yy = 2.0 * vj.d2.y - 2.0 * (gamma[0].yy * vj.value.x + gamma[1].yy * vj.value.y);
        return out;
    }

    TensorJet jet(Vec2 p) const override {
        TensorJet out;
        const FormJet2 vj = v.jet2(p);
        const bool zero = vj.value.x == 0.0 && vj.value.y == 0.0 && vj.d1.x == 0.0 &&
                          vj.d1.y == 0.0 && vj.d2.x == 0.0 && vj.d2.y == 0.0 &&
                          vj.d11.x == 0.0 && vj.d11.y == 0.0 && vj.d12.x == 0.0 &&
                          vj.d12.y == 0.0 && vj.d22.x == 0.0 && vj.d22.y == 0.0;
        if (zero) return out;
        const auto gamma = christoffel(metric, p);
        const auto dgamma = christoffel_partials(metric, p);
        out.value = value_from(vj, gamma);
        for (int k = 0; k < 2; ++k) {
            // partial_k (dv)_{ij} = partial_k partial_i v_j + partial_k partial_j v_i
            //   - 2 (partial_k Gamma^l_{ij} v_l + Gamma^l_{ij} partial_k v_l)
            const Vec2 dv_k = vj.partial(k);
            Sym2 d;
            d.xx = 2.0 * vj.partial2(k, 0).x -
                   2.0 * (dgamma[k][0].xx * vj.value.x + dgamma[k][1].xx * vj.value.y +
                          gamma[0].xx * dv_k.x + gamma[1].xx * dv_k.y);
            d.xy = vj.partial2(k, 0).y + vj.partial2(k, 1).x -
                   2.0 * (dgamma[k][0].xy * vj.value.x + dgamma[k][1].xy * vj.value.y +
                          gamma[0].xy * dv_k.x + gamma[1].xy * dv_k.y);
            d.yy = 2.0 * vj.partial2(k, 1).y -
                   2.0 * (dgamma[k][0].yy * vj.value.x + dgamma[k][1].yy * vj.value.y +
                          gamma[0].yy * dv_k.x + gamma[1].yy * dv_k.y);
            (k == 0 ? out.d1 : out.d2) = d;
        }
        return out;
    }

    static Sym2 value_from(const FormJet2& vj, const std::array<Sym2, 2>& gamma) {
        Sym2 out;
        out.xx = 2.0 * vj.d1.x - 2.0 * (gamma[0].xx * vj.value.x + gamma[1].xx * vj.value.y);
        out.xy = vj.d1.y + vj.d2.x - 2.0 * (gamma[0].xy * vj.value.x + gamma[1].xy * vj.value.y);
        out.yy = 2.0 * vj.d2.y - 2.0 * (gamma[0].yy * vj.value.x + gamma[1].yy * vj.value.y);
        return out;
    }
};

struct DivergenceForm final : OneFormField::Impl {
    MetricField metric;
    SymTensorField f;
    DivergenceForm(MetricField m, SymTensorField f_) : metric(std::move(m)), f(std::move(f_)) {}

    Vec2 value_at(Vec2 p) const { return divergence_at(metric, f.jet(p), p); }

    FormJet2 jet2(Vec2 p) const override {
        // value is analytic, first/second partials by central differences
        FormJet2 out;
        out.value = value_at(p);
        const double h = kFdStep;
        const Vec2 px = value_at({p.x + h, p.y}), mx = value_at({p.x - h, p.y});
        const Vec2 py = value_at({p.x, p.y + h}), my = value_at({p.x, p.y - h});
        out.d1 = (px - mx) * (1.0 / (2.0 * h));
        out.d2 = (py - my) * (1.0 / (2.0 * h));
        out.d11 = (px - out.value * 2.0 + mx) * (1.0 / (h * h));
        out.d22 = (py - out.value * 2.0 + my) * (1.0 / (h * h));
        const Vec2 pxy = value_at({p.x + h, p.y + h}), mxy = value_at({p.x - h, p.y - h});
        const Vec2 pxmy = value_at({p.x + h, p.y - h}), mxpy = value_at({p.x - h, p.y + h});
        out.d12 = (pxy + mxy - pxmy - mxpy) * (1.0 / (4.0 * h * h));
        return out;
    }
};

} // namespace

SymTensorField sym_derivative(const MetricField& metric, const OneFormField& v) {
    return {std::make_shared<LieTensor>(metric, v), v.support_radius()};
}

Vec2 divergence_at(const MetricField& metric, const TensorJet& fj, Vec2 p) {
    const auto gamma = christoffel(metric, p);
    const Sym2 ginv = metric.value(p).inverse();
    // nabla_i f_{kj} = partial_i f_{kj} - Gamma^l_{ik} f_{lj} - Gamma^l_{ij} f_{kl}
    auto nabla = [&](int i, int k, int j) {
        double out = fj.partial(i).comp(k, j);
        for (int l = 0; l < 2; ++l)
            out -= gamma[l].comp(i, k) * fj.value.comp(l, j) +
                   gamma[l].comp(i, j) * fj.value.comp(k, l);
        return out;
    };
    Vec2 div;
    for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) s += ginv.comp(i, k) * nabla(i, k, j);
        (j == 0 ? div.x : div.y) = -2.0 * s;
    }
    return div;
}

OneFormField divergence(const MetricField& metric, const SymTensorField& f) {
    return {std::make_shared<DivergenceForm>(metric, f), f.support_radius()};
}

VolumeResult volume(const MetricField& metric, double radius, int n_r, int n_theta) {
    auto integrate = [&](int nr, int nt) {
        DiskRule rule(radius, nr, nt);
        double sum = 0.0;
        for (const auto& n : rule.nodes) {
            const Vec2 p{n.r * std::cos(n.theta), n.r * std::sin(n.theta)};
            sum += n.weight * std::sqrt(metric.value(p).det());
        }
        return sum;
    };
    VolumeResult out;
    out.value = integrate(n_r, n_theta);
    out.error_estimate = std::abs(out.value - integrate(n_r / 2, n_theta / 2));
    return out;
}

namespace {
double tensor_dot(const Sym2& ginv, const Sym2& u, const Sym2& w) {
    // tr(g^{-1} u g^{-1} w)
    double a[2][2], b[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            a[i][j] = 0.0;
            b[i][j] = 0.0;
            for (int k = 0; k < 2; ++k) {
                a[i][j] += ginv.comp(i, k) * u.comp(k, j);
                b[i][j] += ginv.comp(i, k) * w.comp(k, j);
            }
        }
    double tr = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) tr += a[i][j] * b[j][i];
    return tr;
}
} // namespace

double l2_inner(const MetricField& metric, const SymTensorField& u, const SymTensorField& w,
                double radius, int n_r, int n_theta) {
    DiskRule rule(radius, n_r, n_theta);
    double sum = 0.0;
    for (const auto& n : rule.nodes) {
        const Vec2 p{n.r * std::cos(n.theta), n.r * std::sin(n.theta)};
        const Sym2 g = metric.value(p);
        sum += n.weight * std::sqrt(g.det()) * tensor_dot(g.inverse(), u.value(p), w.value(p));
    }
    return sum;
}

double form_l2_inner(const MetricField& metric, const OneFormField& a, const OneFormField& b,
                     double radius, int n_r, int n_theta) {
    DiskRule rule(radius, n_r, n_theta);
    double sum = 0.0;
    for (const auto& n : rule.nodes) {
        const Vec2 p{n.r * std::cos(n.theta), n.r * std::sin(n.theta)};
        const Sym2 g = metric.value(p);
        sum += n.weight * std::sqrt(g.det()) * g.inverse().pair(a.value(p), b.value(p));
    }
    return sum;
}

} // namespace hyplab
