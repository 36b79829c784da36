#include "hyplab/fields.hpp"

#include <cmath>

namespace hyplab {

namespace {

struct ZeroTensor final : SymTensorField::Impl {
    Sym2 value(Vec2) const override { return {}; }
    TensorJet jet(Vec2) const override { return {}; }
};

// eps * psi * g0 (conformal) or eps * psi * diag(1,-1) (traceless)
struct BumpTensor final : SymTensorField::Impl {
    double eps, r0;
    bool conformal;

    BumpTensor(double eps_, double r0_, bool conformal_) : eps(eps_), r0(r0_), conformal(conformal_) {}

    Sym2 value(Vec2 p) const override {
        const double psi = bump_value(p, {}, r0);
        if (psi == 0.0) return {};
        if (conformal) {
            const double l2 = hyp_lambda(p) * hyp_lambda(p);
            return Sym2::scaled_identity(eps * psi * l2);
        }
        return {eps * psi, 0.0, -eps * psi};
    }

    TensorJet jet(Vec2 p) const override {
        TensorJet out;
        const ScalarBumpJet2 b = bump_jet2(p, {}, r0);
        if (b.value == 0.0 && b.grad.x == 0.0 && b.grad.y == 0.0) return out;
        if (!conformal) {
            out.value = {eps * b.value, 0.0, -eps * b.value};
            out.d1 = {eps * b.grad.x, 0.0, -eps * b.grad.x};
            out.d2 = {eps * b.grad.y, 0.0, -eps * b.grad.y};
            return out;
        }
        const MetricJet base = base_metric_jet(p);
        // d(psi * g0) = dpsi * g0 + psi * dg0
        out.value = eps * b.value * base.g;
        out.d1 = eps * (b.grad.x * base.g + b.value * base.d1);
        out.d2 = eps * (b.grad.y * base.g + b.value * base.d2);
        return out;
    }
};

// Compactly supported twist of the disk: phi_t(r, theta) = (r, theta + t*alpha*chi(r)),
// chi the bump profile in r. With u = r^2/r0^2 and P = t*alpha*(2/r0^2)*chi_u(u):
//   phi_t^* g0 - g0 = lambda^2 (P*M + P^2 r^2 Q),
//   d/dt (phi_t^* g0) = lambda^2 (P1*M + 2 P P1 r^2 Q),  P1 = dP/dt,
// where M = [-2xy, x^2-y^2; ., 2xy], Q = [x^2, xy; ., y^2]. All entries are
// polynomials times smooth functions of u, so partials are analytic.
struct TwistTensor final : SymTensorField::Impl {
    double alpha, r0, t;
    bool velocity;   // false: pullback minus base; true: d/dt pullback

    TwistTensor(double alpha_, double r0_, double t_, bool velocity_)
        : alpha(alpha_), r0(r0_), t(t_), velocity(velocity_) {}

    Sym2 value(Vec2 p) const override { return jet(p).value; }

    TensorJet jet(Vec2 p) const override {
        TensorJet out;
        const double x = p.x, y = p.y, r2 = p.norm2();
        const double c = 2.0 / (r0 * r0);
        const double u = r2 / (r0 * r0);
        const BumpJet chi = bump_u_jet(u);
        if (chi.value == 0.0 && chi.du == 0.0) return out;

        const double P = t * alpha * c * chi.du;
        const double P1 = alpha * c * chi.du;
        // partials of P, P1 via du/dx_k = c*x_k
        const Vec2 dP = {t * alpha * c * chi.duu * c * x, t * alpha * c * chi.duu * c * y};
        const Vec2 dP1 = {alpha * c * chi.duu * c * x, alpha * c * chi.duu * c * y};

        const Sym2 M{-2.0 * x * y, x * x - y * y, 2.0 * x * y};
        const Sym2 Mx{-2.0 * y, 2.0 * x, 2.0 * y};
        const Sym2 My{-2.0 * x, -2.0 * y, 2.0 * x};
        const Sym2 Q{x * x, x * y, y * y};
        const Sym2 Qx{2.0 * x, y, 0.0};
        const Sym2 Qy{0.0, x, 2.0 * y};

        const MetricJet base = base_metric_jet(p);
        const double l2 = base.g.xx;             // lambda^2 (g0 is l2 * I)
        const Vec2 dl2 = {base.d1.xx, base.d2.xx};

        Sym2 core, core_x, core_y;
        if (!velocity) {
            core = P * M + (P * P * r2) * Q;
            core_x = dP.x * M + P * Mx + (2.0 * P * dP.x * r2 + P * P * 2.0 * x) * Q + (P * P * r2) * Qx;
            core_y = dP.y * M + P * My + (2.0 * P * dP.y * r2 + P * P * 2.0 * y) * Q + (P * P * r2) * Qy;
        } else {
            core = P1 * M + (2.0 * P * P1 * r2) * Q;
            core_x = dP1.x * M + P1 * Mx +
                     (2.0 * (dP.x * P1 + P * dP1.x) * r2 + 2.0 * P * P1 * 2.0 * x) * Q +
                     (2.0 * P * P1 * r2) * Qx;
            core_y = dP1.y * M + P1 * My +
                     (2.0 * (dP.y * P1 + P * dP1.y) * r2 + 2.0 * P * P1 * 2.0 * y) * Q +
                     (2.0 * P * P1 * r2) * Qy;
        }
        out.value = l2 * core;
        out.d1 = dl2.x * core + l2 * core_x;
        out.d2 = dl2.y * core + l2 * core_y;
        return out;
    }
};

struct ScaledTensor final : SymTensorField::Impl {
    SymTensorField f;
    double s;
    ScaledTensor(SymTensorField f_, double s_) : f(std::move(f_)), s(s_) {}
    Sym2 value(Vec2 p) const override { return f.value(p) * s; }
    TensorJet jet(Vec2 p) const override {
        TensorJet j = f.jet(p);
        j.value = j.value * s;
        j.d1 = j.d1 * s;
        j.d2 = j.d2 * s;
        return j;
    }
};

struct SumTensor final : SymTensorField::Impl {
    SymTensorField a, b;
    SumTensor(SymTensorField a_, SymTensorField b_) : a(std::move(a_)), b(std::move(b_)) {}
    Sym2 value(Vec2 p) const override { return a.value(p) + b.value(p); }
    TensorJet jet(Vec2 p) const override {
        TensorJet ja = a.jet(p), jb = b.jet(p);
        ja.value += jb.value;
        ja.d1 += jb.d1;
        ja.d2 += jb.d2;
        return ja;
    }
};

struct ZeroForm final : OneFormField::Impl {
    FormJet2 jet2(Vec2) const override { return {}; }
};

struct BumpForm final : OneFormField::Impl {
    std::vector<OneFormField::BumpTerm> terms;
    explicit BumpForm(std::vector<OneFormField::BumpTerm> t) : terms(std::move(t)) {}

    FormJet2 jet2(Vec2 p) const override {
        FormJet2 out;
        for (const auto& term : terms) {
            const ScalarBumpJet2 b = bump_jet2(p, term.center, term.radius);
            if (b.value == 0.0 && b.grad.x == 0.0 && b.grad.y == 0.0) continue;
            out.value += term.coeff * b.value;
            out.d1 += term.coeff * b.grad.x;
            out.d2 += term.coeff * b.grad.y;
            out.d11 += term.coeff * b.hess.xx;
            out.d12 += term.coeff * b.hess.xy;
            out.d22 += term.coeff * b.hess.yy;
        }
        return out;
    }
};

} // namespace

SymTensorField::SymTensorField() : impl_(std::make_shared<ZeroTensor>()), support_radius_(0.0) {}
SymTensorField::SymTensorField(std::shared_ptr<const Impl> impl, double support_radius)
    : impl_(std::move(impl)), support_radius_(support_radius) {}

SymTensorField SymTensorField::zero() { return SymTensorField(); }

SymTensorField SymTensorField::conformal_bump(double eps, double r0) {
    return {std::make_shared<BumpTensor>(eps, r0, true), r0};
}

SymTensorField SymTensorField::traceless_bump(double eps, double r0) {
    return {std::make_shared<BumpTensor>(eps, r0, false), r0};
}

SymTensorField SymTensorField::twist_pullback_minus_base(double alpha, double r0, double t) {
    return {std::make_shared<TwistTensor>(alpha, r0, t, false), r0};
}

SymTensorField SymTensorField::twist_velocity(double alpha, double r0, double t) {
    return {std::make_shared<TwistTensor>(alpha, r0, t, true), r0};
}

SymTensorField SymTensorField::scaled(const SymTensorField& f, double s) {
    return {std::make_shared<ScaledTensor>(f, s), f.support_radius()};
}

SymTensorField SymTensorField::sum(const SymTensorField& a, const SymTensorField& b) {
    return {std::make_shared<SumTensor>(a, b), std::max(a.support_radius(), b.support_radius())};
}

namespace {
struct MetricAsTensor final : SymTensorField::Impl {
    MetricField g;
    explicit MetricAsTensor(MetricField g_) : g(std::move(g_)) {}
    Sym2 value(Vec2 p) const override { return g.value(p); }
    TensorJet jet(Vec2 p) const override {
        const MetricJet j = g.jet(p);
        return {j.g, j.d1, j.d2};
    }
};
} // namespace

SymTensorField SymTensorField::metric_tensor(const MetricField& g) {
    return {std::make_shared<MetricAsTensor>(g), 1.0};
}

OneFormField::OneFormField() : impl_(std::make_shared<ZeroForm>()), support_radius_(0.0) {}
OneFormField::OneFormField(std::shared_ptr<const Impl> impl, double support_radius)
    : impl_(std::move(impl)), support_radius_(support_radius) {}

OneFormField OneFormField::zero() { return OneFormField(); }

OneFormField OneFormField::bumps(const std::vector<BumpTerm>& terms) {
    double radius = 0.0;
    for (const auto& t : terms) radius = std::max(radius, t.center.norm() + t.radius);
    return {std::make_shared<BumpForm>(terms), radius};
}

MetricJet base_metric_jet(Vec2 p) {
    const double w = 1.0 - p.norm2();
    const double l2 = 4.0 / (w * w);
    const double dl2_common = 16.0 / (w * w * w);   // d(lambda^2)/dx_k = 16 x_k / w^3
    MetricJet out;
    out.g = Sym2::scaled_identity(l2);
    out.d1 = Sym2::scaled_identity(dl2_common * p.x);
    out.d2 = Sym2::scaled_identity(dl2_common * p.y);
    return out;
}

BaseChristoffel base_christoffel_jet(Vec2 p) {
    // g0 = lambda^2 delta with phi := log lambda, phi_i = 2 x_i / (1 - |x|^2):
    //   Gamma^k_{ij} = delta_ik phi_j + delta_jk phi_i - delta_ij phi_k
    const double w = 1.0 - p.norm2();
    const Vec2 phi{2.0 * p.x / w, 2.0 * p.y / w};
    // dphi[l] holds partial_l phi_i as a Vec2 over i
    const double w2 = w * w;
    const Sym2 dphi{2.0 / w + 4.0 * p.x * p.x / w2,   // partial_1 phi_1
                    4.0 * p.x * p.y / w2,              // partial_1 phi_2 = partial_2 phi_1
                    2.0 / w + 4.0 * p.y * p.y / w2};  // partial_2 phi_2

    BaseChristoffel out;
    auto fill = [](double p1, double p2) {
        // gamma[k]_{ij} from phi-values (p1, p2)
        std::array<Sym2, 2> g;
        g[0] = Sym2{p1, p2, -p1};   // Gamma^1: (11)=phi1, (12)=phi2, (22)=-phi1
        g[1] = Sym2{-p2, p1, p2};   // Gamma^2: (11)=-phi2, (12)=phi1, (22)=phi2
        return g;
    };
    out.gamma = fill(phi.x, phi.y);
    out.dgamma[0] = fill(dphi.xx, dphi.xy);   // partial_1 of phi -> partial_1 Gamma
    out.dgamma[1] = fill(dphi.xy, dphi.yy);
    return out;
}

MetricField MetricField::hyperbolic() {
    MetricField m;
    m.support_radius_ = 0.0;
    m.escape_radius_ = 0.05;
    return m;
}

MetricField MetricField::perturbed(const SymTensorField& h) {
    MetricField m;
    m.perturbation_ = h;
    m.support_radius_ = h.support_radius();
    m.escape_radius_ = h.support_radius() + 0.05;
    return m;
}

Sym2 MetricField::value(Vec2 p) const {
    require_in_chart(p);
    Sym2 g = Sym2::scaled_identity(4.0 / ((1.0 - p.norm2()) * (1.0 - p.norm2())));
    if (perturbation_) g += perturbation_->value(p);
    return g;
}

MetricJet MetricField::jet(Vec2 p) const {
    require_in_chart(p);
    MetricJet out = base_metric_jet(p);
    if (perturbation_) {
        const TensorJet h = perturbation_->jet(p);
        out.g += h.value;
        out.d1 += h.d1;
        out.d2 += h.d2;
    }
    return out;
}

const SymTensorField& MetricField::perturbation() const {
    if (!perturbation_) throw Error("base metric has no perturbation tensor");
    return *perturbation_;
}

namespace {

struct ConstantFamily final : MetricFamily::Impl {
    MetricField at(double) const override { return MetricField::hyperbolic(); }
    SymTensorField velocity(double) const override { return SymTensorField::zero(); }
    double support_radius() const override { return 0.0; }
};

struct LinearFamily final : MetricFamily::Impl {
    SymTensorField h;
    explicit LinearFamily(SymTensorField h_) : h(std::move(h_)) {}
    MetricField at(double t) const override {
        return MetricField::perturbed(SymTensorField::scaled(h, t));
    }
    SymTensorField velocity(double) const override { return h; }
    double support_radius() const override { return h.support_radius(); }
};

struct TwistFamily final : MetricFamily::Impl {
    double alpha, r0;
    TwistFamily(double a, double r) : alpha(a), r0(r) {}
    MetricField at(double t) const override {
        return MetricField::perturbed(SymTensorField::twist_pullback_minus_base(alpha, r0, t));
    }
    SymTensorField velocity(double t) const override {
        return SymTensorField::twist_velocity(alpha, r0, t);
    }
    double support_radius() const override { return r0; }
};

} // namespace

MetricFamily MetricFamily::constant() { return MetricFamily(std::make_shared<ConstantFamily>()); }
MetricFamily MetricFamily::linear(const SymTensorField& h) {
    return MetricFamily(std::make_shared<LinearFamily>(h));
}
MetricFamily MetricFamily::twist(double alpha, double r0) {
    return MetricFamily(std::make_shared<TwistFamily>(alpha, r0));
}

} // namespace hyplab
