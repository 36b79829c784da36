#pragma once
#include <memory>
#include <optional>
#include <vector>

#include "hyplab/bump.hpp"
#include "hyplab/chart.hpp"

// Metric, symmetric-tensor and 1-form fields on the unit-disk chart.
//
// All fields are immutable after construction and cheap to copy (shared
// handles), with evaluators returning values and first partials. Built-in
// families carry analytic partials; compact support is exact by construction
// (evaluators return bit-exact zeros outside the support radius).

namespace hyplab {

struct TensorJet {
    Sym2 value;
    Sym2 d1, d2;   // partials of the components along x1, x2

    Sym2 partial(int k) const { return k == 0 ? d1 : d2; }
};

struct FormJet {
    Vec2 value;
    Vec2 d1, d2;   // partials of the components

    Vec2 partial(int k) const { return k == 0 ? d1 : d2; }
};

// value, first and second partials of a 1-form (second partials are needed
// to differentiate d^g v analytically)
struct FormJet2 {
    Vec2 value;
    Vec2 d1, d2;
    Vec2 d11, d12, d22;

    Vec2 partial(int k) const { return k == 0 ? d1 : d2; }
    Vec2 partial2(int i, int j) const {
        if (i == 0 && j == 0) return d11;
        if (i == 1 && j == 1) return d22;
        return d12;
    }
};

class SymTensorField {
public:
    struct Impl {
        virtual ~Impl() = default;
        virtual Sym2 value(Vec2 p) const = 0;
        virtual TensorJet jet(Vec2 p) const = 0;
    };

    SymTensorField();  // zero field
    SymTensorField(std::shared_ptr<const Impl> impl, double support_radius);

    Sym2 value(Vec2 p) const { return impl_->value(p); }
    TensorJet jet(Vec2 p) const { return impl_->jet(p); }
    double support_radius() const { return support_radius_; }

    static SymTensorField zero();
    // eps * psi_{r0} * g0
    static SymTensorField conformal_bump(double eps, double r0);
    // eps * psi_{r0} * (dx1 (x) dx1 - dx2 (x) dx2)
    static SymTensorField traceless_bump(double eps, double r0);
    // phi_t^* g0 - g0 for the compactly supported twist phi_t (angle t*alpha*chi(r))
    static SymTensorField twist_pullback_minus_base(double alpha, double r0, double t);
    // d/dt (phi_t^* g0)
    static SymTensorField twist_velocity(double alpha, double r0, double t);
    static SymTensorField scaled(const SymTensorField& f, double s);
    static SymTensorField sum(const SymTensorField& a, const SymTensorField& b);
    // the metric itself viewed as a symmetric tensor (not compactly
    // supported; support_radius is reported as 1)
    static SymTensorField metric_tensor(const class MetricField& g);

private:
    std::shared_ptr<const Impl> impl_;
    double support_radius_;
};

class OneFormField {
public:
    struct Impl {
        virtual ~Impl() = default;
        virtual FormJet2 jet2(Vec2 p) const = 0;
    };

    OneFormField();  // zero form
    OneFormField(std::shared_ptr<const Impl> impl, double support_radius);

    Vec2 value(Vec2 p) const { return impl_->jet2(p).value; }
    FormJet2 jet2(Vec2 p) const { return impl_->jet2(p); }
    double support_radius() const { return support_radius_; }

    static OneFormField zero();

    struct BumpTerm {
        Vec2 center;
        double radius = 0.2;
        Vec2 coeff;   // constant covector multiplied by the bump
    };
    static OneFormField bumps(const std::vector<BumpTerm>& terms);

private:
    std::shared_ptr<const Impl> impl_;
    double support_radius_;
};

struct MetricJet {
    Sym2 g;
    Sym2 d1, d2;

    Sym2 partial(int k) const { return k == 0 ? d1 : d2; }
};

// conformal factor of the hyperbolic disk metric g0 = lambda^2 * I
inline double hyp_lambda(Vec2 p) { return 2.0 / (1.0 - p.norm2()); }

MetricJet base_metric_jet(Vec2 p);

// Christoffel symbols of g0 and their partials, closed form
struct BaseChristoffel {
    // gamma[k] is the symmetric matrix Gamma^k_{ij}
    std::array<Sym2, 2> gamma;
    // dgamma[l][k] = partial_l Gamma^k_{ij}
    std::array<std::array<Sym2, 2>, 2> dgamma;
};
BaseChristoffel base_christoffel_jet(Vec2 p);

// Riemannian metric g = g0 + h with compactly supported h.
class MetricField {
public:
    // pure hyperbolic base metric
    static MetricField hyperbolic();
    static MetricField perturbed(const SymTensorField& h);

    Sym2 value(Vec2 p) const;         // throws PointOutsideChart
    MetricJet jet(Vec2 p) const;
    double support_radius() const { return support_radius_; }
    // radius beyond which trajectories are continued in closed form
    double escape_radius() const { return escape_radius_; }
    bool is_base() const { return !perturbation_.has_value(); }
    const SymTensorField& perturbation() const;  // throws if base

private:
    MetricField() = default;
    std::optional<SymTensorField> perturbation_;
    double support_radius_ = 0.0;
    double escape_radius_ = 0.05;
};

// 1-parameter family t in [0,1] -> g_t with velocity tensor dg_t/dt
class MetricFamily {
public:
    struct Impl {
        virtual ~Impl() = default;
        virtual MetricField at(double t) const = 0;
        virtual SymTensorField velocity(double t) const = 0;
        virtual double support_radius() const = 0;
    };

    explicit MetricFamily(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

    MetricField at(double t) const { return impl_->at(t); }
    SymTensorField velocity(double t) const { return impl_->velocity(t); }
    double support_radius() const { return impl_->support_radius(); }

    static MetricFamily constant();
    static MetricFamily linear(const SymTensorField& h);  // g_t = g0 + t h
    static MetricFamily twist(double alpha, double r0);   // g_t = phi_t^* g0

private:
    std::shared_ptr<const Impl> impl_;
};

} // namespace hyplab
