#pragma once
#include <cmath>

#include "hyplab/bump.hpp"
#include "hyplab/fields.hpp"
#include "hyplab/geodesics.hpp"
#include "hyplab/geometry_ops.hpp"
#include "hyplab/samplers.hpp"

// shared fixtures for the unit suites

namespace hyplab::testutil {

inline MetricField conformal_metric(double eps = 0.05, double r0 = 0.5) {
    return MetricField::perturbed(SymTensorField::conformal_bump(eps, r0));
}

inline MetricField anisotropic_metric(double eps = 0.02, double r0 = 0.5) {
    return MetricField::perturbed(SymTensorField::traceless_bump(eps, r0));
}

inline MetricField twist_metric(double alpha = 0.4, double r0 = 0.5, double t = 1.0) {
    return MetricField::perturbed(SymTensorField::twist_pullback_minus_base(alpha, r0, t));
}

inline OneFormField test_form() {
    return OneFormField::bumps({{{0.05, -0.08}, 0.3, {0.03, -0.02}},
                                {{-0.1, 0.04}, 0.25, {-0.015, 0.025}}});
}

inline MetricField potential_metric(double scale = 1.0) {
    return MetricField::perturbed(
        SymTensorField::scaled(sym_derivative(MetricField::hyperbolic(), test_form()), scale));
}

// composite Simpson of a scalar function of arclength along a path
template <class F>
double simpson_along(F&& f, double s0, double s1, int n) {
    if (n % 2 != 0) ++n;
    const double h = (s1 - s0) / n;
    double sum = f(s0) + f(s1);
    for (int i = 1; i < n; ++i) sum += f(s0 + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
    return sum * h / 3.0;
}

} // namespace hyplab::testutil
