#include "hyplab/samplers.hpp"

#include <cmath>

#include "hyplab/hyperbolic.hpp"

namespace hyplab {

std::vector<BoundaryPair> sample_boundary_pairs(std::uint64_t seed, int count, double min_gap) {
    Rng rng(seed);
    std::vector<BoundaryPair> out;
    out.reserve(count);
    while (static_cast<int>(out.size()) < count) {
        const double xi = rng.uniform(0.0, kTwoPi);
        const double eta = rng.uniform(0.0, kTwoPi);
        if (std::abs(wrap_angle(xi - eta)) < min_gap) continue;
        out.push_back({xi, eta});
    }
    return out;
}

std::vector<Quadruple> sample_quadruples(std::uint64_t seed, int count) {
    Rng rng(seed);
    std::vector<Quadruple> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        Quadruple q;
        if (i % 2 == 0) {
            // nearby cluster: all four angles within 0.3 rad, pairwise separated
            const double base = rng.uniform(0.0, kTwoPi);
            q.xi = base;
            q.xi2 = base + rng.uniform(0.08, 0.12);
            q.eta = base + rng.uniform(0.18, 0.22);
            q.eta2 = base + rng.uniform(0.26, 0.30);
        } else {
            // spread: two nearly antipodal pairs so the geodesics cross the
            // center region
            const double a = rng.uniform(0.0, kTwoPi);
            q.xi = a;
            q.xi2 = a + rng.uniform(0.4, 0.9);
            q.eta = a + kPi + rng.uniform(-0.3, 0.3);
            q.eta2 = a + kPi + rng.uniform(0.5, 1.0);
        }
        q.xi = canonical_angle(q.xi);
        q.xi2 = canonical_angle(q.xi2);
        q.eta = canonical_angle(q.eta);
        q.eta2 = canonical_angle(q.eta2);
        out.push_back(q);
    }
    return out;
}

Vec2 sample_point(Rng& rng, double max_hyp_radius) {
    // uniform in hyperbolic radius and angle (desk-scale spread, not
    // area-uniform on purpose: far points are the interesting ones)
    const double R = rng.uniform(0.0, max_hyp_radius);
    const double th = rng.uniform(0.0, kTwoPi);
    const double r = chart_radius_of_hyp(R);
    return {r * std::cos(th), r * std::sin(th)};
}

std::vector<std::pair<Vec2, Vec2>> sample_point_pairs(std::uint64_t seed, int count,
                                                      double max_hyp_radius) {
    Rng rng(seed);
    std::vector<std::pair<Vec2, Vec2>> out;
    out.reserve(count);
    while (static_cast<int>(out.size()) < count) {
        const Vec2 p = sample_point(rng, max_hyp_radius);
        const Vec2 q = sample_point(rng, max_hyp_radius);
        if ((p - q).norm() < 1e-3) continue;
        out.push_back({p, q});
    }
    return out;
}

OneFormField sample_bump_form(std::uint64_t seed, double max_support, double amplitude) {
    Rng rng(seed);
    std::vector<OneFormField::BumpTerm> terms;
    const int n = 2 + rng.index(2);
    for (int i = 0; i < n; ++i) {
        OneFormField::BumpTerm t;
        const double rc = rng.uniform(0.0, max_support * 0.55);
        const double th = rng.uniform(0.0, kTwoPi);
        t.center = {rc * std::cos(th), rc * std::sin(th)};
        t.radius = rng.uniform(0.3, 0.95) * (max_support - rc);
        t.coeff = {amplitude * rng.uniform(-1.0, 1.0), amplitude * rng.uniform(-1.0, 1.0)};
        terms.push_back(t);
    }
    return OneFormField::bumps(terms);
}

std::vector<EntryState> entry_sphere_grid(int n_boundary, int n_direction, double margin) {
    std::vector<EntryState> out;
    out.reserve(static_cast<size_t>(n_boundary) * n_direction);
    for (int i = 0; i < n_boundary; ++i) {
        const double phi = kTwoPi * i / n_boundary;
        for (int j = 0; j < n_direction; ++j) {
            // inward directions span (phi + pi/2, phi + 3pi/2), shrunk by the
            // transversality margin
            const double lo = phi + 0.5 * kPi + margin;
            const double hi = phi + 1.5 * kPi - margin;
            const double omega = lo + (hi - lo) * (j + 0.5) / n_direction;
            out.push_back({canonical_angle(phi), canonical_angle(omega)});
        }
    }
    return out;
}

} // namespace hyplab
