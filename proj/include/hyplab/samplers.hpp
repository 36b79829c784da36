#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "hyplab/fields.hpp"

// Deterministic seeded samplers. Every sampled experiment takes an explicit
// seed so runs are reproducible bit-for-bit; parallel scans consume
// pre-generated lists, never shared generator state.

namespace hyplab {

struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {   // splitmix64
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int index(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

struct BoundaryPair {
    double xi, eta;
};

// pairs of ideal angles with angular gap at least min_gap
std::vector<BoundaryPair> sample_boundary_pairs(std::uint64_t seed, int count,
                                                double min_gap = 0.3);

struct Quadruple {
    double xi, xi2, eta, eta2;
};

// stratified quadruples: alternating nearby clusters (all four angles within
// 0.3 rad) and spread configurations whose geodesics cross the center region
std::vector<Quadruple> sample_quadruples(std::uint64_t seed, int count);

// chart points with hyperbolic radius at most max_hyp_radius
Vec2 sample_point(Rng& rng, double max_hyp_radius);
std::vector<std::pair<Vec2, Vec2>> sample_point_pairs(std::uint64_t seed, int count,
                                                      double max_hyp_radius);

// random compactly supported bump 1-form (sum of a few bumps), supported
// inside max_support
OneFormField sample_bump_form(std::uint64_t seed, double max_support = 0.45,
                              double amplitude = 0.05);

struct EntryState {
    double boundary_angle;    // position angle on the CDRM boundary circle
    double direction_angle;   // inward chart direction angle
};

// uniform grid over boundary angle x inward direction (transversality margin
// keeps directions away from tangency)
std::vector<EntryState> entry_sphere_grid(int n_boundary, int n_direction,
                                          double margin = 0.15);

} // namespace hyplab
