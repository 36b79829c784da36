#pragma once
#include <array>
#include <cmath>
#include <complex>

#include "hyplab/errors.hpp"

// Plane vectors, symmetric 2x2 matrices and angle helpers used across the
// library. Chart points live in the open unit disk.

namespace hyplab {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline std::complex<double> to_complex(Vec2 v) { return {v.x, v.y}; }
inline Vec2 to_vec(std::complex<double> z) { return {z.real(), z.imag()}; }

// Symmetric 2x2 matrix (metric values, symmetric 2-tensors).
struct Sym2 {
    double xx = 0.0, xy = 0.0, yy = 0.0;

    Sym2() = default;
    Sym2(double xx_, double xy_, double yy_) : xx(xx_), xy(xy_), yy(yy_) {}

    static Sym2 identity() { return {1.0, 0.0, 1.0}; }
    static Sym2 scaled_identity(double s) { return {s, 0.0, s}; }

    double det() const { return xx * yy - xy * xy; }
    double trace() const { return xx + yy; }

    Vec2 apply(Vec2 v) const { return {xx * v.x + xy * v.y, xy * v.x + yy * v.y}; }
    double quad(Vec2 v) const { return v.x * (xx * v.x + xy * v.y) + v.y * (xy * v.x + yy * v.y); }
    // bilinear form u^T S w
    double pair(Vec2 u, Vec2 w) const { return u.x * (xx * w.x + xy * w.y) + u.y * (xy * w.x + yy * w.y); }

    Sym2 inverse() const {
        const double d = det();
        return {yy / d, -xy / d, xx / d};
    }

    bool positive_definite() const { return xx > 0.0 && det() > 0.0; }

    Sym2 operator+(Sym2 o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
    Sym2 operator-(Sym2 o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
    Sym2 operator*(double s) const { return {xx * s, xy * s, yy * s}; }
    Sym2& operator+=(Sym2 o) { xx += o.xx; xy += o.xy; yy += o.yy; return *this; }

    double comp(int i, int j) const {
        if (i == 0 && j == 0) return xx;
        if (i == 1 && j == 1) return yy;
        return xy;
    }
};

inline Sym2 operator*(double s, Sym2 m) { return m * s; }

// max abs entry, used for sup-norm style diagnostics
inline double max_abs(Sym2 m) {
    return std::max({std::abs(m.xx), std::abs(m.xy), std::abs(m.yy)});
}

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// wrap to (-pi, pi]
inline double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a > kPi) a -= kTwoPi;
    if (a <= -kPi) a += kTwoPi;
    return a;
}

// canonical [0, 2pi)
inline double canonical_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    return a;
}

inline Vec2 unit_from_angle(double a) { return {std::cos(a), std::sin(a)}; }

inline void require_in_chart(Vec2 p) {
    if (p.norm2() >= 1.0) throw PointOutsideChart(p.norm());
}

} // namespace hyplab
