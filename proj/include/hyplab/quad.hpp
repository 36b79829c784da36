#pragma once
#include <cmath>
#include <utility>
#include <vector>

namespace hyplab {

// Gauss-Legendre nodes/weights on [0, 1], by Newton iteration on P_n.
inline void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-based initial guess on [-1, 1]
        double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = 0.5 * (x + 1.0);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);   // = 2/((1-x^2) P_n'^2) mapped to [0,1]
    }
}

// Quadrature nodes over the disk of the given Euclidean radius:
// Gauss-Legendre in r x uniform trapezoid in theta (periodic, so spectral).
struct DiskRule {
    struct Node {
        double r, theta, weight;   // weight includes the polar r factor
    };
    std::vector<Node> nodes;

    DiskRule(double radius, int n_r, int n_theta) {
        std::vector<double> rn, rw;
        gauss_legendre_01(n_r, rn, rw);
        const double dtheta = 2.0 * 3.14159265358979323846 / n_theta;
        nodes.reserve(static_cast<size_t>(n_r) * n_theta);
        for (int i = 0; i < n_r; ++i) {
            const double r = rn[i] * radius;
            const double wr = rw[i] * radius;
            for (int j = 0; j < n_theta; ++j)
                nodes.push_back({r, j * dtheta, wr * dtheta * r});
        }
    }
};

} // namespace hyplab
