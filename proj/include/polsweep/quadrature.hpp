#pragma once

// Gauss-Legendre nodes/weights on [a, b] by Newton iteration on P_n.

#include <cmath>
#include <utility>
#include <vector>

namespace polsweep {

struct QuadratureRule {
    std::vector<double> x, w;
};

inline QuadratureRule gauss_legendre(int n, double a, double b) {
    QuadratureRule rule;
    rule.x.resize(static_cast<size_t>(n));
    rule.w.resize(static_cast<size_t>(n));
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Tricomi initial guess for the i-th root of P_n on (-1, 1).
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Upward recurrence for P_n(z) and P_{n-1}(z).
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        const double wgt = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.x[static_cast<size_t>(i)] = mid - half * z;
        rule.w[static_cast<size_t>(i)] = half * wgt;
        rule.x[static_cast<size_t>(n - 1 - i)] = mid + half * z;
        rule.w[static_cast<size_t>(n - 1 - i)] = half * wgt;
    }
    return rule;
}

}  // namespace polsweep
