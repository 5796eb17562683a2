#pragma once

#include <vector>

namespace symgeo::num {

/// Gauss-Legendre rule on [-1, 1].  Nodes ascend.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Returns the n-point rule, computed once and cached (thread-safe).
const GaussLegendre& gauss_legendre(int n);

/// Integrates f over [a, b] with the n-point Gauss-Legendre rule.
template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
    const GaussLegendre& gl = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i)
        sum += gl.weights[i] * f(mid + half * gl.nodes[i]);
    return half * sum;
}

/// Trapezoid weight for node k of a uniform (N+1)-point grid.
inline double trapezoid_weight(int k, int N) {
    return (k == 0 || k == N) ? 0.5 / N : 1.0 / N;
}

}  // namespace symgeo::num
