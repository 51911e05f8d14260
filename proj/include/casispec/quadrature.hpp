#pragma once

#include <cstddef>
#include <vector>

namespace casispec {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss rules computed by Golub-Welsch (tridiagonal Jacobi-matrix
// eigenproblem). Rules are cached per order; lookup is thread-safe.
const QuadratureRule& gauss_legendre(std::size_t n);  // weight 1 on [-1, 1]
const QuadratureRule& gauss_laguerre(std::size_t n);  // weight e^-x on [0, inf)

// n-point Legendre rule mapped to [a, b].
template <typename F>
double integrate_legendre(F&& f, double a, double b, const QuadratureRule& rule) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

}  // namespace casispec
