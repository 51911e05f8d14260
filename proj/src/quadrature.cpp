#include "casispec/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace casispec {

namespace {

// Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix,
// weights are mu0 times the squared first eigenvector components.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& subdiag, double mu0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, subdiag, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("quadrature: tridiagonal eigensolver failed");

    const auto n = diag.size();
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
    }
    return rule;
}

using Cache = std::map<std::size_t, std::unique_ptr<QuadratureRule>>;

const QuadratureRule& cached(Cache& cache, std::mutex& mutex, std::size_t n,
                             QuadratureRule (*build)(std::size_t)) {
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_unique<QuadratureRule>(build(n))).first;
    return *it->second;
}

QuadratureRule build_legendre(std::size_t n) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(n) - 1);
    for (std::size_t k = 1; k < n; ++k) {
        const double kk = static_cast<double>(k);
        sub(static_cast<Eigen::Index>(k) - 1) = kk / std::sqrt(4.0 * kk * kk - 1.0);
    }
    return golub_welsch(diag, sub, 2.0);
}

QuadratureRule build_laguerre(std::size_t n) {
    Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(n) - 1);
    for (std::size_t k = 0; k < n; ++k)
        diag(static_cast<Eigen::Index>(k)) = 2.0 * static_cast<double>(k) + 1.0;
    for (std::size_t k = 1; k < n; ++k)
        sub(static_cast<Eigen::Index>(k) - 1) = static_cast<double>(k);
    return golub_welsch(diag, sub, 1.0);
}

}  // namespace

const QuadratureRule& gauss_legendre(std::size_t n) {
    if (n == 0) throw std::invalid_argument("gauss_legendre: order must be positive");
    static Cache cache;
    static std::mutex mutex;
    return cached(cache, mutex, n, build_legendre);
}

const QuadratureRule& gauss_laguerre(std::size_t n) {
    if (n == 0) throw std::invalid_argument("gauss_laguerre: order must be positive");
    static Cache cache;
    static std::mutex mutex;
    return cached(cache, mutex, n, build_laguerre);
}

}  // namespace casispec
