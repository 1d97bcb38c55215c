#pragma once

#include "bargmann/linalg.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace bargmann {

/// Nodes and weights for integrals against exp(-t^2) on the real line.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

/// Orthonormal Hermite values p_0..p_order at t (weight exp(-t^2)); returns
/// (p_order(t), p_order'(t), sum_k p_k(t)^2 for k < order).
struct HermiteEval {
    double value;
    double derivative;
    double christoffel;
};

inline HermiteEval hermite_orthonormal(int order, double t)
{
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25);
    double sum = 0.0;
    for (int k = 0; k < order; ++k) {
        sum += cur * cur;
        const double next = t * std::sqrt(2.0 / (k + 1)) * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
        prev = cur;
        cur = next;
    }
    // p_n' = sqrt(2n) p_{n-1}
    return {cur, std::sqrt(2.0 * order) * prev, sum};
}

} // namespace detail

/// Golub-Welsch eigenvalues, polished by Newton on the orthonormal recurrence;
/// weights from the Christoffel function.
inline GaussHermiteRule gauss_hermite(int order)
{
    BARGMANN_FAIL_IF(order < 1 || order > 400, PreconditionViolated, "Gauss-Hermite order must be in [1, 400]");
    RMatrix jac = RMatrix::Zero(order, order);
    for (int k = 1; k < order; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(k / 2.0);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(jac, Eigen::EigenvaluesOnly);
    BARGMANN_FAIL_IF(es.info() != Eigen::Success, NumericalFailure, "Jacobi matrix eigensolver failed");

    GaussHermiteRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        double t = es.eigenvalues()(i);
        for (int it = 0; it < 5; ++it) {
            const auto h = detail::hermite_orthonormal(order, t);
            if (h.derivative == 0.0) break;
            const double step = h.value / h.derivative;
            t -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(t))) break;
        }
        rule.nodes[i] = t;
        rule.weights[i] = 1.0 / detail::hermite_orthonormal(order, t).christoffel;
    }
    // exact symmetry
    for (int i = 0; i < order / 2; ++i) {
        const int j = order - 1 - i;
        const double t = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -t;
        rule.nodes[j] = t;
        rule.weights[i] = rule.weights[j] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

/// Pairwise summation in a fixed order.
template <typename T>
T pairwise_sum(const std::vector<T>& v, std::size_t begin, std::size_t end)
{
    if (end - begin <= 8) {
        T s{};
        for (std::size_t i = begin; i < end; ++i) s += v[i];
        return s;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    return pairwise_sum(v, begin, mid) + pairwise_sum(v, mid, end);
}

template <typename T>
T pairwise_sum(const std::vector<T>& v)
{
    return v.empty() ? T{} : pairwise_sum(v, 0, v.size());
}

} // namespace bargmann
