#pragma once

#include <vector>

#include <Eigen/Core>

namespace hbt {

// Gauss-Hermite rule normalized to the standard normal density:
//   E[f(U)] ~= sum_i weights[i] * f(nodes[i]),  U ~ N(0, 1).
// Exact for polynomials of degree <= 2n - 1.
struct GaussHermiteRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;

    int order() const { return static_cast<int>(nodes.size()); }
};

// Cached, thread-safe. Throws DomainError for order < 1 or > 256.
const GaussHermiteRule& gauss_hermite_rule(int order);

// Orders tried in turn by the escalating tensor-product integrators.
inline const std::vector<int>& quadrature_escalation() {
    static const std::vector<int> orders{16, 32, 64};
    return orders;
}

}  // namespace hbt
