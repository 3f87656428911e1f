#pragma once

#include "hbt/quadrature.hpp"
#include "hbt/source.hpp"

namespace hbt::detail {

// Visits every node of the order^4 Gauss-Hermite grid matched to the source's
// Gaussian widths: f(x, w) with sum(w) == 1.
template <class F>
void for_each_spacetime_node(const GaussianSource& source, int order, F&& f) {
    const auto& rule = gauss_hermite_rule(order);
    const int n = rule.order();
    const double s = source.sigma_r_nm;
    const double tau = source.delta_tau_fs;
    SpaceTimePoint x;
    for (int it = 0; it < n; ++it) {
        x[3] = source.center_t_fs + tau * rule.nodes[it];
        const double wt = rule.weights[it];
        for (int i = 0; i < n; ++i) {
            x[0] = s * rule.nodes[i];
            const double wi = wt * rule.weights[i];
            for (int j = 0; j < n; ++j) {
                x[1] = s * rule.nodes[j];
                const double wj = wi * rule.weights[j];
                for (int k = 0; k < n; ++k) {
                    x[2] = s * rule.nodes[k];
                    f(x, wj * rule.weights[k]);
                }
            }
        }
    }
}

}  // namespace hbt::detail
