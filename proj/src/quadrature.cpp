#include "hbt/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "hbt/errors.hpp"

namespace hbt {

namespace {

// Roots of the physicists' Hermite polynomial H_n by Newton iteration on the
// orthonormal recurrence, then mapped onto the N(0,1) weight.
GaussHermiteRule build_rule(int n) {
    Eigen::VectorXd x(n);
    Eigen::VectorXd w(n);
    const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
    const int m = (n + 1) / 2;
    double z = 0.0;

    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[i - 2];

        double pp = 0.0;
        bool converged = false;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) {
                converged = true;
                break;
            }
        }
        if (!converged) throw NumericalError("Gauss-Hermite root iteration did not converge");

        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }

    GaussHermiteRule rule;
    rule.nodes = std::numbers::sqrt2 * x.reverse();
    rule.weights = w.reverse() / std::sqrt(std::numbers::pi);
    return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite_rule(int order) {
    if (order < 1 || order > 256) throw DomainError("Gauss-Hermite order must be in [1, 256]");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[order];
    if (!slot) slot = std::make_unique<GaussHermiteRule>(build_rule(order));
    return *slot;
}

}  // namespace hbt
