#include "subrecoil/protocol.hpp"

#include <cmath>

namespace subrecoil {

double predict_detuning(int target_k, int n_particles, double u0, double bunching) {
    if (target_k < 2) throw DomainError("target_k >= 2 violated");
    if (n_particles < 0) throw DomainError("n_particles >= 0 violated");
    if (!(bunching >= 0.0 && bunching <= 1.0))
        throw DomainError("bunching must lie in [0, 1]");
    return n_particles * u0 * bunching + 4.0 * (1 - target_k);
}

double residual_population(const Eigen::VectorXd& dist, int target_n) {
    if (target_n < 0) throw DomainError("target_n >= 0 violated");
    if (dist.size() % 2 == 0) throw BoundsError("distribution grid must be odd-sized");
    if (std::abs(dist.sum() - 1.0) > 1e-6)
        throw NormalizationError("distribution does not sum to 1");
    const int n_max = static_cast<int>(dist.size() / 2);
    double residual = 0.0;
    for (int n = -n_max; n <= n_max; ++n)
        if (std::abs(n) >= target_n) residual += dist[n + n_max];
    return residual;
}

}  // namespace subrecoil
