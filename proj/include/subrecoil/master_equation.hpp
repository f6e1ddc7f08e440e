#pragma once

#include <vector>

#include "subrecoil/operators.hpp"

namespace subrecoil {

inline constexpr Index kOracleDimLimit = 400;

// Dense Lindblad integrator, the desk-scale reference the stochastic solver
// is validated against:
//   rho_dot = -i [H, rho] + sum_j ( L_j rho L_j^dag - {L_j^dag L_j, rho}/2 )
// Adaptive stepping at ode_tol; rho is re-Hermitized after every accepted
// step. Returns rho at each requested time. Trace drift beyond 1e-8 raises
// IntegrationError; dim above dim_limit raises CapacityError.
std::vector<Eigen::MatrixXcd> integrate_master_equation(
    const Eigen::MatrixXcd& rho0, const SparseOperator& h,
    const std::vector<SparseOperator>& jumps,
    const std::vector<double>& sample_times, double ode_tol = 1e-8,
    Index dim_limit = kOracleDimLimit);

// Exact ensemble average of the random-phase initial state's projector: the
// uniform pair phases wipe every coherence between distinct unordered
// momentum pairs, leaving a mixture of exchange-adapted pair states.
Eigen::MatrixXcd phase_averaged_density(ExchangeSymmetry sym, double sigma_n,
                                        const HilbertDims& dims,
                                        bool even_only = false);

}  // namespace subrecoil
