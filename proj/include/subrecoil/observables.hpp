#pragma once

#include <array>
#include <optional>

#include "subrecoil/hilbert.hpp"

namespace subrecoil {

// First and second momentum moments (units of hbar*k). Held alongside the
// derived quantities so ensemble averages can recombine correlation and
// temperature from mean moments instead of averaging nonlinear functions.
struct MomentumMoments {
    double p1 = 0.0;
    double p2 = 0.0;
    double p1p1 = 0.0;
    double p2p2 = 0.0;
    double p1p2 = 0.0;
};

// Snapshot of every reported metric. Arrays are indexed by n + n_max.
// c_p and t_eff are std::nullopt when undefined (zero variance, frozen or
// non-thermal distribution); serialized as null.
struct ObservableRecord {
    double e_kin = 0.0;                    // per-particle kinetic energy, E_R
    Eigen::VectorXd p_single;              // P(n)
    Eigen::MatrixXd p_joint;               // P(n, m)
    std::optional<double> c_p;             // normalized momentum covariance
    double p_ground = 0.0;                 // ground-manifold projection
    std::array<double, 3> parity_fracs{};  // even-even, odd-odd, mixed
    double n_photons_c = 0.0;
    double n_photons_s = 0.0;
    double bunching = 0.0;                 // <sin^2(kx)> single-particle
    std::optional<double> t_eff;           // E_R / k_B
    MomentumMoments moments;
};

// All functions renormalize internally, so record entries are invariant
// under global phase and state norm. Zero state -> NormalizationError.

double kinetic_energy(const StateVector& psi);

// P(n,m) = sum over photon sectors of |amplitude|^2; P(n) symmetrized over
// the two particle slots: P(n) = sum_m (P(n,m) + P(m,n)) / 2.
Eigen::MatrixXd momentum_joint(const StateVector& psi);
Eigen::VectorXd momentum_marginal(const StateVector& psi);

MomentumMoments momentum_moments(const Eigen::MatrixXd& joint, int n_max);

// (  <p1 p2> - <p1><p2> ) / (dp1 dp2); nullopt if either spread < 1e-9.
std::optional<double> correlation_from_moments(const MomentumMoments& m);
std::optional<double> momentum_correlation(const StateVector& psi);

// Boson: population of |0,0>. Fermion: population of the degenerate doublet
// (|+-1,0> - |0,+-1>)/sqrt(2). Photon sectors summed over.
double ground_state_projection(const StateVector& psi, ExchangeSymmetry sym);

double bunching_parameter(const StateVector& psi);

// T = 4 / ln(p0/p2) from marginal weights at n = 0 and |n| = 2 (both signs
// pooled). p2 <= 0 -> nullopt (zero-temperature limit); p2 >= p0 -> nullopt
// (non-thermal ordering); p0 <= 0 -> DomainError.
std::optional<double> effective_temperature(double p0, double p2);

std::array<double, 3> parity_fractions(const StateVector& psi);

ObservableRecord observe(const StateVector& psi, ExchangeSymmetry sym);

// Same record computed from a density matrix via operator traces; used by
// the dense integrator and as an independent cross-check on the state path.
ObservableRecord observe_density(const Eigen::MatrixXcd& rho,
                                 const HilbertDims& dims, ExchangeSymmetry sym);

}  // namespace subrecoil
