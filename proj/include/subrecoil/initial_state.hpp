#pragma once

#include <utility>
#include <vector>

#include "subrecoil/hilbert.hpp"
#include "subrecoil/rng.hpp"

namespace subrecoil {

// Normalized exchange-adapted pair state (|n,m> +- |m,n>)/sqrt(2) (boson +,
// fermion -), |n,n> for equal boson momenta, photons in vacuum.
// Fermion with n = m has no antisymmetric component: PauliExclusionError.
StateVector symmetrize(int n, int m, ExchangeSymmetry sym, const HilbertDims& dims);

// Random-phase (anti)symmetrized two-packet state. Single-particle packets
//   c_n^(+-) ∝ exp(-n^2/(4 sigma_n^2)) exp(-+ i n pi / 2)
// sit at positions +-pi/2k with zero mean momentum; the two-particle product
// is (anti)symmetrized, then every unordered momentum pair {n,m} is rotated
// by a shared phase theta_nm = theta_mn uniform in [0, 2pi), which scrambles
// coherences while preserving exchange symmetry. Photons in vacuum; result
// normalized. Phase draws consume span*(span+1)/2 uniforms in a fixed order
// (n ascending, then m >= n), part of the per-trajectory stream contract.
//
// even_only (bosons only) restricts the support to even-even momentum pairs
// before normalization, modeling a parity-purified ensemble.
//
// Throws TruncationError if |n| <= n_max captures < 99.9% of the Gaussian
// momentum weight, ConfigError for sigma_n <= 0 or even_only with fermions.
StateVector initial_state(ExchangeSymmetry sym, double sigma_n,
                          const HilbertDims& dims, TrajectoryRng& rng,
                          bool even_only = false);

// The reflection-odd trapped state (|0,2> + |2,0> - |0,-2> - |-2,0>)/2 with
// photons in vacuum: a bosonic state orthogonal to the ground state that a
// reflection-symmetric generator can never cool.
StateVector reflection_odd_dark_state(const HilbertDims& dims);

// Single-particle packet amplitudes (c_n^(+), c_n^(-)) on the momentum grid
// (index n + n_max), unnormalized. Shared by the sampled construction above
// and its exact phase-averaged counterpart. Throws TruncationError when the
// cutoff drops more than 0.1% of the Gaussian weight.
std::pair<std::vector<Complex>, std::vector<Complex>> packet_amplitudes(
    double sigma_n, const HilbertDims& dims);

}  // namespace subrecoil
