#pragma once

#include <cmath>
#include <vector>

#include "subrecoil/operators.hpp"

namespace subrecoil {

// Everything is expressed in recoil units: hbar = 1, omega_R = 1, momenta in
// units of hbar*k, energies in E_R. The photon number decays at rate 2*kappa.
struct PhysicalParams {
    double u0 = -2.5;    // light shift per photon (negative: high-field seeker)
    double kappa = 0.25; // field decay rate

    // Energy-selective scattering requires the cavity linewidth below the
    // smallest two-photon kinetic energy transfer, kappa < 4 omega_R.
    bool subrecoil_regime() const { return kappa < 4.0; }

    // Strict production-run validation; library-level tests may use the
    // u0 = 0 / kappa = 0 limits directly.
    void validate() const {
        if (!(u0 < 0.0)) throw ConfigError("u0 < 0 violated");
        if (!(kappa > 0.0)) throw ConfigError("kappa > 0 violated");
    }

    bool operator==(const PhysicalParams&) const = default;
};

struct DriveParams {
    double eta = 0.5;      // pump strength
    double delta_c = -6.5; // pump-cavity detuning omega_p - omega_c

    void validate() const {
        if (!std::isfinite(eta)) throw ConfigError("eta must be finite");
        if (!std::isfinite(delta_c)) throw ConfigError("delta_c must be finite");
    }
};

inline constexpr Index kDefaultDimBudget = 2'000'000;

// Coherent particle-field Hamiltonian:
//   H = sum_i n_i^2
//     + u0 [ n_c (cos^2(kx_1) + cos^2(kx_2)) + n_s (sin^2(kx_1) + sin^2(kx_2)) ]
//     + (u0/2) (ac^dag as + as^dag ac) (sin 2kx_1 + sin 2kx_2)
//     - delta_c (n_c + n_s) - i eta (as - as^dag)
// In the linear geometry the cosine-mode terms vanish identically (q_c = 1
// leaves the cosine ladder empty). Hermitian by construction.
SparseOperator build_hamiltonian(const PhysicalParams& params,
                                 const DriveParams& drive,
                                 const HilbertDims& dims,
                                 Index dim_budget = kDefaultDimBudget);

// Photon loss channels: sqrt(2 kappa) a_c and sqrt(2 kappa) a_s for the ring,
// only the sine mode for the linear cavity.
std::vector<SparseOperator> build_jump_operators(const PhysicalParams& params,
                                                 const HilbertDims& dims);

// H_eff = H - (i/2) sum_j L_j^dag L_j = H - i kappa (n_c + n_s).
SparseOperator effective_hamiltonian(const SparseOperator& hamiltonian,
                                     const std::vector<SparseOperator>& jumps);

}  // namespace subrecoil
