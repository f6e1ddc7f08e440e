#include "subrecoil/cavity.hpp"

#include <cmath>
#include <string>

namespace subrecoil {

SparseOperator build_hamiltonian(const PhysicalParams& params,
                                 const DriveParams& drive,
                                 const HilbertDims& dims,
                                 Index dim_budget) {
    dims.validate();
    const Index dim = dims.dim();
    if (dim > dim_budget)
        throw CapacityError("state dimension " + std::to_string(dim) +
                            " exceeds budget " + std::to_string(dim_budget));

    OperatorBuilder b(dim);

    // Kinetic energy and detuning-shifted photon energies are diagonal.
    for (Index i = 0; i < dim; ++i) {
        const BasisIndex s = unflatten(i, dims);
        const double kin = static_cast<double>(s.n1) * s.n1 +
                           static_cast<double>(s.n2) * s.n2;
        b.add_diag(i, kin - drive.delta_c * (s.k_c + s.k_s));
    }

    // Optical potentials: photon-number-weighted trig couplings. The diagonal
    // 1/2 of cos^2 and sin^2 and the n -> n+-2 off-diagonals enter per particle.
    auto add_potential = [&](CavityMode mode, TrigKind kind) {
        for (Index i = 0; i < dim; ++i) {
            const BasisIndex s = unflatten(i, dims);
            const int k = (mode == CavityMode::Cosine) ? s.k_c : s.k_s;
            if (k > 0) b.add_diag(i, params.u0 * k);  // 2 * k * 1/2 per particle pair
        }
        const double up = (kind == TrigKind::CosSq) ? 0.25 : -0.25;
        for (int particle = 1; particle <= 2; ++particle) {
            for (Index i = 0; i < dim; ++i) {
                const BasisIndex s = unflatten(i, dims);
                const int k = (mode == CavityMode::Cosine) ? s.k_c : s.k_s;
                if (k == 0) continue;
                const int n = (particle == 1) ? s.n1 : s.n2;
                if (n + 2 > dims.n_max) continue;
                BasisIndex to = s;
                (particle == 1 ? to.n1 : to.n2) += 2;
                b.add_herm(flatten(to, dims), i, params.u0 * k * up);
            }
        }
    };
    add_potential(CavityMode::Cosine, TrigKind::CosSq);
    add_potential(CavityMode::Sine, TrigKind::SinSq);

    // Mode-swapping scattering (u0/2)(ac^dag as + h.c.) sin(2kx_i): connects
    // (k_c, k_s) -> (k_c + 1, k_s - 1) with a two-recoil momentum kick. Empty
    // ladder (q_c = 1) removes it in the linear geometry.
    for (int particle = 1; particle <= 2; ++particle) {
        for (Index i = 0; i < dim; ++i) {
            const BasisIndex s = unflatten(i, dims);
            if (s.k_s == 0 || s.k_c + 1 >= dims.q_c) continue;
            const double amp = 0.5 * params.u0 *
                               std::sqrt(static_cast<double>(s.k_s) * (s.k_c + 1));
            const int n = (particle == 1) ? s.n1 : s.n2;
            BasisIndex to = s;
            to.k_c += 1;
            to.k_s -= 1;
            // <n+2|sin 2kx|n> = -i/2, <n-2|sin 2kx|n> = +i/2
            if (n + 2 <= dims.n_max) {
                BasisIndex up = to;
                (particle == 1 ? up.n1 : up.n2) += 2;
                b.add_herm(flatten(up, dims), i, amp * Complex(0.0, -0.5));
            }
            if (n - 2 >= -dims.n_max) {
                BasisIndex down = to;
                (particle == 1 ? down.n1 : down.n2) -= 2;
                b.add_herm(flatten(down, dims), i, amp * Complex(0.0, 0.5));
            }
        }
    }

    // Pump drive -i eta (as - as^dag) = -i eta as + i eta as^dag.
    for (Index i = 0; i < dim; ++i) {
        const BasisIndex s = unflatten(i, dims);
        if (s.k_s == 0) continue;
        BasisIndex to = s;
        to.k_s -= 1;
        b.add_herm(flatten(to, dims), i,
                   Complex(0.0, -drive.eta) * std::sqrt(static_cast<double>(s.k_s)));
    }

    return b.build();
}

std::vector<SparseOperator> build_jump_operators(const PhysicalParams& params,
                                                 const HilbertDims& dims) {
    dims.validate();
    const double rate = std::sqrt(2.0 * params.kappa);
    std::vector<SparseOperator> jumps;
    if (dims.geometry == Geometry::Ring)
        jumps.push_back(SparseOperator(rate * mode_annihilation(CavityMode::Cosine, dims)));
    jumps.push_back(SparseOperator(rate * mode_annihilation(CavityMode::Sine, dims)));
    return jumps;
}

SparseOperator effective_hamiltonian(const SparseOperator& hamiltonian,
                                     const std::vector<SparseOperator>& jumps) {
    SparseOperator h_eff = hamiltonian;
    for (const auto& jump : jumps) {
        SparseOperator damp = SparseOperator(jump.adjoint()) * jump;
        h_eff = h_eff - Complex(0.0, 0.5) * damp;
    }
    h_eff.makeCompressed();
    return h_eff;
}

}  // namespace subrecoil
