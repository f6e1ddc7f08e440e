#include "subrecoil/operators.hpp"

#include <cmath>
#include <vector>

namespace subrecoil {

SparseOperator OperatorBuilder::build() const {
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(acc_.size());
    for (const auto& [ij, v] : acc_)
        if (v != Complex(0.0, 0.0))
            trips.emplace_back(static_cast<int>(ij.first),
                               static_cast<int>(ij.second), v);
    SparseOperator op(dim_, dim_);
    op.setFromTriplets(trips.begin(), trips.end());
    op.makeCompressed();
    return op;
}

namespace {

// Applies fn(flat_from, flat_to, factor) for the single-particle coupling
// n -> n + shift on the given slot, for every setting of the other indices.
template <typename Fn>
void for_each_particle_coupling(Particle particle, int shift,
                                const HilbertDims& dims, Fn&& fn) {
    const int span = dims.n_span();
    const Index block = static_cast<Index>(dims.q_c) * dims.q_s;
    for (int ia = 0; ia < span; ++ia) {
        const int ib = ia + shift;
        if (ib < 0 || ib >= span) continue;
        for (int io = 0; io < span; ++io) {
            Index row_from, row_to;
            if (particle == Particle::One) {
                row_from = (static_cast<Index>(ia) * span + io) * block;
                row_to = (static_cast<Index>(ib) * span + io) * block;
            } else {
                row_from = (static_cast<Index>(io) * span + ia) * block;
                row_to = (static_cast<Index>(io) * span + ib) * block;
            }
            for (Index ph = 0; ph < block; ++ph)
                fn(row_from + ph, row_to + ph);
        }
    }
}

}  // namespace

SparseOperator build_trig_operator(TrigKind kind, Particle particle,
                                   const HilbertDims& dims) {
    dims.validate();
    OperatorBuilder b(dims.dim());

    const bool has_diag = (kind == TrigKind::CosSq || kind == TrigKind::SinSq);
    if (has_diag)
        for (Index i = 0; i < dims.dim(); ++i) b.add_diag(i, Complex(0.5, 0.0));

    Complex up;  // coefficient of |n+2><n|
    switch (kind) {
        case TrigKind::Cos2kx: up = Complex(0.5, 0.0); break;
        case TrigKind::Sin2kx: up = Complex(0.0, -0.5); break;
        case TrigKind::CosSq: up = Complex(0.25, 0.0); break;
        case TrigKind::SinSq: up = Complex(-0.25, 0.0); break;
    }
    for_each_particle_coupling(particle, +2, dims,
                               [&](Index from, Index to) { b.add_herm(to, from, up); });
    return b.build();
}

SparseOperator mode_annihilation(CavityMode mode, const HilbertDims& dims) {
    dims.validate();
    OperatorBuilder b(dims.dim());
    const Index dim = dims.dim();
    for (Index i = 0; i < dim; ++i) {
        const BasisIndex bi = unflatten(i, dims);
        const int k = (mode == CavityMode::Cosine) ? bi.k_c : bi.k_s;
        if (k == 0) continue;
        BasisIndex bj = bi;
        if (mode == CavityMode::Cosine)
            bj.k_c = k - 1;
        else
            bj.k_s = k - 1;
        b.add(flatten(bj, dims), i, Complex(std::sqrt(double(k)), 0.0));
    }
    return b.build();
}

SparseOperator mode_number(CavityMode mode, const HilbertDims& dims) {
    dims.validate();
    OperatorBuilder b(dims.dim());
    const Index dim = dims.dim();
    for (Index i = 0; i < dim; ++i) {
        const BasisIndex bi = unflatten(i, dims);
        const int k = (mode == CavityMode::Cosine) ? bi.k_c : bi.k_s;
        if (k != 0) b.add_diag(i, Complex(double(k), 0.0));
    }
    return b.build();
}

SparseOperator identity_operator(Index dim) {
    SparseOperator id(dim, dim);
    id.setIdentity();
    return id;
}

double hermiticity_defect(const SparseOperator& op) {
    SparseOperator adj = SparseOperator(op.adjoint());
    double worst = 0.0;
    for (int k = 0; k < op.outerSize(); ++k)
        for (SparseOperator::InnerIterator it(op, k); it; ++it) {
            const Complex other = adj.coeff(it.row(), it.col());
            worst = std::max(worst, std::abs(it.value() - other));
        }
    return worst;
}

}  // namespace subrecoil
