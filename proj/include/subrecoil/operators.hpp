#pragma once

#include <map>
#include <utility>

#include <Eigen/Sparse>

#include "subrecoil/hilbert.hpp"

namespace subrecoil {

// All model operators couple each basis state to a bounded number of others,
// so coordinate-list storage stays O(dim). Row-major so the propagator can
// walk compressed rows directly.
using SparseOperator = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

enum class TrigKind { Cos2kx, Sin2kx, CosSq, SinSq };
enum class Particle { One = 1, Two = 2 };
enum class CavityMode { Cosine, Sine };

// Accumulates matrix entries with exact Hermitian pairing: off-diagonal
// entries are always inserted together with their conjugate transpose, and
// duplicate entries are summed in a deterministic order, so the assembled
// operator satisfies entry(i,j) == conj(entry(j,i)) bitwise.
class OperatorBuilder {
  public:
    explicit OperatorBuilder(Index dim) : dim_(dim) {}

    void add_diag(Index i, Complex v) { acc_[{i, i}] += v; }

    // Inserts v at (i, j) and conj(v) at (j, i).
    void add_herm(Index i, Index j, Complex v) {
        acc_[{i, j}] += v;
        acc_[{j, i}] += std::conj(v);
    }

    // One-sided insertion for non-Hermitian operators (ladder operators).
    void add(Index i, Index j, Complex v) { acc_[{i, j}] += v; }

    SparseOperator build() const;

  private:
    Index dim_;
    std::map<std::pair<Index, Index>, Complex> acc_;
};

// Single-particle trigonometric operator in the plane-wave basis, embedded on
// the chosen particle slot of the composite space. Matrix elements:
//   <n+-2|cos(2kx)|n> = 1/2
//   <n+2|sin(2kx)|n> = -i/2,  <n-2|sin(2kx)|n> = +i/2
//   cos^2 = (1 + cos 2kx)/2,  sin^2 = (1 - cos 2kx)/2
// Couplings beyond |n| = n_max are dropped (open truncation).
SparseOperator build_trig_operator(TrigKind kind, Particle particle,
                                   const HilbertDims& dims);

// Photon annihilation operator of one cavity mode, a|q> = sqrt(q)|q-1>,
// embedded on the composite space.
SparseOperator mode_annihilation(CavityMode mode, const HilbertDims& dims);

// Photon number operator of one cavity mode (diagonal).
SparseOperator mode_number(CavityMode mode, const HilbertDims& dims);

SparseOperator identity_operator(Index dim);

// Largest |entry(i,j) - conj(entry(j,i))| over all stored entries.
double hermiticity_defect(const SparseOperator& op);

}  // namespace subrecoil
