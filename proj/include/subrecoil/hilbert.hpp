#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

#include "subrecoil/errors.hpp"

namespace subrecoil {

using Complex = std::complex<double>;
using Index = Eigen::Index;

enum class Geometry { Ring, Linear };
enum class ExchangeSymmetry { Boson, Fermion };

// Truncated composite basis: (particle-1 momentum, particle-2 momentum,
// cosine-mode Fock level, sine-mode Fock level). Momentum indices n run over
// -n_max..+n_max (p = n hbar k); Fock occupancies over 0..q-1. A linear
// cavity has no cosine mode, which is represented by freezing it at vacuum
// (q_c = 1).
struct HilbertDims {
    int n_max = 8;
    int q_c = 3;
    int q_s = 3;
    Geometry geometry = Geometry::Ring;

    static HilbertDims ring(int n_max, int q_c, int q_s) {
        HilbertDims d{n_max, q_c, q_s, Geometry::Ring};
        d.validate();
        return d;
    }
    static HilbertDims linear(int n_max, int q_s) {
        HilbertDims d{n_max, 1, q_s, Geometry::Linear};
        d.validate();
        return d;
    }

    int n_span() const { return 2 * n_max + 1; }

    Index dim() const {
        return static_cast<Index>(n_span()) * n_span() * q_c * q_s;
    }

    void validate() const;

    bool operator==(const HilbertDims&) const = default;
};

struct BasisIndex {
    int n1 = 0;
    int n2 = 0;
    int k_c = 0;
    int k_s = 0;

    bool operator==(const BasisIndex&) const = default;
};

// Row-major flattening, n1 slowest, then n2, then k_c, then k_s.
Index flatten(const BasisIndex& b, const HilbertDims& dims);
BasisIndex unflatten(Index i, const HilbertDims& dims);

// MCWF stochastic wave function over the composite basis. The norm may drop
// below one between quantum jumps; observables are evaluated on renormalized
// copies.
struct StateVector {
    Eigen::VectorXcd amps;
    HilbertDims dims;

    StateVector() = default;
    explicit StateVector(const HilbertDims& d)
        : amps(Eigen::VectorXcd::Zero(d.dim())), dims(d) {}
    StateVector(Eigen::VectorXcd a, const HilbertDims& d)
        : amps(std::move(a)), dims(d) {}

    double norm2() const { return amps.squaredNorm(); }

    void normalize() {
        const double n2 = norm2();
        if (n2 <= 0.0) throw NormalizationError("cannot normalize zero state");
        amps /= std::sqrt(n2);
    }

    StateVector normalized() const {
        StateVector out = *this;
        out.normalize();
        return out;
    }
};

// Exchanges the two particle slots: (n1, n2) -> (n2, n1).
StateVector swap_particles(const StateVector& psi);

inline bool is_even(int n) { return ((n % 2) + 2) % 2 == 0; }

}  // namespace subrecoil
