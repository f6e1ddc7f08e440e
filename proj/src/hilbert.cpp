#include "subrecoil/hilbert.hpp"

#include <string>

namespace subrecoil {

void HilbertDims::validate() const {
    if (n_max < 1) throw ConfigError("n_max >= 1 violated");
    if (q_s < 2) throw ConfigError("q_s >= 2 violated");
    if (geometry == Geometry::Linear && q_c != 1)
        throw ConfigError("Linear geometry requires q_c = 1");
    if (geometry == Geometry::Ring && q_c < 2)
        throw ConfigError("Ring geometry requires q_c >= 2");
}

Index flatten(const BasisIndex& b, const HilbertDims& dims) {
    const int span = dims.n_span();
    if (b.n1 < -dims.n_max || b.n1 > dims.n_max || b.n2 < -dims.n_max ||
        b.n2 > dims.n_max)
        throw BoundsError("momentum index out of range: (" +
                          std::to_string(b.n1) + ", " + std::to_string(b.n2) +
                          ") with n_max " + std::to_string(dims.n_max));
    if (b.k_c < 0 || b.k_c >= dims.q_c || b.k_s < 0 || b.k_s >= dims.q_s)
        throw BoundsError("Fock index out of range: (" +
                          std::to_string(b.k_c) + ", " + std::to_string(b.k_s) +
                          ")");
    const Index i1 = b.n1 + dims.n_max;
    const Index i2 = b.n2 + dims.n_max;
    return ((i1 * span + i2) * dims.q_c + b.k_c) * dims.q_s + b.k_s;
}

BasisIndex unflatten(Index i, const HilbertDims& dims) {
    if (i < 0 || i >= dims.dim())
        throw BoundsError("flat index out of range: " + std::to_string(i));
    BasisIndex b;
    b.k_s = static_cast<int>(i % dims.q_s);
    i /= dims.q_s;
    b.k_c = static_cast<int>(i % dims.q_c);
    i /= dims.q_c;
    const int span = dims.n_span();
    b.n2 = static_cast<int>(i % span) - dims.n_max;
    b.n1 = static_cast<int>(i / span) - dims.n_max;
    return b;
}

StateVector swap_particles(const StateVector& psi) {
    const HilbertDims& d = psi.dims;
    StateVector out(d);
    const int span = d.n_span();
    const Index block = static_cast<Index>(d.q_c) * d.q_s;
    for (Index i1 = 0; i1 < span; ++i1)
        for (Index i2 = 0; i2 < span; ++i2) {
            const Index src = (i1 * span + i2) * block;
            const Index dst = (i2 * span + i1) * block;
            out.amps.segment(dst, block) = psi.amps.segment(src, block);
        }
    return out;
}

}  // namespace subrecoil
