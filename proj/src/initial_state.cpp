#include "subrecoil/initial_state.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace subrecoil {

namespace {

Index vacuum_index(int n1, int n2, const HilbertDims& dims) {
    return flatten(BasisIndex{n1, n2, 0, 0}, dims);
}

}  // namespace

StateVector symmetrize(int n, int m, ExchangeSymmetry sym, const HilbertDims& dims) {
    dims.validate();
    if (std::abs(n) > dims.n_max || std::abs(m) > dims.n_max)
        throw BoundsError("momentum index outside +-n_max");
    if (sym == ExchangeSymmetry::Fermion && n == m)
        throw PauliExclusionError("antisymmetrization of equal momenta vanishes");

    StateVector psi{Eigen::VectorXcd::Zero(dims.dim()), dims};
    if (n == m) {
        psi.amps[vacuum_index(n, n, dims)] = 1.0;
        return psi;
    }
    const double sign = (sym == ExchangeSymmetry::Boson) ? 1.0 : -1.0;
    const double amp = 1.0 / std::sqrt(2.0);
    psi.amps[vacuum_index(n, m, dims)] = amp;
    psi.amps[vacuum_index(m, n, dims)] = sign * amp;
    return psi;
}

std::pair<std::vector<Complex>, std::vector<Complex>> packet_amplitudes(
    double sigma_n, const HilbertDims& dims) {
    if (!(sigma_n > 0.0)) throw ConfigError("sigma_n > 0 violated");

    // Captured single-particle Gaussian weight must be >= 99.9%; the tail sum
    // converges after a few sigma.
    const auto weight = [&](int n) {
        return std::exp(-static_cast<double>(n) * n / (2.0 * sigma_n * sigma_n));
    };
    double captured = weight(0);
    for (int n = 1; n <= dims.n_max; ++n) captured += 2.0 * weight(n);
    double total = captured;
    for (int n = dims.n_max + 1;; ++n) {
        const double w = 2.0 * weight(n);
        total += w;
        if (w < total * 1e-18) break;
    }
    if (captured < 0.999 * total)
        throw TruncationError("momentum cutoff drops > 0.1% of the packet weight");

    // The +-pi/2k position offsets are pure momentum-space phases.
    const int span = dims.n_span();
    const double half_pi = std::numbers::pi / 2.0;
    std::vector<Complex> c_plus(span), c_minus(span);
    for (int n = -dims.n_max; n <= dims.n_max; ++n) {
        const double env = std::exp(-static_cast<double>(n) * n / (4.0 * sigma_n * sigma_n));
        c_plus[n + dims.n_max] = env * std::polar(1.0, -half_pi * n);
        c_minus[n + dims.n_max] = env * std::polar(1.0, half_pi * n);
    }
    return {std::move(c_plus), std::move(c_minus)};
}

StateVector initial_state(ExchangeSymmetry sym, double sigma_n,
                          const HilbertDims& dims, TrajectoryRng& rng,
                          bool even_only) {
    dims.validate();
    if (even_only && sym == ExchangeSymmetry::Fermion)
        throw ConfigError("even-only support requires bosons");

    const auto [c_plus, c_minus] = packet_amplitudes(sigma_n, dims);
    const int span = dims.n_span();

    // One phase per unordered pair, fixed draw order (n ascending, m >= n).
    std::vector<double> theta(static_cast<std::size_t>(span) * span);
    for (int i = 0; i < span; ++i)
        for (int j = i; j < span; ++j) {
            const double t = 2.0 * std::numbers::pi * rng.uniform();
            theta[static_cast<std::size_t>(i) * span + j] = t;
            theta[static_cast<std::size_t>(j) * span + i] = t;
        }

    const double sign = (sym == ExchangeSymmetry::Boson) ? 1.0 : -1.0;
    StateVector psi{Eigen::VectorXcd::Zero(dims.dim()), dims};
    for (int n = -dims.n_max; n <= dims.n_max; ++n)
        for (int m = -dims.n_max; m <= dims.n_max; ++m) {
            if (even_only && (!is_even(n) || !is_even(m))) continue;
            // The two phase terms cancel exactly for mixed-parity bosonic
            // pairs and equal-parity fermionic pairs; keep those amplitudes
            // at exact zero instead of rounding residue.
            const bool mixed = is_even(n) != is_even(m);
            if (sym == ExchangeSymmetry::Boson ? mixed : !mixed) continue;
            const int i = n + dims.n_max;
            const int j = m + dims.n_max;
            const Complex pair = c_plus[i] * c_minus[j] + sign * c_plus[j] * c_minus[i];
            psi.amps[vacuum_index(n, m, dims)] =
                pair * std::polar(1.0, theta[static_cast<std::size_t>(i) * span + j]);
        }

    psi.normalize();
    return psi;
}

StateVector reflection_odd_dark_state(const HilbertDims& dims) {
    dims.validate();
    if (dims.n_max < 2) throw BoundsError("requires n_max >= 2");
    StateVector psi{Eigen::VectorXcd::Zero(dims.dim()), dims};
    psi.amps[vacuum_index(0, 2, dims)] = 0.5;
    psi.amps[vacuum_index(2, 0, dims)] = 0.5;
    psi.amps[vacuum_index(0, -2, dims)] = -0.5;
    psi.amps[vacuum_index(-2, 0, dims)] = -0.5;
    return psi;
}

}  // namespace subrecoil
