#include "subrecoil/observables.hpp"

#include <cmath>

namespace subrecoil {

namespace {

double squared_norm_or_throw(const StateVector& psi) {
    const double n2 = psi.amps.squaredNorm();
    if (!(n2 > 0.0)) throw NormalizationError("observables of a zero state");
    return n2;
}

Eigen::VectorXd marginal_from_joint(const Eigen::MatrixXd& joint) {
    return 0.5 * (joint.rowwise().sum() + joint.colwise().sum().transpose());
}

std::array<double, 3> parity_from_joint(const Eigen::MatrixXd& joint, int n_max) {
    std::array<double, 3> fracs{};
    const int span = static_cast<int>(joint.rows());
    for (int i = 0; i < span; ++i)
        for (int j = 0; j < span; ++j) {
            const bool e1 = is_even(i - n_max);
            const bool e2 = is_even(j - n_max);
            fracs[e1 && e2 ? 0 : (!e1 && !e2 ? 1 : 2)] += joint(i, j);
        }
    return fracs;
}

double ekin_from_joint(const Eigen::MatrixXd& joint, int n_max) {
    double e = 0.0;
    const int span = static_cast<int>(joint.rows());
    for (int i = 0; i < span; ++i)
        for (int j = 0; j < span; ++j) {
            const double n = i - n_max;
            const double m = j - n_max;
            e += joint(i, j) * 0.5 * (n * n + m * m);
        }
    return e;
}

std::optional<double> teff_from_marginal(const Eigen::VectorXd& marginal, int n_max) {
    const double p0 = marginal[n_max];
    // An empty n = 0 bin is a legal (non-thermal) record state, not a
    // caller error as it is for the standalone temperature estimate.
    if (p0 <= 0.0) return std::nullopt;
    double p2 = 0.0;
    if (n_max >= 2) p2 = marginal[n_max - 2] + marginal[n_max + 2];
    return effective_temperature(p0, p2);
}

}  // namespace

Eigen::MatrixXd momentum_joint(const StateVector& psi) {
    const HilbertDims& d = psi.dims;
    const double n2 = squared_norm_or_throw(psi);
    const int span = d.n_span();
    const Index block = static_cast<Index>(d.q_c) * d.q_s;
    Eigen::MatrixXd joint(span, span);
    for (int i = 0; i < span; ++i)
        for (int j = 0; j < span; ++j)
            joint(i, j) =
                psi.amps.segment((static_cast<Index>(i) * span + j) * block, block)
                    .squaredNorm() /
                n2;
    return joint;
}

Eigen::VectorXd momentum_marginal(const StateVector& psi) {
    return marginal_from_joint(momentum_joint(psi));
}

double kinetic_energy(const StateVector& psi) {
    return ekin_from_joint(momentum_joint(psi), psi.dims.n_max);
}

MomentumMoments momentum_moments(const Eigen::MatrixXd& joint, int n_max) {
    MomentumMoments m;
    const int span = static_cast<int>(joint.rows());
    for (int i = 0; i < span; ++i)
        for (int j = 0; j < span; ++j) {
            const double n = i - n_max;
            const double mm = j - n_max;
            const double p = joint(i, j);
            m.p1 += p * n;
            m.p2 += p * mm;
            m.p1p1 += p * n * n;
            m.p2p2 += p * mm * mm;
            m.p1p2 += p * n * mm;
        }
    return m;
}

std::optional<double> correlation_from_moments(const MomentumMoments& m) {
    const double var1 = std::max(0.0, m.p1p1 - m.p1 * m.p1);
    const double var2 = std::max(0.0, m.p2p2 - m.p2 * m.p2);
    const double dp1 = std::sqrt(var1);
    const double dp2 = std::sqrt(var2);
    if (dp1 < 1e-9 || dp2 < 1e-9) return std::nullopt;
    return (m.p1p2 - m.p1 * m.p2) / (dp1 * dp2);
}

std::optional<double> momentum_correlation(const StateVector& psi) {
    return correlation_from_moments(
        momentum_moments(momentum_joint(psi), psi.dims.n_max));
}

double ground_state_projection(const StateVector& psi, ExchangeSymmetry sym) {
    const HilbertDims& d = psi.dims;
    const double n2 = squared_norm_or_throw(psi);
    double proj = 0.0;
    if (sym == ExchangeSymmetry::Boson) {
        for (int kc = 0; kc < d.q_c; ++kc)
            for (int ks = 0; ks < d.q_s; ++ks)
                proj += std::norm(psi.amps[flatten({0, 0, kc, ks}, d)]);
    } else {
        for (int s : {+1, -1})
            for (int kc = 0; kc < d.q_c; ++kc)
                for (int ks = 0; ks < d.q_s; ++ks) {
                    const Complex a = psi.amps[flatten({s, 0, kc, ks}, d)];
                    const Complex b = psi.amps[flatten({0, s, kc, ks}, d)];
                    proj += 0.5 * std::norm(a - b);
                }
    }
    return proj / n2;
}

double bunching_parameter(const StateVector& psi) {
    const HilbertDims& d = psi.dims;
    const double n2 = squared_norm_or_throw(psi);
    double cos_sum = 0.0;  // <cos 2kx_1> + <cos 2kx_2>, unnormalized
    for (int n1 = -d.n_max; n1 <= d.n_max; ++n1)
        for (int n2i = -d.n_max; n2i <= d.n_max; ++n2i)
            for (int kc = 0; kc < d.q_c; ++kc)
                for (int ks = 0; ks < d.q_s; ++ks) {
                    const Complex amp = psi.amps[flatten({n1, n2i, kc, ks}, d)];
                    if (n1 + 2 <= d.n_max)
                        cos_sum += (std::conj(psi.amps[flatten({n1 + 2, n2i, kc, ks}, d)]) * amp)
                                       .real();
                    if (n2i + 2 <= d.n_max)
                        cos_sum += (std::conj(psi.amps[flatten({n1, n2i + 2, kc, ks}, d)]) * amp)
                                       .real();
                }
    return 0.5 - 0.25 * cos_sum / n2;
}

std::optional<double> effective_temperature(double p0, double p2) {
    if (p0 <= 0.0) throw DomainError("ground weight p0 must be positive");
    if (p2 <= 0.0) return std::nullopt;  // zero-temperature limit
    if (p2 >= p0) return std::nullopt;   // non-thermal ordering
    return 4.0 / std::log(p0 / p2);
}

std::array<double, 3> parity_fractions(const StateVector& psi) {
    return parity_from_joint(momentum_joint(psi), psi.dims.n_max);
}

ObservableRecord observe(const StateVector& psi, ExchangeSymmetry sym) {
    const HilbertDims& d = psi.dims;
    const double n2 = squared_norm_or_throw(psi);

    ObservableRecord rec;
    rec.p_joint = momentum_joint(psi);
    rec.p_single = marginal_from_joint(rec.p_joint);
    rec.e_kin = ekin_from_joint(rec.p_joint, d.n_max);
    rec.moments = momentum_moments(rec.p_joint, d.n_max);
    rec.c_p = correlation_from_moments(rec.moments);
    rec.p_ground = ground_state_projection(psi, sym);
    rec.parity_fracs = parity_from_joint(rec.p_joint, d.n_max);
    rec.bunching = bunching_parameter(psi);
    rec.t_eff = teff_from_marginal(rec.p_single, d.n_max);

    double nc = 0.0, ns = 0.0;
    for (Index i = 0; i < psi.amps.size(); ++i) {
        const double w = std::norm(psi.amps[i]);
        if (w == 0.0) continue;
        const BasisIndex s = unflatten(i, d);
        nc += w * s.k_c;
        ns += w * s.k_s;
    }
    rec.n_photons_c = nc / n2;
    rec.n_photons_s = ns / n2;
    return rec;
}

ObservableRecord observe_density(const Eigen::MatrixXcd& rho,
                                 const HilbertDims& dims, ExchangeSymmetry sym) {
    const Index dim = dims.dim();
    if (rho.rows() != dim || rho.cols() != dim)
        throw BoundsError("density matrix dimension mismatch");
    const double tr = rho.trace().real();
    if (!(tr > 0.0)) throw NormalizationError("density matrix trace not positive");

    const int span = dims.n_span();
    ObservableRecord rec;

    rec.p_joint = Eigen::MatrixXd::Zero(span, span);
    double nc = 0.0, ns = 0.0;
    for (Index i = 0; i < dim; ++i) {
        const double w = rho(i, i).real() / tr;
        const BasisIndex s = unflatten(i, dims);
        rec.p_joint(s.n1 + dims.n_max, s.n2 + dims.n_max) += w;
        nc += w * s.k_c;
        ns += w * s.k_s;
    }
    rec.n_photons_c = nc;
    rec.n_photons_s = ns;

    rec.p_single = marginal_from_joint(rec.p_joint);
    rec.e_kin = ekin_from_joint(rec.p_joint, dims.n_max);
    rec.moments = momentum_moments(rec.p_joint, dims.n_max);
    rec.c_p = correlation_from_moments(rec.moments);
    rec.parity_fracs = parity_from_joint(rec.p_joint, dims.n_max);
    rec.t_eff = teff_from_marginal(rec.p_single, dims.n_max);

    if (sym == ExchangeSymmetry::Boson) {
        double proj = 0.0;
        for (int kc = 0; kc < dims.q_c; ++kc)
            for (int ks = 0; ks < dims.q_s; ++ks) {
                const Index a = flatten({0, 0, kc, ks}, dims);
                proj += rho(a, a).real();
            }
        rec.p_ground = proj / tr;
    } else {
        double proj = 0.0;
        for (int s : {+1, -1})
            for (int kc = 0; kc < dims.q_c; ++kc)
                for (int ks = 0; ks < dims.q_s; ++ks) {
                    const Index a = flatten({s, 0, kc, ks}, dims);
                    const Index b = flatten({0, s, kc, ks}, dims);
                    proj += 0.5 * (rho(a, a).real() + rho(b, b).real() -
                                   2.0 * rho(a, b).real());
                }
        rec.p_ground = proj / tr;
    }

    double cos_sum = 0.0;
    for (int n1 = -dims.n_max; n1 <= dims.n_max; ++n1)
        for (int m = -dims.n_max; m <= dims.n_max; ++m)
            for (int kc = 0; kc < dims.q_c; ++kc)
                for (int ks = 0; ks < dims.q_s; ++ks) {
                    const Index from = flatten({n1, m, kc, ks}, dims);
                    if (n1 + 2 <= dims.n_max)
                        cos_sum += rho(from, flatten({n1 + 2, m, kc, ks}, dims)).real();
                    if (m + 2 <= dims.n_max)
                        cos_sum += rho(from, flatten({n1, m + 2, kc, ks}, dims)).real();
                }
    rec.bunching = 0.5 - 0.25 * cos_sum / tr;

    return rec;
}

}  // namespace subrecoil
