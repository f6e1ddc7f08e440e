#include "subrecoil/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "subrecoil/initial_state.hpp"

namespace subrecoil {

namespace {

namespace odeint = boost::numeric::odeint;

using DenseMatrix = Eigen::MatrixXcd;
using MatrixMap = Eigen::Map<DenseMatrix>;
using ConstMatrixMap = Eigen::Map<const DenseMatrix>;

struct LindbladSystem {
    const SparseOperator* h;
    const std::vector<SparseOperator>* jumps;
    const std::vector<SparseOperator>* jump_adjoints;
    const std::vector<SparseOperator>* damping;  // L^dag L per channel
    Index dim;

    void operator()(const std::vector<double>& x, std::vector<double>& dxdt,
                    double /*t*/) const {
        ConstMatrixMap rho(reinterpret_cast<const Complex*>(x.data()), dim, dim);
        MatrixMap out(reinterpret_cast<Complex*>(dxdt.data()), dim, dim);
        out.noalias() = Complex(0.0, -1.0) * (*h * rho);
        out.noalias() += Complex(0.0, 1.0) * (rho * *h);
        for (std::size_t j = 0; j < jumps->size(); ++j) {
            const DenseMatrix l_rho = (*jumps)[j] * rho;
            out.noalias() += l_rho * (*jump_adjoints)[j];
            out.noalias() -= 0.5 * ((*damping)[j] * rho);
            out.noalias() -= 0.5 * (rho * (*damping)[j]);
        }
    }
};

double time_eps(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

}  // namespace

std::vector<DenseMatrix> integrate_master_equation(
    const DenseMatrix& rho0, const SparseOperator& h,
    const std::vector<SparseOperator>& jumps,
    const std::vector<double>& sample_times, double ode_tol, Index dim_limit) {
    const Index dim = rho0.rows();
    if (rho0.cols() != dim) throw BoundsError("density matrix must be square");
    if (dim > dim_limit)
        throw CapacityError("dense integration limited to dimension " +
                            std::to_string(dim_limit));
    if (h.rows() != dim) throw BoundsError("generator dimension mismatch");
    if (std::abs(rho0.trace().real() - 1.0) > 1e-8 ||
        std::abs(rho0.trace().imag()) > 1e-8)
        throw NormalizationError("initial density matrix must have unit trace");
    for (std::size_t i = 1; i < sample_times.size(); ++i)
        if (!(sample_times[i] > sample_times[i - 1]))
            throw ConfigError("sample_times must be strictly increasing");

    std::vector<SparseOperator> adjoints, damping;
    adjoints.reserve(jumps.size());
    damping.reserve(jumps.size());
    for (const auto& l : jumps) {
        SparseOperator ld = l.adjoint();
        SparseOperator d = ld * l;
        d.makeCompressed();
        ld.makeCompressed();
        adjoints.push_back(std::move(ld));
        damping.push_back(std::move(d));
    }
    const LindbladSystem system{&h, &jumps, &adjoints, &damping, dim};

    using state_type = std::vector<double>;
    using error_stepper = odeint::runge_kutta_cash_karp54<state_type>;
    auto ctrl = odeint::make_controlled<error_stepper>(ode_tol, ode_tol);

    state_type x(2 * static_cast<std::size_t>(dim) * dim);
    MatrixMap rho(reinterpret_cast<Complex*>(x.data()), dim, dim);
    rho = rho0;

    std::vector<DenseMatrix> out;
    out.reserve(sample_times.size());
    double t = 0.0;
    double dt_try = 1e-3;
    for (double t_target : sample_times) {
        if (t_target < t - time_eps(t))
            throw ConfigError("sample times must not precede t = 0");
        while (t_target - t > time_eps(t_target)) {
            double dt = std::min(dt_try, t_target - t);
            int attempts = 0;
            while (ctrl.try_step(system, x, t, dt) == odeint::fail) {
                if (dt < 1e-14 * std::max(1.0, std::abs(t)))
                    throw IntegrationError("step size underflow");
                if (++attempts > 1000)
                    throw IntegrationError("step control failed to converge");
            }
            dt_try = dt;
            // Re-Hermitize: drift of the anti-Hermitian part is pure
            // integration error and would otherwise accumulate.
            rho = (0.5 * (rho + rho.adjoint().eval())).eval();
        }
        t = t_target;
        const Complex tr = rho.trace();
        if (std::abs(tr - Complex(1.0, 0.0)) > 1e-8)
            throw IntegrationError("trace drift exceeds 1e-8");
        out.emplace_back(rho);
    }
    return out;
}

DenseMatrix phase_averaged_density(ExchangeSymmetry sym, double sigma_n,
                                   const HilbertDims& dims, bool even_only) {
    dims.validate();
    if (even_only && sym == ExchangeSymmetry::Fermion)
        throw ConfigError("even-only support requires bosons");
    const auto [c_plus, c_minus] = packet_amplitudes(sigma_n, dims);

    // Independent pair phases kill every cross-pair coherence; each unordered
    // pair {n,m} contributes the projector onto its exchange-adapted
    // combination, weighted by the pair amplitude.
    const double sign = (sym == ExchangeSymmetry::Boson) ? 1.0 : -1.0;
    const Index dim = dims.dim();
    DenseMatrix rho = DenseMatrix::Zero(dim, dim);
    double norm2 = 0.0;
    for (int n = -dims.n_max; n <= dims.n_max; ++n)
        for (int m = n; m <= dims.n_max; ++m) {
            if (even_only && (!is_even(n) || !is_even(m))) continue;
            const int i = n + dims.n_max;
            const int j = m + dims.n_max;
            const Complex a_nm = c_plus[i] * c_minus[j] + sign * c_plus[j] * c_minus[i];
            if (std::norm(a_nm) == 0.0) continue;
            const Index row = flatten({n, m, 0, 0}, dims);
            if (n == m) {
                rho(row, row) += std::norm(a_nm);
                norm2 += std::norm(a_nm);
                continue;
            }
            const Complex a_mn = sign * a_nm;  // exchange-symmetric partner
            const Index col = flatten({m, n, 0, 0}, dims);
            rho(row, row) += std::norm(a_nm);
            rho(col, col) += std::norm(a_mn);
            rho(row, col) += a_nm * std::conj(a_mn);
            rho(col, row) += a_mn * std::conj(a_nm);
            norm2 += std::norm(a_nm) + std::norm(a_mn);
        }
    if (!(norm2 > 0.0)) throw NormalizationError("empty initial support");
    rho /= norm2;
    return rho;
}

}  // namespace subrecoil
