#include "subrecoil/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

namespace subrecoil {

namespace {

namespace odeint = boost::numeric::odeint;

// Right-hand side dpsi/dt = M psi over the interleaved re/im buffer.
// std::complex<double> is layout-compatible with double[2], so the buffer is
// mapped in place; the CSR loop is the per-step hot path.
struct DriftSystem {
    const SparseOperator* m;

    void operator()(const std::vector<double>& x, std::vector<double>& dxdt,
                    double /*t*/) const {
        const auto* px = reinterpret_cast<const Complex*>(x.data());
        auto* pd = reinterpret_cast<Complex*>(dxdt.data());
        const Index rows = m->rows();
        const auto* row_ptr = m->outerIndexPtr();
        const auto* cols = m->innerIndexPtr();
        const Complex* vals = m->valuePtr();
        for (Index r = 0; r < rows; ++r) {
            Complex acc{0.0, 0.0};
            const auto end = row_ptr[r + 1];
            for (auto k = row_ptr[r]; k < end; ++k) acc += vals[k] * px[cols[k]];
            pd[r] = acc;
        }
    }
};

double squared_norm_of(const std::vector<double>& x) {
    return Eigen::Map<const Eigen::VectorXd>(x.data(),
                                             static_cast<Index>(x.size()))
        .squaredNorm();
}

double time_eps(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

}  // namespace

struct TrajectoryEvolver::OdeState {
    using state_type = std::vector<double>;
    using error_stepper = odeint::runge_kutta_cash_karp54<state_type>;
    using controlled_type =
        odeint::controlled_runge_kutta<error_stepper,
                                       odeint::default_error_checker<
                                           double, odeint::range_algebra,
                                           odeint::default_operations>>;

    controlled_type ctrl;

    explicit OdeState(double tol)
        : ctrl(odeint::make_controlled<error_stepper>(tol, tol)) {}
};

TrajectoryEvolver::TrajectoryEvolver(const StateVector& psi0,
                                     const TrajectoryConfig& config,
                                     TrajectoryRng& rng)
    : dims_(psi0.dims), config_(config), rng_(&rng),
      ode_(std::make_unique<OdeState>(config.ode_tol)) {
    config_.validate();
    const double n2 = psi0.amps.squaredNorm();
    if (std::abs(n2 - 1.0) > 1e-8)
        throw NormalizationError("trajectory must start from a unit state");
    x_.resize(2 * static_cast<std::size_t>(psi0.amps.size()));
    Eigen::Map<Eigen::VectorXcd>(reinterpret_cast<Complex*>(x_.data()),
                                 psi0.amps.size()) = psi0.amps;
    norm2_ = n2;
    threshold_ = rng_->uniform_positive();
    dt_try_ = std::min(config_.dt_max, 1e-3);
}

TrajectoryEvolver::~TrajectoryEvolver() = default;
TrajectoryEvolver::TrajectoryEvolver(TrajectoryEvolver&&) noexcept = default;
TrajectoryEvolver& TrajectoryEvolver::operator=(TrajectoryEvolver&&) noexcept =
    default;

void TrajectoryEvolver::set_generators(const SparseOperator& h_eff,
                                       const std::vector<SparseOperator>& jumps) {
    if (h_eff.rows() != static_cast<Index>(x_.size() / 2))
        throw BoundsError("generator dimension does not match the state");
    drift_ = Complex(0.0, -1.0) * h_eff;
    drift_.makeCompressed();
    jumps_ = &jumps;
    generators_set_ = true;
}

double TrajectoryEvolver::refresh_norm() {
    norm2_ = squared_norm_of(x_);
    return norm2_;
}

void TrajectoryEvolver::integrate_plain(std::vector<double>& x, double& t,
                                        double t_end) {
    double dt_try = std::min(dt_try_, config_.dt_max);
    double norm2_prev = squared_norm_of(x);
    while (t_end - t > time_eps(t_end)) {
        double dt = std::min({dt_try, config_.dt_max, t_end - t});
        int attempts = 0;
        while (ode_->ctrl.try_step(DriftSystem{&drift_}, x, t, dt) ==
               odeint::fail) {
            if (dt < 1e-14 * std::max(1.0, std::abs(t)))
                throw IntegrationError("step size underflow");
            if (++attempts > 1000)
                throw IntegrationError("step control failed to converge");
        }
        dt_try = std::min(dt, config_.dt_max);
        const double n2 = squared_norm_of(x);
        if (n2 > norm2_prev * (1.0 + 10.0 * config_.ode_tol) + 1e-14)
            throw NonContractivityError("norm grew between jumps");
        norm2_prev = n2;
    }
    t = t_end;
}

void TrajectoryEvolver::advance_to(double t_target) {
    if (!generators_set_) throw IntegrationError("generators not set");
    if (t_target < t_ - time_eps(t_)) throw IntegrationError("cannot integrate backwards");

    while (t_target - t_ > time_eps(t_target)) {
        double dt = std::min({dt_try_, config_.dt_max, t_target - t_});
        x_prev_ = x_;
        const double t_prev = t_;
        const double norm2_prev = norm2_;

        int attempts = 0;
        while (ode_->ctrl.try_step(DriftSystem{&drift_}, x_, t_, dt) ==
               odeint::fail) {
            if (dt < 1e-14 * std::max(1.0, std::abs(t_)))
                throw IntegrationError("step size underflow");
            if (++attempts > 1000)
                throw IntegrationError("step control failed to converge");
        }
        dt_try_ = std::min(dt, config_.dt_max);

        refresh_norm();
        if (norm2_ > norm2_prev * (1.0 + 10.0 * config_.ode_tol) + 1e-14)
            throw NonContractivityError("norm grew between jumps");
        if (norm2_ <= threshold_) handle_jump(t_prev);
    }
    t_ = t_target;
}

void TrajectoryEvolver::handle_jump(double t_prev) {
    // Bracket [t_lo, t_hi]: norm^2 > threshold at t_lo, <= threshold at t_hi.
    double t_lo = t_prev;
    double t_hi = t_;
    std::vector<double> x_lo = x_prev_;
    std::vector<double> x_hi = x_;
    while (t_hi - t_lo > config_.jump_time_tol) {
        const double t_mid = 0.5 * (t_lo + t_hi);
        if (t_mid <= t_lo || t_mid >= t_hi) break;  // fp resolution exhausted
        std::vector<double> x_mid = x_lo;
        double tm = t_lo;
        integrate_plain(x_mid, tm, t_mid);
        if (squared_norm_of(x_mid) <= threshold_) {
            t_hi = t_mid;
            x_hi = std::move(x_mid);
        } else {
            t_lo = t_mid;
            x_lo = std::move(x_mid);
        }
    }

    const Index dim = static_cast<Index>(x_hi.size() / 2);
    Eigen::Map<const Eigen::VectorXcd> psi(
        reinterpret_cast<const Complex*>(x_hi.data()), dim);

    // Channel selection proportional to the loss weights <psi|L^dag L|psi>.
    const std::size_t n_channels = jumps_->size();
    std::vector<Eigen::VectorXcd> jumped(n_channels);
    std::vector<double> weight(n_channels);
    double total = 0.0;
    for (std::size_t j = 0; j < n_channels; ++j) {
        jumped[j] = (*jumps_)[j] * psi;
        weight[j] = jumped[j].squaredNorm();
        total += weight[j];
    }
    if (!(total > 0.0))
        throw IntegrationError("norm crossed threshold with no open loss channel");

    const double u = rng_->uniform() * total;
    std::size_t channel = 0;
    double cumulative = 0.0;
    for (; channel < n_channels; ++channel) {
        cumulative += weight[channel];
        if (u < cumulative) break;
    }
    if (channel == n_channels) channel = n_channels - 1;  // u == total roundoff

    Eigen::Map<Eigen::VectorXcd>(reinterpret_cast<Complex*>(x_.data()), dim) =
        jumped[channel] / std::sqrt(weight[channel]);
    t_ = t_hi;
    norm2_ = 1.0;
    jump_record_.push_back({t_hi, static_cast<int>(channel)});
    threshold_ = rng_->uniform_positive();
}

StateVector TrajectoryEvolver::sampled_state() const {
    const Index dim = static_cast<Index>(x_.size() / 2);
    StateVector psi{Eigen::Map<const Eigen::VectorXcd>(
                        reinterpret_cast<const Complex*>(x_.data()), dim),
                    dims_};
    psi.normalize();
    return psi;
}

TrajectoryResult evolve_trajectory(const StateVector& psi0,
                                   const SparseOperator& h_eff,
                                   const std::vector<SparseOperator>& jumps,
                                   const TrajectoryConfig& config,
                                   TrajectoryRng& rng) {
    TrajectoryEvolver evolver(psi0, config, rng);
    evolver.set_generators(h_eff, jumps);
    TrajectoryResult result;
    result.states.reserve(config.sample_times.size());
    for (double t : config.sample_times) {
        evolver.advance_to(t);
        result.states.push_back(evolver.sampled_state());
    }
    result.jumps = evolver.jump_record();
    return result;
}

}  // namespace subrecoil
