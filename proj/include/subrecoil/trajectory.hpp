#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "subrecoil/cavity.hpp"
#include "subrecoil/rng.hpp"

namespace subrecoil {

struct TrajectoryConfig {
    double dt_max = 0.1;         // step cap, omega_R^-1
    double ode_tol = 1e-8;       // local error tolerance (rel and abs)
    double jump_time_tol = 1e-6; // bisection window for jump times
    std::vector<double> sample_times;  // strictly ascending

    void validate() const {
        if (!(dt_max > 0.0)) throw ConfigError("dt_max > 0 violated");
        if (!(ode_tol > 0.0)) throw ConfigError("ode_tol > 0 violated");
        if (!(jump_time_tol > 0.0)) throw ConfigError("jump_time_tol > 0 violated");
        for (std::size_t i = 1; i < sample_times.size(); ++i)
            if (!(sample_times[i] > sample_times[i - 1]))
                throw ConfigError("sample_times must be strictly increasing");
    }
};

struct JumpEvent {
    double time;
    int channel;  // index into the jump-operator list
};
using JumpRecord = std::vector<JumpEvent>;

// Stochastic wave-function propagator with norm-threshold jumps, resumable
// across parameter switches: the decay threshold, jump log, and unnormalized
// state survive set_generators, so a protocol stage boundary is not a
// measurement. All randomness comes from the owned rng in a fixed order.
//
// Between jumps the state follows dpsi/dt = -i H_eff psi; the squared norm
// decays monotonically (NonContractivityError otherwise). When it crosses
// the threshold r drawn uniformly in (0,1), the crossing time is bisected to
// jump_time_tol, a channel is selected with probability proportional to
// ||L_j psi||^2, L_j is applied, the state renormalized, and r redrawn.
class TrajectoryEvolver {
  public:
    TrajectoryEvolver(const StateVector& psi0, const TrajectoryConfig& config,
                      TrajectoryRng& rng);
    ~TrajectoryEvolver();
    TrajectoryEvolver(TrajectoryEvolver&&) noexcept;
    TrajectoryEvolver& operator=(TrajectoryEvolver&&) noexcept;

    // Swap in the generators for the next protocol stage. h_eff and jumps
    // must outlive the evolver.
    void set_generators(const SparseOperator& h_eff,
                        const std::vector<SparseOperator>& jumps);

    // Integrate from the current time to t_target (>= current time),
    // applying any jumps encountered on the way.
    void advance_to(double t_target);

    double time() const { return t_; }
    const JumpRecord& jump_record() const { return jump_record_; }
    double squared_norm() const { return norm2_; }

    // Renormalized snapshot for observables; the internal state stays decayed.
    StateVector sampled_state() const;

  private:
    struct OdeState;  // adaptive stepper scratch, hidden from the header

    void integrate_plain(std::vector<double>& x, double& t, double t_end);
    void handle_jump(double t_prev);
    double refresh_norm();

    SparseOperator drift_;  // M = -i H_eff
    bool generators_set_ = false;
    const std::vector<SparseOperator>* jumps_ = nullptr;
    HilbertDims dims_;
    TrajectoryConfig config_;
    TrajectoryRng* rng_;
    std::unique_ptr<OdeState> ode_;

    std::vector<double> x_;       // interleaved re/im amplitudes
    std::vector<double> x_prev_;  // pre-step copy for jump bracketing
    double t_ = 0.0;
    double norm2_ = 1.0;
    double threshold_ = 0.5;
    double dt_try_;
    JumpRecord jump_record_;
};

// One-shot convenience: evolve from t = 0 through config.sample_times and
// return renormalized snapshots plus the jump log.
struct TrajectoryResult {
    std::vector<StateVector> states;
    JumpRecord jumps;
};
TrajectoryResult evolve_trajectory(const StateVector& psi0,
                                   const SparseOperator& h_eff,
                                   const std::vector<SparseOperator>& jumps,
                                   const TrajectoryConfig& config,
                                   TrajectoryRng& rng);

}  // namespace subrecoil
