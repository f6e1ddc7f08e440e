#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subrecoil/cavity.hpp"
#include "subrecoil/observables.hpp"
#include "subrecoil/protocol.hpp"
#include "subrecoil/trajectory.hpp"

namespace subrecoil {

enum class InitialStateKind { RandomPhasePackets, ReflectionOddDark };

struct EnsembleSpec {
    HilbertDims dims;
    PhysicalParams params;
    ProtocolSpec protocol;
    double sigma_n = 2.0;
    InitialStateKind initial = InitialStateKind::RandomPhasePackets;
    bool even_only = false;  // packets restricted to even momenta (bosons)
    int n_traj = 100;
    std::uint64_t base_seed = 1;
    int threads = 1;  // parallelism hint; the result is independent of it
    double sample_dt = 1.0;
    double dt_max = 0.1;
    double ode_tol = 1e-8;
    double jump_time_tol = 1e-6;
    int residual_target_n = 0;  // > 0: track residual population per sample
    std::string dump_dir;       // non-empty: raw per-trajectory state dumps

    void validate() const;
};

// Ensemble mean and standard error of every record entry on the shared
// sample grid. Entries linear in the density matrix are plain trajectory
// averages; the correlation coefficient and effective temperature are
// recombined from mean moments, with errors propagated through the moment
// covariances (their trajectory-wise averages would estimate a different
// quantity). Diagnostics hold worst-case values over all trajectories and
// sample times.
struct EnsembleResult {
    std::vector<double> times;
    std::vector<ObservableRecord> mean;
    std::vector<ObservableRecord> sem;
    std::vector<double> residual_mean;  // filled when residual_target_n > 0
    std::vector<double> residual_se;

    double max_parity_drift = 0.0;   // vs. the t = 0 parity split
    double max_parity_leak = 0.0;    // weight in sectors unoccupied at t = 0
    double max_boundary_pop = 0.0;   // marginal weight at |n| = n_max
    double max_top_fock_pop = 0.0;   // weight on the highest photon level
    bool boundary_flag = false;      // max_boundary_pop >= 1e-3
    bool fock_flag = false;          // max_top_fock_pop >= 1e-3
    long long total_jumps = 0;
    int n_traj = 0;
    std::uint64_t base_seed = 0;
};

// Global sample grid: multiples of sample_dt from 0 through the protocol
// duration, end time always included.
std::vector<double> sample_grid(const ProtocolSpec& protocol, double sample_dt);

// Runs n_traj trajectories (trajectory i seeded from base_seed and i) and
// reduces them in index order, so the output is bitwise independent of the
// thread count. Any trajectory failure aborts with EnsembleError.
EnsembleResult run_ensemble(const EnsembleSpec& spec);

// Argmin of the objective over the grid; exact ties resolve to the smaller
// |delta_c|. Sizes must match.
double select_optimal_detuning(const std::vector<double>& grid,
                               const std::vector<double>& objective);

struct ScanResult {
    std::vector<double> grid;
    std::vector<double> residual;
    std::vector<double> residual_se;
    double optimal_delta_c = 0.0;
};

// One single-stage ensemble per grid point (same seeds across points, so
// the curve is smooth in the common-random-numbers sense); objective is the
// residual population above the stage target at the stage end.
ScanResult scan_detunings(const ScanSpec& scan, const EnsembleSpec& base);

}  // namespace subrecoil
