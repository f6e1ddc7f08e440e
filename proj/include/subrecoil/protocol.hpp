#pragma once

#include <cmath>
#include <vector>

#include "subrecoil/hilbert.hpp"

namespace subrecoil {

// One pulse of the cooling sequence: fixed detuning and pump strength held
// for `duration`, chosen to make the |p| = target_n hbar k -> |p| - 2 hbar k
// two-photon transfer resonant.
struct StageSpec {
    double delta_c = -6.5;
    double eta = 0.5;
    double duration = 0.0;  // omega_R^-1; zero-duration stages are legal
    int target_n = 2;

    void validate() const {
        if (!std::isfinite(delta_c)) throw ConfigError("delta_c must be finite");
        if (!std::isfinite(eta)) throw ConfigError("eta must be finite");
        if (!(duration >= 0.0)) throw ConfigError("duration >= 0 violated");
        if (target_n < 2) throw ConfigError("target_n >= 2 violated");
    }

    bool operator==(const StageSpec&) const = default;
};

// Stages run back-to-back with instantaneous parameter switches; the state
// and the intracavity field carry over between stages.
struct ProtocolSpec {
    std::vector<StageSpec> stages;
    ExchangeSymmetry sym = ExchangeSymmetry::Boson;
    Geometry geometry = Geometry::Ring;

    void validate() const {
        if (stages.empty()) throw ConfigError("protocol needs at least one stage");
        for (const auto& s : stages) s.validate();
    }

    double total_duration() const {
        double t = 0.0;
        for (const auto& s : stages) t += s.duration;
        return t;
    }
};

// Detuning grid scanned with one stage template, optimizing the residual
// population above the stage target.
struct ScanSpec {
    StageSpec stage;
    std::vector<double> grid;  // sorted delta_c values
    int n_traj = 100;

    void validate() const {
        stage.validate();
        if (grid.empty()) throw ConfigError("scan grid must be non-empty");
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1]))
                throw ConfigError("scan grid must be strictly increasing");
        if (n_traj < 1) throw ConfigError("n_traj >= 1 violated");
    }

    bool operator==(const ScanSpec&) const = default;
};

// Resonance condition for depleting |p| = target_k hbar k: the pump must be
// detuned by the particle-shifted cavity resonance plus the kinetic energy
// released by a two-recoil kick,
//   delta_c = n_particles * u0 * bunching + 4 (1 - target_k)   [omega_R].
double predict_detuning(int target_k, int n_particles, double u0, double bunching);

// Fraction of a normalized single-particle distribution (indexed n + n_max)
// at |n| >= target_n. NormalizationError if the weights do not sum to 1
// within 1e-6.
double residual_population(const Eigen::VectorXd& dist, int target_n);

}  // namespace subrecoil
