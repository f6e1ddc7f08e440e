#pragma once

#include <cstdint>
#include <random>

namespace subrecoil {

// splitmix64 finalizer: decorrelates consecutive (seed + index) values before
// they seed the per-trajectory engines.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic per-trajectory random stream. Each trajectory owns an
// independent engine keyed by (base_seed, trajectory_index), so results do
// not depend on scheduling or thread count. Draw order within a trajectory
// is part of the reproducibility contract: initial-state phases first, then
// the jump threshold / channel pairs in event order.
class TrajectoryRng {
  public:
    TrajectoryRng(std::uint64_t base_seed, std::uint64_t trajectory_index)
        : engine_(splitmix64(base_seed + 0x632be59bd9b4e019ULL * trajectory_index)) {}

    // Uniform on [0, 1) from the top 53 bits; bit-exact across platforms.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1): rejects exact zeros so jump thresholds and
    // logarithms stay finite.
    double uniform_positive() {
        double u = uniform();
        while (u == 0.0) u = uniform();
        return u;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace subrecoil
