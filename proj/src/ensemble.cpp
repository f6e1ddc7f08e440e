#include "subrecoil/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include "subrecoil/initial_state.hpp"

namespace subrecoil {

namespace {

// Packed per-sample row layout: scalars, then the marginal, then the joint
// matrix (flattened in storage order), then the optional residual. The
// moment and temperature blocks sit at fixed offsets so their covariances
// can be accumulated.
struct RowLayout {
    int span;
    bool with_residual;

    static constexpr int kMomentOffset = 8;  // p1 p2 p1p1 p2p2 p1p2
    static constexpr int kTempOffset = 13;   // p0, pooled p2

    int marginal_offset() const { return 15; }
    int joint_offset() const { return 15 + span; }
    int residual_offset() const { return 15 + span + span * span; }
    int size() const { return 15 + span + span * span + (with_residual ? 1 : 0); }

    Eigen::VectorXd pack(const ObservableRecord& rec, double residual) const {
        Eigen::VectorXd row(size());
        row[0] = rec.e_kin;
        row[1] = rec.p_ground;
        row[2] = rec.bunching;
        row[3] = rec.n_photons_c;
        row[4] = rec.n_photons_s;
        row[5] = rec.parity_fracs[0];
        row[6] = rec.parity_fracs[1];
        row[7] = rec.parity_fracs[2];
        row[kMomentOffset + 0] = rec.moments.p1;
        row[kMomentOffset + 1] = rec.moments.p2;
        row[kMomentOffset + 2] = rec.moments.p1p1;
        row[kMomentOffset + 3] = rec.moments.p2p2;
        row[kMomentOffset + 4] = rec.moments.p1p2;
        const int n_max = span / 2;
        row[kTempOffset] = rec.p_single[n_max];
        row[kTempOffset + 1] =
            n_max >= 2 ? rec.p_single[n_max - 2] + rec.p_single[n_max + 2] : 0.0;
        row.segment(marginal_offset(), span) = rec.p_single;
        row.segment(joint_offset(), span * span) =
            Eigen::Map<const Eigen::VectorXd>(rec.p_joint.data(),
                                              span * span);
        if (with_residual) row[residual_offset()] = residual;
        return row;
    }

    ObservableRecord unpack(const Eigen::VectorXd& row) const {
        ObservableRecord rec;
        rec.e_kin = row[0];
        rec.p_ground = row[1];
        rec.bunching = row[2];
        rec.n_photons_c = row[3];
        rec.n_photons_s = row[4];
        rec.parity_fracs = {row[5], row[6], row[7]};
        rec.moments.p1 = row[kMomentOffset + 0];
        rec.moments.p2 = row[kMomentOffset + 1];
        rec.moments.p1p1 = row[kMomentOffset + 2];
        rec.moments.p2p2 = row[kMomentOffset + 3];
        rec.moments.p1p2 = row[kMomentOffset + 4];
        rec.p_single = row.segment(marginal_offset(), span);
        rec.p_joint = Eigen::Map<const Eigen::MatrixXd>(
            row.segment(joint_offset(), span * span).data(), span, span);
        return rec;
    }
};

struct WelfordVec {
    long long n = 0;
    Eigen::VectorXd mean, m2;

    void init(int k) {
        mean = Eigen::VectorXd::Zero(k);
        m2 = Eigen::VectorXd::Zero(k);
    }
    void add(const Eigen::VectorXd& x) {
        ++n;
        const Eigen::VectorXd d = x - mean;
        mean += d / static_cast<double>(n);
        m2.array() += d.array() * (x - mean).array();
    }
    Eigen::VectorXd sem() const {
        if (n < 2) return Eigen::VectorXd::Zero(mean.size());
        return (m2 / (static_cast<double>(n - 1) * n)).cwiseMax(0.0).cwiseSqrt();
    }
};

struct WelfordCov {
    long long n = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd c;

    void init(int k) {
        mean = Eigen::VectorXd::Zero(k);
        c = Eigen::MatrixXd::Zero(k, k);
    }
    void add(const Eigen::VectorXd& x) {
        ++n;
        const Eigen::VectorXd d_old = x - mean;
        mean += d_old / static_cast<double>(n);
        c.noalias() += d_old * (x - mean).transpose();
    }
    // Covariance of the sample mean, symmetrized against update-order skew.
    Eigen::MatrixXd cov_of_mean() const {
        if (n < 2) return Eigen::MatrixXd::Zero(mean.size(), mean.size());
        const Eigen::MatrixXd cov = c / (static_cast<double>(n - 1) * n);
        return 0.5 * (cov + cov.transpose());
    }
};

// Standard error of f(mean) by linearization: sqrt(g' Cov(mean) g) with a
// central-difference gradient. Undefined f anywhere near the mean yields
// nullopt.
template <typename F>
std::optional<double> delta_se(F f, const Eigen::VectorXd& m,
                               const Eigen::MatrixXd& cov_mean) {
    const Index k = m.size();
    Eigen::VectorXd g(k);
    for (Index i = 0; i < k; ++i) {
        const double h = std::max(1e-9, 1e-6 * std::abs(m[i]));
        Eigen::VectorXd hi = m, lo = m;
        hi[i] += h;
        lo[i] -= h;
        const std::optional<double> fh = f(hi);
        const std::optional<double> fl = f(lo);
        if (!fh || !fl) return std::nullopt;
        g[i] = (*fh - *fl) / (2.0 * h);
    }
    const double var = g.dot(cov_mean * g);
    return std::sqrt(std::max(0.0, var));
}

std::optional<double> correlation_at(const Eigen::VectorXd& v) {
    MomentumMoments m;
    m.p1 = v[0];
    m.p2 = v[1];
    m.p1p1 = v[2];
    m.p2p2 = v[3];
    m.p1p2 = v[4];
    return correlation_from_moments(m);
}

std::optional<double> temperature_at(const Eigen::VectorXd& v) {
    if (!(v[0] > 0.0)) return std::nullopt;
    return effective_temperature(v[0], v[1]);
}

double top_fock_population(const StateVector& psi) {
    const HilbertDims& d = psi.dims;
    double top = 0.0;
    for (Index i = 0; i < psi.amps.size(); ++i) {
        const double w = std::norm(psi.amps[i]);
        if (w == 0.0) continue;
        const BasisIndex s = unflatten(i, d);
        if ((d.q_c >= 2 && s.k_c == d.q_c - 1) || s.k_s == d.q_s - 1) top += w;
    }
    return top;
}

struct TrajOutput {
    std::vector<Eigen::VectorXd> rows;
    double parity_drift = 0.0;
    double parity_leak = 0.0;
    double boundary_pop = 0.0;
    double top_fock_pop = 0.0;
    long long jumps = 0;
};

void dump_trajectory(const std::string& dir, int index, const EnsembleSpec& spec,
                     const std::vector<double>& times,
                     const std::vector<Eigen::VectorXcd>& states) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path path = fs::path(dir) / ("trajectory_" + std::to_string(index) + ".tsv");
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw EnsembleError("cannot open dump file " + path.string());
    const HilbertDims& d = spec.dims;
    std::fprintf(f, "# n_max=%d q_c=%d q_s=%d geometry=%s\n", d.n_max, d.q_c,
                 d.q_s, d.geometry == Geometry::Ring ? "ring" : "linear");
    std::fprintf(f, "# u0=%.17g kappa=%.17g\n", spec.params.u0, spec.params.kappa);
    std::fprintf(f, "# base_seed=%llu trajectory=%d\n",
                 static_cast<unsigned long long>(spec.base_seed), index);
    std::fprintf(f, "# rows: t then re,im pairs of the renormalized state\n");
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::fprintf(f, "%.17g", times[k]);
        const Eigen::VectorXcd& v = states[k];
        for (Index i = 0; i < v.size(); ++i)
            std::fprintf(f, "\t%.17g\t%.17g", v[i].real(), v[i].imag());
        std::fputc('\n', f);
    }
    std::fclose(f);
}

}  // namespace

void EnsembleSpec::validate() const {
    dims.validate();
    protocol.validate();
    if (protocol.geometry != dims.geometry)
        throw ConfigError("protocol geometry does not match dims");
    if (even_only && protocol.sym == ExchangeSymmetry::Fermion)
        throw ConfigError("even-only support requires bosons");
    if (n_traj < 1) throw ConfigError("n_traj >= 1 violated");
    if (threads < 1) throw ConfigError("threads >= 1 violated");
    if (!(sample_dt > 0.0)) throw ConfigError("sample_dt > 0 violated");
    if (!(dt_max > 0.0)) throw ConfigError("dt_max > 0 violated");
    if (!(ode_tol > 0.0)) throw ConfigError("ode_tol > 0 violated");
    if (!(jump_time_tol > 0.0)) throw ConfigError("jump_time_tol > 0 violated");
    if (residual_target_n < 0) throw ConfigError("residual_target_n >= 0 violated");
    if (!(sigma_n > 0.0)) throw ConfigError("sigma_n > 0 violated");
}

std::vector<double> sample_grid(const ProtocolSpec& protocol, double sample_dt) {
    if (!(sample_dt > 0.0)) throw ConfigError("sample_dt > 0 violated");
    const double total = protocol.total_duration();
    std::vector<double> grid;
    for (long long k = 0;; ++k) {
        const double t = static_cast<double>(k) * sample_dt;
        if (t > total + 1e-9) break;
        grid.push_back(std::min(t, total));
    }
    if (grid.back() < total - 1e-9) grid.push_back(total);
    return grid;
}

EnsembleResult run_ensemble(const EnsembleSpec& spec) {
    spec.validate();

    const std::vector<SparseOperator> jumps =
        build_jump_operators(spec.params, spec.dims);
    std::vector<SparseOperator> stage_h_eff;
    stage_h_eff.reserve(spec.protocol.stages.size());
    for (const StageSpec& stage : spec.protocol.stages) {
        const SparseOperator h = build_hamiltonian(
            spec.params, DriveParams{stage.eta, stage.delta_c}, spec.dims);
        stage_h_eff.push_back(effective_hamiltonian(h, jumps));
    }

    std::vector<double> stage_end(spec.protocol.stages.size());
    double cumulative = 0.0;
    for (std::size_t s = 0; s < spec.protocol.stages.size(); ++s) {
        cumulative += spec.protocol.stages[s].duration;
        stage_end[s] = cumulative;
    }

    const std::vector<double> grid = sample_grid(spec.protocol, spec.sample_dt);
    const int n_times = static_cast<int>(grid.size());
    const int span = spec.dims.n_span();
    const RowLayout layout{span, spec.residual_target_n > 0};

    TrajectoryConfig traj_config;
    traj_config.dt_max = spec.dt_max;
    traj_config.ode_tol = spec.ode_tol;
    traj_config.jump_time_tol = spec.jump_time_tol;
    traj_config.sample_times = grid;

    const auto run_one = [&](int index) {
        TrajectoryRng rng(spec.base_seed, static_cast<std::uint64_t>(index));
        StateVector psi0 =
            spec.initial == InitialStateKind::RandomPhasePackets
                ? initial_state(spec.protocol.sym, spec.sigma_n, spec.dims, rng,
                                spec.even_only)
                : reflection_odd_dark_state(spec.dims);
        TrajectoryEvolver evolver(psi0, traj_config, rng);
        std::size_t sidx = 0;
        evolver.set_generators(stage_h_eff[0], jumps);

        TrajOutput out;
        out.rows.reserve(n_times);
        std::vector<Eigen::VectorXcd> dump_states;
        std::array<double, 3> parity0{};
        std::array<bool, 3> empty0{};
        for (int k = 0; k < n_times; ++k) {
            const double t = grid[k];
            while (sidx + 1 < stage_end.size() && t > stage_end[sidx] + 1e-9) {
                evolver.advance_to(stage_end[sidx]);
                ++sidx;
                evolver.set_generators(stage_h_eff[sidx], jumps);
            }
            evolver.advance_to(t);
            const StateVector psi = evolver.sampled_state();
            const ObservableRecord rec = observe(psi, spec.protocol.sym);

            if (k == 0) {
                parity0 = rec.parity_fracs;
                for (int c = 0; c < 3; ++c) empty0[c] = parity0[c] < 1e-12;
            }
            double leak = 0.0;
            for (int c = 0; c < 3; ++c) {
                out.parity_drift = std::max(
                    out.parity_drift, std::abs(rec.parity_fracs[c] - parity0[c]));
                if (empty0[c]) leak += rec.parity_fracs[c];
            }
            out.parity_leak = std::max(out.parity_leak, leak);
            out.boundary_pop = std::max(
                out.boundary_pop, rec.p_single[0] + rec.p_single[span - 1]);
            out.top_fock_pop = std::max(out.top_fock_pop, top_fock_population(psi));

            double residual = 0.0;
            if (spec.residual_target_n > 0)
                residual = residual_population(rec.p_single, spec.residual_target_n);
            out.rows.push_back(layout.pack(rec, residual));
            if (!spec.dump_dir.empty()) dump_states.push_back(psi.amps);
        }
        out.jumps = static_cast<long long>(evolver.jump_record().size());
        if (!spec.dump_dir.empty())
            dump_trajectory(spec.dump_dir, index, spec, grid, dump_states);
        return out;
    };

    std::vector<WelfordVec> acc(n_times);
    std::vector<WelfordCov> cov_moments(n_times), cov_temps(n_times);
    for (int k = 0; k < n_times; ++k) {
        acc[k].init(layout.size());
        cov_moments[k].init(5);
        cov_temps[k].init(2);
    }
    EnsembleResult result;
    result.times = grid;
    result.n_traj = spec.n_traj;
    result.base_seed = spec.base_seed;

    const auto commit = [&](const TrajOutput& out) {
        for (int k = 0; k < n_times; ++k) {
            acc[k].add(out.rows[k]);
            cov_moments[k].add(out.rows[k].segment(RowLayout::kMomentOffset, 5));
            cov_temps[k].add(out.rows[k].segment(RowLayout::kTempOffset, 2));
        }
        result.max_parity_drift = std::max(result.max_parity_drift, out.parity_drift);
        result.max_parity_leak = std::max(result.max_parity_leak, out.parity_leak);
        result.max_boundary_pop = std::max(result.max_boundary_pop, out.boundary_pop);
        result.max_top_fock_pop = std::max(result.max_top_fock_pop, out.top_fock_pop);
        result.total_jumps += out.jumps;
    };

    const int threads = std::min(spec.threads, spec.n_traj);
    if (threads <= 1) {
        for (int i = 0; i < spec.n_traj; ++i) commit(run_one(i));
    } else {
        std::mutex mu;
        std::condition_variable cv;
        std::map<int, TrajOutput> pending;
        int next_dispatch = 0;
        int next_commit = 0;
        const int window = 2 * threads;
        std::string error_message;
        bool failed = false;

        const auto worker = [&]() {
            while (true) {
                int index;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (failed || next_dispatch >= spec.n_traj) return;
                    index = next_dispatch++;
                }
                try {
                    TrajOutput out = run_one(index);
                    std::unique_lock<std::mutex> lock(mu);
                    cv.wait(lock, [&] {
                        return failed || index <= next_commit + window;
                    });
                    if (failed) return;
                    pending.emplace(index, std::move(out));
                    while (!pending.empty() &&
                           pending.begin()->first == next_commit) {
                        commit(pending.begin()->second);
                        pending.erase(pending.begin());
                        ++next_commit;
                    }
                    cv.notify_all();
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!failed) {
                        failed = true;
                        error_message = e.what();
                    }
                    cv.notify_all();
                    return;
                }
            }
        };

        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (failed) throw EnsembleError("trajectory failed: " + error_message);
    }

    result.mean.resize(n_times);
    result.sem.resize(n_times);
    if (layout.with_residual) {
        result.residual_mean.resize(n_times);
        result.residual_se.resize(n_times);
    }
    for (int k = 0; k < n_times; ++k) {
        const Eigen::VectorXd mean = acc[k].mean;
        const Eigen::VectorXd sem = acc[k].sem();
        result.mean[k] = layout.unpack(mean);
        result.sem[k] = layout.unpack(sem);

        result.mean[k].c_p = correlation_at(mean.segment(RowLayout::kMomentOffset, 5));
        result.mean[k].t_eff = temperature_at(mean.segment(RowLayout::kTempOffset, 2));
        result.sem[k].c_p =
            result.mean[k].c_p
                ? delta_se(correlation_at, mean.segment(RowLayout::kMomentOffset, 5),
                           cov_moments[k].cov_of_mean())
                : std::nullopt;
        result.sem[k].t_eff =
            result.mean[k].t_eff
                ? delta_se(temperature_at, mean.segment(RowLayout::kTempOffset, 2),
                           cov_temps[k].cov_of_mean())
                : std::nullopt;

        if (layout.with_residual) {
            result.residual_mean[k] = mean[layout.residual_offset()];
            result.residual_se[k] = sem[layout.residual_offset()];
        }
    }
    result.boundary_flag = result.max_boundary_pop >= 1e-3;
    result.fock_flag = result.max_top_fock_pop >= 1e-3;
    return result;
}

double select_optimal_detuning(const std::vector<double>& grid,
                               const std::vector<double>& objective) {
    if (grid.empty() || grid.size() != objective.size())
        throw BoundsError("grid and objective sizes must match");
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (objective[i] < objective[best] ||
            (objective[i] == objective[best] &&
             std::abs(grid[i]) < std::abs(grid[best])))
            best = i;
    }
    return grid[best];
}

ScanResult scan_detunings(const ScanSpec& scan, const EnsembleSpec& base) {
    scan.validate();
    ScanResult result;
    result.grid = scan.grid;
    for (double delta_c : scan.grid) {
        EnsembleSpec spec = base;
        StageSpec stage = scan.stage;
        stage.delta_c = delta_c;
        spec.protocol.stages = {stage};
        spec.n_traj = scan.n_traj;
        spec.residual_target_n = stage.target_n;
        spec.dump_dir.clear();
        const EnsembleResult ens = run_ensemble(spec);
        result.residual.push_back(ens.residual_mean.back());
        result.residual_se.push_back(ens.residual_se.back());
    }
    result.optimal_delta_c = select_optimal_detuning(result.grid, result.residual);
    return result;
}

}  // namespace subrecoil
