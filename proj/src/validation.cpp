#include "subrecoil/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subrecoil/initial_state.hpp"

namespace subrecoil {

namespace {

void compare_one(OracleComparison& cmp, const std::string& name, double time,
                 std::optional<double> simulated, std::optional<double> reference,
                 double se, double z_limit, double atol) {
    ComparisonEntry e;
    e.name = name;
    e.time = time;
    e.simulated = simulated;
    e.reference = reference;
    e.se = se;
    if (simulated.has_value() != reference.has_value()) {
        e.z = std::numeric_limits<double>::infinity();
        e.pass = false;
    } else if (!simulated) {
        e.z = 0.0;
        e.pass = true;
    } else {
        const double diff = std::abs(*simulated - *reference);
        if (diff <= atol) {
            e.z = 0.0;
            e.pass = true;
        } else if (se > 0.0) {
            e.z = diff / se;
            e.pass = e.z <= z_limit;
        } else {
            e.z = std::numeric_limits<double>::infinity();
            e.pass = false;
        }
    }
    if (e.z > cmp.max_z || cmp.entries.empty()) {
        cmp.max_z = e.z;
        cmp.worst_name = name;
        cmp.worst_time = time;
    }
    cmp.pass = cmp.pass && e.pass;
    cmp.entries.push_back(std::move(e));
}

}  // namespace

OracleComparison compare_records(const EnsembleResult& ensemble,
                                 const std::vector<ObservableRecord>& reference,
                                 double z_limit, double atol) {
    if (ensemble.mean.size() != reference.size())
        throw BoundsError("record series lengths differ");
    OracleComparison cmp;
    for (std::size_t k = 0; k < reference.size(); ++k) {
        const double t = ensemble.times[k];
        const ObservableRecord& m = ensemble.mean[k];
        const ObservableRecord& s = ensemble.sem[k];
        const ObservableRecord& o = reference[k];

        compare_one(cmp, "e_kin", t, m.e_kin, o.e_kin, s.e_kin, z_limit, atol);
        compare_one(cmp, "p_ground", t, m.p_ground, o.p_ground, s.p_ground,
                    z_limit, atol);
        compare_one(cmp, "bunching", t, m.bunching, o.bunching, s.bunching,
                    z_limit, atol);
        compare_one(cmp, "n_photons_c", t, m.n_photons_c, o.n_photons_c,
                    s.n_photons_c, z_limit, atol);
        compare_one(cmp, "n_photons_s", t, m.n_photons_s, o.n_photons_s,
                    s.n_photons_s, z_limit, atol);
        static const char* parity_names[3] = {"parity_even_even",
                                              "parity_odd_odd", "parity_mixed"};
        for (int c = 0; c < 3; ++c)
            compare_one(cmp, parity_names[c], t, m.parity_fracs[c],
                        o.parity_fracs[c], s.parity_fracs[c], z_limit, atol);

        const int span = static_cast<int>(m.p_single.size());
        const int n_max = span / 2;
        for (int i = 0; i < span; ++i)
            compare_one(cmp, "P(" + std::to_string(i - n_max) + ")", t,
                        m.p_single[i], o.p_single[i], s.p_single[i], z_limit,
                        atol);
        for (int i = 0; i < span; ++i)
            for (int j = 0; j < span; ++j)
                compare_one(cmp,
                            "P(" + std::to_string(i - n_max) + "," +
                                std::to_string(j - n_max) + ")",
                            t, m.p_joint(i, j), o.p_joint(i, j), s.p_joint(i, j),
                            z_limit, atol);

        compare_one(cmp, "c_p", t, m.c_p, o.c_p,
                    s.c_p.value_or(0.0), z_limit, atol);
        compare_one(cmp, "t_eff", t, m.t_eff, o.t_eff,
                    s.t_eff.value_or(0.0), z_limit, atol);
    }
    return cmp;
}

std::vector<ObservableRecord> oracle_records(const EnsembleSpec& spec) {
    spec.validate();
    Eigen::MatrixXcd rho;
    if (spec.initial == InitialStateKind::RandomPhasePackets) {
        rho = phase_averaged_density(spec.protocol.sym, spec.sigma_n, spec.dims,
                                     spec.even_only);
    } else {
        const StateVector dark = reflection_odd_dark_state(spec.dims);
        rho = dark.amps * dark.amps.adjoint();
    }

    const std::vector<SparseOperator> jumps =
        build_jump_operators(spec.params, spec.dims);
    const std::vector<double> grid = sample_grid(spec.protocol, spec.sample_dt);

    std::vector<SparseOperator> stage_h;
    std::vector<double> stage_end;
    double cumulative = 0.0;
    for (const StageSpec& stage : spec.protocol.stages) {
        stage_h.push_back(build_hamiltonian(
            spec.params, DriveParams{stage.eta, stage.delta_c}, spec.dims));
        cumulative += stage.duration;
        stage_end.push_back(cumulative);
    }

    // Walk the grid exactly as the stochastic path does: the segment up to a
    // stage boundary uses that stage's generator, and a sample sitting on
    // the boundary is taken before the switch (the density is continuous
    // across it, so the record is identical either way).
    double t_now = 0.0;
    std::size_t sidx = 0;
    const auto integrate_to = [&](double t_target) {
        if (t_target - t_now <= 1e-12) return;
        auto rhos = integrate_master_equation(rho, stage_h[sidx], jumps,
                                              {t_target - t_now}, spec.ode_tol);
        rho = std::move(rhos.back());
        t_now = t_target;
    };

    std::vector<ObservableRecord> records;
    records.reserve(grid.size());
    for (double t : grid) {
        while (sidx + 1 < stage_end.size() && t > stage_end[sidx] + 1e-9) {
            integrate_to(stage_end[sidx]);
            ++sidx;
        }
        integrate_to(t);
        records.push_back(observe_density(rho, spec.dims, spec.protocol.sym));
    }
    return records;
}

double ks_statistic_exponential(std::vector<double> samples, double rate) {
    if (samples.empty()) throw DomainError("KS requires at least one sample");
    if (!(rate > 0.0)) throw DomainError("rate > 0 violated");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i] < 0.0) throw DomainError("waiting times must be >= 0");
        const double cdf = 1.0 - std::exp(-rate * samples[i]);
        d = std::max(d, cdf - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - cdf);
    }
    return d;
}

double ks_asymptotic_p_value(double statistic, std::size_t n) {
    if (n == 0) throw DomainError("empty sample");
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
    if (lambda <= 0.0) return 1.0;
    double p = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) *
                            std::exp(-2.0 * j * j * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace subrecoil
