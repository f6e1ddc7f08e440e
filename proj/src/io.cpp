#include "subrecoil/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

namespace subrecoil {

namespace {

using nlohmann::json;

class TsvFile {
  public:
    explicit TsvFile(const std::string& path)
        : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw Error("cannot open output file: " + path);
    }

    void comment(const std::string& text) { out_ << "# " << text << "\n"; }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << '\t';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    void close() {
        out_.flush();
        if (!out_) throw Error("short write on output file: " + path_);
        out_.close();
    }

  private:
    std::string path_;
    std::ofstream out_;
};

std::string identity_line(const OutputContext& ctx) {
    return "config_hash=" + ctx.config_hash +
           " base_seed=" + std::to_string(ctx.base_seed);
}

json opt_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

// The marginal is indexed n + n_max; recover n_max from its length.
int n_max_of(const EnsembleResult& r) {
    return r.mean.empty()
               ? 0
               : static_cast<int>((r.mean.front().p_single.size() - 1) / 2);
}

}  // namespace

std::string format_cell(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf);
}

std::string format_cell(const std::optional<double>& value) {
    return value ? format_cell(*value) : std::string("NA");
}

void write_energy_table(const EnsembleResult& result, const OutputContext& ctx,
                        const std::string& path) {
    const bool residual = !result.residual_mean.empty();
    TsvFile f(path);
    f.comment(identity_line(ctx));
    std::vector<std::string> header = {
        "t",
        "e_kin", "e_kin_se",
        "p_ground", "p_ground_se",
        "bunching", "bunching_se",
        "n_photons_c", "n_photons_c_se",
        "n_photons_s", "n_photons_s_se",
        "parity_even_even", "parity_even_even_se",
        "parity_odd_odd", "parity_odd_odd_se",
        "parity_mixed", "parity_mixed_se"};
    if (residual) {
        header.push_back("residual");
        header.push_back("residual_se");
    }
    f.row(header);
    for (std::size_t k = 0; k < result.times.size(); ++k) {
        const ObservableRecord& m = result.mean[k];
        const ObservableRecord& s = result.sem[k];
        std::vector<std::string> cells = {
            format_cell(result.times[k]),
            format_cell(m.e_kin), format_cell(s.e_kin),
            format_cell(m.p_ground), format_cell(s.p_ground),
            format_cell(m.bunching), format_cell(s.bunching),
            format_cell(m.n_photons_c), format_cell(s.n_photons_c),
            format_cell(m.n_photons_s), format_cell(s.n_photons_s),
            format_cell(m.parity_fracs[0]), format_cell(s.parity_fracs[0]),
            format_cell(m.parity_fracs[1]), format_cell(s.parity_fracs[1]),
            format_cell(m.parity_fracs[2]), format_cell(s.parity_fracs[2])};
        if (residual) {
            cells.push_back(format_cell(result.residual_mean[k]));
            cells.push_back(format_cell(result.residual_se[k]));
        }
        f.row(cells);
    }
    f.close();
}

void write_marginal_table(const EnsembleResult& result,
                          const OutputContext& ctx, const std::string& path) {
    const int n_max = n_max_of(result);
    TsvFile f(path);
    f.comment(identity_line(ctx));
    f.row({"t", "n", "p", "p_se"});
    for (std::size_t k = 0; k < result.times.size(); ++k) {
        const Eigen::VectorXd& p = result.mean[k].p_single;
        const Eigen::VectorXd& se = result.sem[k].p_single;
        for (Eigen::Index i = 0; i < p.size(); ++i)
            f.row({format_cell(result.times[k]),
                   std::to_string(static_cast<int>(i) - n_max),
                   format_cell(p[i]), format_cell(se[i])});
    }
    f.close();
}

void write_joint_matrix(const Eigen::MatrixXd& joint, double time,
                        const OutputContext& ctx, const std::string& path) {
    const int n_max = static_cast<int>((joint.rows() - 1) / 2);
    TsvFile f(path);
    f.comment(identity_line(ctx));
    f.comment("t=" + format_cell(time));
    std::vector<std::string> header = {"n1\\n2"};
    for (Eigen::Index j = 0; j < joint.cols(); ++j)
        header.push_back(std::to_string(static_cast<int>(j) - n_max));
    f.row(header);
    for (Eigen::Index i = 0; i < joint.rows(); ++i) {
        std::vector<std::string> cells = {
            std::to_string(static_cast<int>(i) - n_max)};
        for (Eigen::Index j = 0; j < joint.cols(); ++j)
            cells.push_back(format_cell(joint(i, j)));
        f.row(cells);
    }
    f.close();
}

void write_correlation_table(const EnsembleResult& result,
                             const OutputContext& ctx,
                             const std::string& path) {
    TsvFile f(path);
    f.comment(identity_line(ctx));
    f.row({"t", "c_p", "c_p_se", "t_eff", "t_eff_se"});
    for (std::size_t k = 0; k < result.times.size(); ++k) {
        const ObservableRecord& m = result.mean[k];
        const ObservableRecord& s = result.sem[k];
        f.row({format_cell(result.times[k]), format_cell(m.c_p),
               format_cell(s.c_p), format_cell(m.t_eff),
               format_cell(s.t_eff)});
    }
    f.close();
}

void write_scan_table(const ScanResult& result, const OutputContext& ctx,
                      const std::string& path) {
    TsvFile f(path);
    f.comment(identity_line(ctx));
    f.comment("optimal_delta_c=" + format_cell(result.optimal_delta_c));
    f.row({"delta_c", "residual", "residual_se"});
    for (std::size_t i = 0; i < result.grid.size(); ++i)
        f.row({format_cell(result.grid[i]), format_cell(result.residual[i]),
               format_cell(result.residual_se[i])});
    f.close();
}

std::vector<std::string> write_ensemble_outputs(const EnsembleResult& result,
                                                const ProtocolSpec& protocol,
                                                const OutputContext& ctx,
                                                const std::string& out_dir) {
    std::vector<std::string> written;
    const auto emit = [&](const std::string& name, auto&& writer) {
        writer(out_dir + "/" + name);
        written.push_back(name);
    };
    emit("energy.tsv", [&](const std::string& p) {
        write_energy_table(result, ctx, p);
    });
    emit("marginal.tsv", [&](const std::string& p) {
        write_marginal_table(result, ctx, p);
    });
    emit("correlation.tsv", [&](const std::string& p) {
        write_correlation_table(result, ctx, p);
    });

    if (result.times.empty()) return written;

    // Joint snapshots at the first sample, each stage boundary (closest
    // sample), and the final sample.
    std::set<std::size_t> picks = {0, result.times.size() - 1};
    double boundary = 0.0;
    for (std::size_t s = 0; s + 1 < protocol.stages.size(); ++s) {
        boundary += protocol.stages[s].duration;
        std::size_t best = 0;
        for (std::size_t k = 1; k < result.times.size(); ++k)
            if (std::abs(result.times[k] - boundary) <
                std::abs(result.times[best] - boundary))
                best = k;
        picks.insert(best);
    }
    for (std::size_t k : picks) {
        char name[64];
        std::snprintf(name, sizeof name, "joint_t%.10g.tsv", result.times[k]);
        emit(name, [&](const std::string& p) {
            write_joint_matrix(result.mean[k].p_joint, result.times[k], ctx, p);
        });
    }
    return written;
}

nlohmann::json ensemble_report(const EnsembleResult& result,
                               const OutputContext& ctx) {
    json report;
    report["config_hash"] = ctx.config_hash;
    report["base_seed"] = ctx.base_seed;
    report["n_trajectories"] = result.n_traj;
    report["total_jumps"] = result.total_jumps;
    report["diagnostics"] =
        json{{"max_parity_drift", result.max_parity_drift},
             {"max_parity_leak", result.max_parity_leak},
             {"max_boundary_pop", result.max_boundary_pop},
             {"max_top_fock_pop", result.max_top_fock_pop},
             {"boundary_flag", result.boundary_flag},
             {"fock_flag", result.fock_flag}};
    if (!result.times.empty()) {
        const ObservableRecord& m = result.mean.back();
        const ObservableRecord& s = result.sem.back();
        json fin;
        fin["t"] = result.times.back();
        fin["e_kin"] = m.e_kin;
        fin["e_kin_se"] = s.e_kin;
        fin["p_ground"] = m.p_ground;
        fin["p_ground_se"] = s.p_ground;
        fin["bunching"] = m.bunching;
        fin["bunching_se"] = s.bunching;
        fin["c_p"] = opt_json(m.c_p);
        fin["c_p_se"] = opt_json(s.c_p);
        fin["t_eff"] = opt_json(m.t_eff);
        fin["t_eff_se"] = opt_json(s.t_eff);
        fin["n_photons_c"] = m.n_photons_c;
        fin["n_photons_s"] = m.n_photons_s;
        fin["parity_even_even"] = m.parity_fracs[0];
        fin["parity_odd_odd"] = m.parity_fracs[1];
        fin["parity_mixed"] = m.parity_fracs[2];
        if (!result.residual_mean.empty()) {
            fin["residual"] = result.residual_mean.back();
            fin["residual_se"] = result.residual_se.back();
        }
        report["final"] = std::move(fin);
    }
    return report;
}

void write_report(const nlohmann::json& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + path);
    out << report.dump(2) << "\n";
    out.flush();
    if (!out) throw Error("short write on output file: " + path);
}

}  // namespace subrecoil
