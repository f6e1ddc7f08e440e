#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subrecoil/config.hpp"
#include "subrecoil/io.hpp"
#include "subrecoil/validation.hpp"

namespace {

using namespace subrecoil;
using nlohmann::json;

struct CliState {
    std::string config_path;
    std::string out_dir;
    int trajectories = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
};

void add_common_options(CLI::App* cmd, CliState& st) {
    cmd->add_option("--config", st.config_path, "Configuration file (JSON)")
        ->required();
    cmd->add_option("--out", st.out_dir, "Output directory override");
    cmd->add_option("--trajectories", st.trajectories,
                    "Trajectory count override");
    auto* seed = cmd->add_option("--seed", st.seed, "Base seed override");
    seed->each([&st](const std::string&) { st.seed_set = true; });
    cmd->add_option("--threads", st.threads,
                    "Worker thread count (results are independent of it)")
        ->check(CLI::PositiveNumber);
}

RunConfig load_effective_config(const CliState& st) {
    RunConfig config = load_config(st.config_path);
    if (!st.out_dir.empty()) config.output_dir = st.out_dir;
    if (st.trajectories > 0) config.n_traj = st.trajectories;
    if (st.seed_set) config.base_seed = st.seed;
    config.validate();
    return config;
}

OutputContext context_of(const RunConfig& config) {
    return OutputContext{config_hash_hex(config), config.base_seed};
}

void print_flags(const EnsembleResult& result) {
    if (result.boundary_flag)
        std::printf("warning: momentum boundary population reached %.3g; "
                    "increase n_max\n",
                    result.max_boundary_pop);
    if (result.fock_flag)
        std::printf("warning: top photon level population reached %.3g; "
                    "increase q_c/q_s\n",
                    result.max_top_fock_pop);
}

int run_cool(const CliState& st) {
    RunConfig config = load_effective_config(st);
    EnsembleSpec spec = make_ensemble_spec(config);
    spec.threads = st.threads;
    spec.residual_target_n = spec.protocol.stages.back().target_n;

    const EnsembleResult result = run_ensemble(spec);
    const OutputContext ctx = context_of(config);
    std::filesystem::create_directories(config.output_dir);
    std::vector<std::string> files =
        write_ensemble_outputs(result, spec.protocol, ctx, config.output_dir);

    json report = ensemble_report(result, ctx);
    report["subcommand"] = "cool";
    report["files"] = files;
    write_report(report, config.output_dir + "/report.json");

    const ObservableRecord& fin = result.mean.back();
    std::printf("cool: %d trajectories, %llu jumps, final e_kin = %.6g, "
                "p_ground = %.6g\n",
                result.n_traj,
                static_cast<unsigned long long>(result.total_jumps), fin.e_kin,
                fin.p_ground);
    print_flags(result);
    std::printf("wrote %zu tables + report.json to %s\n", files.size(),
                config.output_dir.c_str());
    return 0;
}

int run_scan(const CliState& st) {
    RunConfig config = load_effective_config(st);
    const ScanSpec scan = make_scan_spec(config);
    EnsembleSpec base = make_ensemble_spec(config);
    base.threads = st.threads;

    const ScanResult result = scan_detunings(scan, base);
    const OutputContext ctx = context_of(config);
    std::filesystem::create_directories(config.output_dir);
    write_scan_table(result, ctx, config.output_dir + "/scan.tsv");

    json report;
    report["subcommand"] = "scan";
    report["config_hash"] = ctx.config_hash;
    report["base_seed"] = ctx.base_seed;
    report["delta_c_grid"] = result.grid;
    report["residual"] = result.residual;
    report["residual_se"] = result.residual_se;
    report["optimal_delta_c"] = result.optimal_delta_c;
    write_report(report, config.output_dir + "/report.json");

    std::printf("scan: %zu detunings, optimum delta_c = %.6g\n",
                result.grid.size(), result.optimal_delta_c);
    return 0;
}

int run_darkstate(const CliState& st) {
    RunConfig config = load_effective_config(st);

    // Same motional space and sine-mode space in both geometries; the
    // subcommand defines the initial state and statistics.
    RunConfig ring_cfg = config;
    ring_cfg.symmetry = ExchangeSymmetry::Boson;
    ring_cfg.initial = InitialStateKind::ReflectionOddDark;
    ring_cfg.even_only = false;
    ring_cfg.dims = config.dims.geometry == Geometry::Ring
                        ? config.dims
                        : HilbertDims::ring(config.dims.n_max, 2,
                                            config.dims.q_s);
    RunConfig lin_cfg = ring_cfg;
    lin_cfg.dims = HilbertDims::linear(config.dims.n_max, config.dims.q_s);

    const auto run_one = [&](const RunConfig& c) {
        EnsembleSpec spec = make_ensemble_spec(c);
        spec.threads = st.threads;
        return run_ensemble(spec);
    };
    const EnsembleResult ring = run_one(ring_cfg);
    const EnsembleResult lin = run_one(lin_cfg);

    const OutputContext ctx = context_of(config);
    std::filesystem::create_directories(config.output_dir);

    json report;
    report["subcommand"] = "darkstate";
    report["config_hash"] = ctx.config_hash;
    report["base_seed"] = ctx.base_seed;
    report["times"] = ring.times;
    const auto series = [](const EnsembleResult& r) {
        json s;
        std::vector<double> mean, se;
        for (std::size_t k = 0; k < r.times.size(); ++k) {
            mean.push_back(r.mean[k].p_ground);
            se.push_back(r.sem[k].p_ground);
        }
        s["p_ground"] = mean;
        s["p_ground_se"] = se;
        s["final_p_ground"] = mean.empty() ? 0.0 : mean.back();
        s["max_p_ground"] =
            mean.empty() ? 0.0 : *std::max_element(mean.begin(), mean.end());
        return s;
    };
    report["ring"] = series(ring);
    report["linear"] = series(lin);
    const double ring_final = report["ring"]["final_p_ground"].get<double>();
    const double lin_final = report["linear"]["final_p_ground"].get<double>();
    report["ring_exceeds_100x_linear"] = ring_final > 100.0 * lin_final;
    write_report(report, config.output_dir + "/report.json");

    std::printf("darkstate: final p_ground ring = %.6g, linear = %.6g\n",
                ring_final, lin_final);
    return 0;
}

std::string observable_group(const std::string& name) {
    const auto paren = name.find('(');
    if (paren == std::string::npos) return name;
    return name.find(',') == std::string::npos ? "P(n)" : "P(n1,n2)";
}

int run_oracle_check(const CliState& st) {
    RunConfig config = load_effective_config(st);
    EnsembleSpec spec = make_ensemble_spec(config);
    spec.threads = st.threads;

    const EnsembleResult result = run_ensemble(spec);
    const std::vector<ObservableRecord> reference = oracle_records(spec);
    const OracleComparison cmp = compare_records(result, reference);

    std::map<std::string, std::pair<double, bool>> groups;
    for (const ComparisonEntry& e : cmp.entries) {
        auto& g = groups.try_emplace(observable_group(e.name), 0.0, true)
                      .first->second;
        g.first = std::max(g.first, e.z);
        g.second = g.second && e.pass;
    }

    const OutputContext ctx = context_of(config);
    std::filesystem::create_directories(config.output_dir);
    json report;
    report["subcommand"] = "oracle-check";
    report["config_hash"] = ctx.config_hash;
    report["base_seed"] = ctx.base_seed;
    report["pass"] = cmp.pass;
    report["max_z"] = cmp.max_z;
    report["worst"] = json{{"name", cmp.worst_name}, {"time", cmp.worst_time}};
    json obs = json::array();
    for (const auto& [name, g] : groups) {
        obs.push_back(
            json{{"name", name}, {"max_z", g.first}, {"pass", g.second}});
        std::printf("%-12s max|z| = %8.4f  %s\n", name.c_str(), g.first,
                    g.second ? "PASS" : "FAIL");
    }
    report["observables"] = std::move(obs);
    write_report(report, config.output_dir + "/report.json");

    std::printf("oracle-check: %s (max|z| = %.4f over %zu entries)\n",
                cmp.pass ? "PASS" : "FAIL", cmp.max_z, cmp.entries.size());
    return cmp.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic wave-function simulator of two-particle cavity "
                 "cooling"};
    app.require_subcommand(1);

    CliState st;
    CLI::App* cool = app.add_subcommand(
        "cool", "Run the staged cooling protocol and write all tables");
    CLI::App* scan = app.add_subcommand(
        "scan", "Scan pump detunings and report the optimum");
    CLI::App* dark = app.add_subcommand(
        "darkstate",
        "Propagate the reflection-odd dark state in both geometries");
    CLI::App* oracle = app.add_subcommand(
        "oracle-check",
        "Compare stochastic averages against the dense reference solution");
    for (CLI::App* cmd : {cool, scan, dark, oracle})
        add_common_options(cmd, st);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cool->parsed()) return run_cool(st);
        if (scan->parsed()) return run_scan(st);
        if (dark->parsed()) return run_darkstate(st);
        return run_oracle_check(st);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        try {
            std::string dir = st.out_dir;
            if (dir.empty()) dir = ".";
            std::filesystem::create_directories(dir);
            json report;
            report["error"] = e.what();
            write_report(report, dir + "/report.json");
        } catch (...) {
            // the stderr line is the error report of last resort
        }
        return 1;
    }
}
