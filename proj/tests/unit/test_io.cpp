#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "subrecoil/io.hpp"

using namespace subrecoil;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    return out;
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "subrecoil_io_test") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

EnsembleResult tiny_result() {
    EnsembleSpec spec;
    spec.dims = HilbertDims::ring(2, 2, 2);
    spec.params = PhysicalParams{-2.5, 0.25};
    spec.protocol.stages = {StageSpec{-6.5, 0.5, 2.0, 2},
                            StageSpec{-7.0, 1.0, 2.0, 2}};
    spec.sigma_n = 0.8;
    spec.n_traj = 4;
    spec.base_seed = 7;
    spec.sample_dt = 1.0;
    spec.residual_target_n = 2;
    return run_ensemble(spec);
}

const OutputContext kCtx{"00deadbeef001234", 7};

}  // namespace

TEST_CASE("cells carry full precision and NA for undefined") {
    CHECK(format_cell(0.0) == "0");
    CHECK(format_cell(0.1) == "0.10000000000000001");
    CHECK(format_cell(-6.5) == "-6.5");
    CHECK(std::stod(format_cell(1e-300)) == 1e-300);
    CHECK(std::stod(format_cell(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_cell(std::optional<double>{}) == "NA");
    CHECK(format_cell(std::optional<double>{2.0}) == "2");
}

TEST_CASE("every table embeds the identity header") {
    TempDir tmp;
    const EnsembleResult res = tiny_result();
    ProtocolSpec protocol;
    protocol.stages = {StageSpec{-6.5, 0.5, 2.0, 2}, StageSpec{-7.0, 1.0, 2.0, 2}};
    const auto files =
        write_ensemble_outputs(res, protocol, kCtx, tmp.path.string());
    CHECK(files.size() >= 3);
    for (const std::string& name : files) {
        const std::string text = slurp(tmp.path / name);
        CHECK(text.find("# config_hash=00deadbeef001234 base_seed=7\n") !=
              std::string::npos);
        CHECK(text.find("\r") == std::string::npos);
    }
}

TEST_CASE("standard output set and snapshot times") {
    TempDir tmp;
    const EnsembleResult res = tiny_result();
    ProtocolSpec protocol;
    protocol.stages = {StageSpec{-6.5, 0.5, 2.0, 2}, StageSpec{-7.0, 1.0, 2.0, 2}};
    const auto files =
        write_ensemble_outputs(res, protocol, kCtx, tmp.path.string());

    auto has = [&](const std::string& name) {
        return std::find(files.begin(), files.end(), name) != files.end();
    };
    CHECK(has("energy.tsv"));
    CHECK(has("marginal.tsv"));
    CHECK(has("correlation.tsv"));
    CHECK(has("joint_t0.tsv"));   // first sample
    CHECK(has("joint_t2.tsv"));   // stage boundary
    CHECK(has("joint_t4.tsv"));   // final sample
    for (const std::string& name : files) CHECK(fs::exists(tmp.path / name));
}

TEST_CASE("energy table layout") {
    TempDir tmp;
    const EnsembleResult res = tiny_result();
    const fs::path path = tmp.path / "energy.tsv";
    write_energy_table(res, kCtx, path.string());

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# config_hash=00deadbeef001234 base_seed=7");
    std::getline(in, line);
    REQUIRE(line.size() > 1);
    REQUIRE(line[0] != '#');
    const auto header = split(line, '\t');
    REQUIRE(header.size() >= 17);
    CHECK(header[0] == "t");
    CHECK(header[1] == "e_kin");
    CHECK(header[2] == "e_kin_se");
    CHECK(std::find(header.begin(), header.end(), "residual") != header.end());

    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto cells = split(line, '\t');
        CHECK(cells.size() == header.size());
        ++rows;
    }
    CHECK(rows == res.times.size());
}

TEST_CASE("marginal table is in long format and normalized") {
    TempDir tmp;
    const EnsembleResult res = tiny_result();
    const fs::path path = tmp.path / "marginal.tsv";
    write_marginal_table(res, kCtx, path.string());

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);  // identity
    std::getline(in, line);
    CHECK(split(line, '\t') == std::vector<std::string>{"t", "n", "p", "p_se"});

    const int span = int(res.mean[0].p_single.size());
    double first_time_mass = 0.0;
    int first_rows = 0;
    while (std::getline(in, line)) {
        const auto cells = split(line, '\t');
        REQUIRE(cells.size() == 4);
        if (cells[0] == format_cell(res.times[0])) {
            first_time_mass += std::stod(cells[2]);
            ++first_rows;
        }
    }
    CHECK(first_rows == span);
    CHECK(first_time_mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("joint snapshot is consistent with the marginal") {
    TempDir tmp;
    const EnsembleResult res = tiny_result();
    const fs::path path = tmp.path / "joint.tsv";
    const std::size_t last = res.times.size() - 1;
    write_joint_matrix(res.mean[last].p_joint, res.times[last], kCtx,
                       path.string());

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# config_hash=00deadbeef001234 base_seed=7");
    std::getline(in, line);
    CHECK(line.rfind("# t=", 0) == 0);
    std::getline(in, line);
    const auto header = split(line, '\t');
    const int span = int(res.mean[last].p_joint.rows());
    REQUIRE(int(header.size()) == span + 1);
    CHECK(header[1] == "-2");
    CHECK(header[span] == "2");

    Eigen::MatrixXd read(span, span);
    for (int i = 0; i < span; ++i) {
        REQUIRE(std::getline(in, line));
        const auto cells = split(line, '\t');
        REQUIRE(int(cells.size()) == span + 1);
        CHECK(cells[0] == std::to_string(i - span / 2));
        for (int j = 0; j < span; ++j) read(i, j) = std::stod(cells[j + 1]);
    }
    CHECK((read - res.mean[last].p_joint).cwiseAbs().maxCoeff() < 1e-16);

    // Row+column pooling reproduces the symmetrized marginal.
    Eigen::VectorXd marg = 0.5 * (read.rowwise().sum() +
                                  read.colwise().sum().transpose());
    CHECK((marg - res.mean[last].p_single).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("correlation table marks undefined entries") {
    TempDir tmp;
    EnsembleResult res = tiny_result();
    res.mean[0].c_p = std::nullopt;
    res.sem[0].c_p = std::nullopt;
    res.mean[0].t_eff = std::nullopt;
    res.sem[0].t_eff = std::nullopt;
    const fs::path path = tmp.path / "correlation.tsv";
    write_correlation_table(res, kCtx, path.string());

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);  // identity
    std::getline(in, line);
    CHECK(split(line, '\t') ==
          std::vector<std::string>{"t", "c_p", "c_p_se", "t_eff", "t_eff_se"});
    std::getline(in, line);
    const auto cells = split(line, '\t');
    CHECK(cells[1] == "NA");
    CHECK(cells[3] == "NA");
}

TEST_CASE("scan table records the optimum") {
    TempDir tmp;
    ScanResult scan;
    scan.grid = {-8.0, -7.0, -6.0};
    scan.residual = {0.3, 0.1, 0.2};
    scan.residual_se = {0.01, 0.01, 0.02};
    scan.optimal_delta_c = -7.0;
    const fs::path path = tmp.path / "scan.tsv";
    write_scan_table(scan, kCtx, path.string());

    const std::string text = slurp(path);
    CHECK(text.find("# config_hash=00deadbeef001234 base_seed=7\n") !=
          std::string::npos);
    CHECK(text.find("# optimal_delta_c=-7\n") != std::string::npos);
    CHECK(text.find("delta_c\tresidual\tresidual_se\n") != std::string::npos);
    CHECK(text.find("-8\t0.29999999999999999\t0.01\n") != std::string::npos);
}

TEST_CASE("rewrites are byte-identical") {
    TempDir tmp;
    const EnsembleResult res = tiny_result();
    const fs::path a = tmp.path / "a.tsv";
    const fs::path b = tmp.path / "b.tsv";
    write_energy_table(res, kCtx, a.string());
    write_energy_table(res, kCtx, b.string());
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("report captures identity, diagnostics and the final record") {
    EnsembleResult res = tiny_result();
    res.mean.back().t_eff = std::nullopt;
    res.sem.back().t_eff = std::nullopt;
    const nlohmann::json rep = ensemble_report(res, kCtx);

    CHECK(rep.at("config_hash") == "00deadbeef001234");
    CHECK(rep.at("base_seed") == 7);
    CHECK(rep.at("n_trajectories") == res.n_traj);
    CHECK(rep.at("diagnostics").contains("max_parity_drift"));
    CHECK(rep.at("diagnostics").contains("max_parity_leak"));
    CHECK(rep.at("diagnostics").at("boundary_flag").is_boolean());
    const auto& fin = rep.at("final");
    CHECK(fin.at("t") == res.times.back());
    CHECK(fin.at("e_kin").is_number());
    CHECK(fin.at("t_eff").is_null());
    CHECK(fin.contains("residual"));

    TempDir tmp;
    const fs::path path = tmp.path / "report.json";
    write_report(rep, path.string());
    const std::string text = slurp(path);
    CHECK(text.back() == '\n');
    CHECK(text.find("\"t_eff\": null") != std::string::npos);
    CHECK(nlohmann::json::parse(text) == rep);
}

TEST_CASE("writers refuse unwritable paths") {
    const EnsembleResult res = tiny_result();
    CHECK_THROWS_AS(
        write_energy_table(res, kCtx, "/nonexistent_dir_42/x.tsv"), Error);
}
