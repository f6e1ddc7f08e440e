#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "subrecoil/ensemble.hpp"

namespace subrecoil {

// Identity stamped into every output file header so a table can always be
// traced back to the exact configuration and seed that produced it.
struct OutputContext {
    std::string config_hash;  // 16 lowercase hex digits
    std::uint64_t base_seed = 0;
};

// All writers emit tab-separated text with full round-trip precision
// (17 significant digits), "NA" for undefined entries, and no timestamps:
// a rerun with identical inputs reproduces identical bytes.

// Scalar time series: kinetic energy, ground projection, bunching, photon
// numbers, parity fractions (each with its standard error); residual
// population columns appear when the ensemble tracked them.
void write_energy_table(const EnsembleResult& result, const OutputContext& ctx,
                        const std::string& path);

// Long-format momentum marginal: one (t, n, p, p_se) row per bin per time.
void write_marginal_table(const EnsembleResult& result,
                          const OutputContext& ctx, const std::string& path);

// Dense joint momentum distribution at one time, with an index header row
// and one index column (both in units of hbar*k).
void write_joint_matrix(const Eigen::MatrixXd& joint, double time,
                        const OutputContext& ctx, const std::string& path);

// Momentum correlation and effective temperature vs. time.
void write_correlation_table(const EnsembleResult& result,
                             const OutputContext& ctx,
                             const std::string& path);

// Detuning scan: (delta_c, residual, stderr) rows plus the selected optimum.
void write_scan_table(const ScanResult& result, const OutputContext& ctx,
                      const std::string& path);

// Standard output set for one ensemble run: energy.tsv, marginal.tsv,
// correlation.tsv, and joint_t<time>.tsv at the first sample, each stage
// boundary, and the final sample. Returns the written file names.
std::vector<std::string> write_ensemble_outputs(const EnsembleResult& result,
                                                const ProtocolSpec& protocol,
                                                const OutputContext& ctx,
                                                const std::string& out_dir);

// Machine-readable run summary: identity, diagnostics and final-time
// observables. Subcommands extend it before writing.
nlohmann::json ensemble_report(const EnsembleResult& result,
                               const OutputContext& ctx);

// Serializes with sorted keys and a trailing newline; undefined -> null.
void write_report(const nlohmann::json& report, const std::string& path);

// Formats one value the way every table cell is formatted.
std::string format_cell(double value);
std::string format_cell(const std::optional<double>& value);

}  // namespace subrecoil
