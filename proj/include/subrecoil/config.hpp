#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subrecoil/cavity.hpp"
#include "subrecoil/ensemble.hpp"
#include "subrecoil/protocol.hpp"

namespace subrecoil {

// Complete description of one experiment. Everything that influences the
// numbers lives here; the thread count is a runtime hint and deliberately
// not part of the configuration (results are independent of it).
struct RunConfig {
    PhysicalParams params;
    HilbertDims dims;
    ExchangeSymmetry symmetry = ExchangeSymmetry::Boson;
    InitialStateKind initial = InitialStateKind::RandomPhasePackets;
    double sigma_n = 2.0;
    bool even_only = false;
    std::vector<StageSpec> stages;
    std::optional<ScanSpec> scan;
    int n_traj = 1000;
    std::uint64_t base_seed = 1;
    double sample_dt = 1.0;
    double dt_max = 0.1;
    double ode_tol = 1e-8;
    double jump_time_tol = 1e-6;
    std::string output_dir = "out";

    // Full strict validation: physical regime, dimensions, stage list or
    // scan block present, positive tolerances.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

// Parses the JSON text of a config file. Unknown keys anywhere in the tree
// are errors; missing keys fall back to the documented defaults.
RunConfig parse_config(const std::string& text);

// Reads and parses `path`, decorating parse errors with the file name.
RunConfig load_config(const std::string& path);

// Canonical serialization: sorted keys, every field written explicitly.
// parse_config(serialize_config(c)) == c for every valid c.
std::string serialize_config(const RunConfig& config);

void save_config(const RunConfig& config, const std::string& path);

// FNV-1a 64 over the canonical serialization with output_dir removed, so a
// run written into a different directory still reproduces identical tables.
// Any other field change changes the hash.
std::uint64_t config_hash(const RunConfig& config);

// Sixteen lowercase hex digits of config_hash, as embedded in file headers.
std::string config_hash_hex(const RunConfig& config);

// Assembles the ensemble description for the `cool`, `darkstate` and
// `oracle-check` subcommands; a scan-only config falls back to the scan's
// stage template. `threads` stays at its default of 1; callers apply the
// runtime hint afterwards.
EnsembleSpec make_ensemble_spec(const RunConfig& config);

// Extracts the scan block; ConfigError if the config has none.
ScanSpec make_scan_spec(const RunConfig& config);

}  // namespace subrecoil
