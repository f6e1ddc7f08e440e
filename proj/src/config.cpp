#include "subrecoil/config.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"

namespace subrecoil {

namespace {

using nlohmann::json;

// Typo safety: every object in the tree declares its full key set.
void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
    }
}

const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& v, const char* where) {
    if (!v.is_number())
        throw ConfigError(std::string(where) + " must be a number");
    return v.get<double>();
}

int as_int(const json& v, const char* where) {
    if (!v.is_number_integer())
        throw ConfigError(std::string(where) + " must be an integer");
    return v.get<int>();
}

bool as_bool(const json& v, const char* where) {
    if (!v.is_boolean())
        throw ConfigError(std::string(where) + " must be a boolean");
    return v.get<bool>();
}

std::string as_string(const json& v, const char* where) {
    if (!v.is_string())
        throw ConfigError(std::string(where) + " must be a string");
    return v.get<std::string>();
}

void read_number(const json& obj, const char* key, double& out) {
    if (const json* v = find(obj, key)) out = as_number(*v, key);
}

void read_int(const json& obj, const char* key, int& out) {
    if (const json* v = find(obj, key)) out = as_int(*v, key);
}

Geometry parse_geometry(const std::string& s) {
    if (s == "ring") return Geometry::Ring;
    if (s == "linear") return Geometry::Linear;
    throw ConfigError("geometry must be \"ring\" or \"linear\", got \"" + s +
                      "\"");
}

ExchangeSymmetry parse_symmetry(const std::string& s) {
    if (s == "boson") return ExchangeSymmetry::Boson;
    if (s == "fermion") return ExchangeSymmetry::Fermion;
    throw ConfigError("symmetry must be \"boson\" or \"fermion\", got \"" + s +
                      "\"");
}

InitialStateKind parse_initial_kind(const std::string& s) {
    if (s == "packets") return InitialStateKind::RandomPhasePackets;
    if (s == "dark") return InitialStateKind::ReflectionOddDark;
    throw ConfigError("initial.kind must be \"packets\" or \"dark\", got \"" +
                      s + "\"");
}

const char* geometry_name(Geometry g) {
    return g == Geometry::Ring ? "ring" : "linear";
}

const char* symmetry_name(ExchangeSymmetry s) {
    return s == ExchangeSymmetry::Boson ? "boson" : "fermion";
}

const char* initial_kind_name(InitialStateKind k) {
    return k == InitialStateKind::RandomPhasePackets ? "packets" : "dark";
}

StageSpec parse_stage(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    check_keys(obj, where.c_str(), {"delta_c", "eta", "duration", "target_n"});
    StageSpec stage;
    read_number(obj, "delta_c", stage.delta_c);
    read_number(obj, "eta", stage.eta);
    read_number(obj, "duration", stage.duration);
    read_int(obj, "target_n", stage.target_n);
    return stage;
}

json stage_to_json(const StageSpec& stage) {
    return json{{"delta_c", stage.delta_c},
                {"eta", stage.eta},
                {"duration", stage.duration},
                {"target_n", stage.target_n}};
}

// Serialization used for both file output and hashing; `for_hash` drops the
// output directory so relocated reruns keep their identity.
json to_json(const RunConfig& c, bool for_hash) {
    json j;
    j["physical"] = json{{"u0", c.params.u0}, {"kappa", c.params.kappa}};
    j["dims"] = json{{"n_max", c.dims.n_max},
                     {"q_c", c.dims.q_c},
                     {"q_s", c.dims.q_s},
                     {"geometry", geometry_name(c.dims.geometry)}};
    j["symmetry"] = symmetry_name(c.symmetry);
    j["initial"] = json{{"kind", initial_kind_name(c.initial)},
                        {"sigma_n", c.sigma_n},
                        {"even_only", c.even_only}};
    json stages = json::array();
    for (const StageSpec& s : c.stages) stages.push_back(stage_to_json(s));
    j["stages"] = std::move(stages);
    if (c.scan) {
        json scan = stage_to_json(c.scan->stage);
        scan.erase("delta_c");
        scan["delta_c_grid"] = c.scan->grid;
        scan["n_traj"] = c.scan->n_traj;
        j["scan"] = std::move(scan);
    }
    j["ensemble"] = json{{"n_traj", c.n_traj}, {"base_seed", c.base_seed}};
    j["sampling"] = json{{"sample_dt", c.sample_dt},
                         {"dt_max", c.dt_max},
                         {"ode_tol", c.ode_tol},
                         {"jump_time_tol", c.jump_time_tol}};
    if (!for_hash) j["output_dir"] = c.output_dir;
    return j;
}

}  // namespace

void RunConfig::validate() const {
    params.validate();
    dims.validate();
    if (!(sigma_n > 0.0)) throw ConfigError("sigma_n > 0 violated");
    if (stages.empty() && !scan)
        throw ConfigError("config needs a stage list or a scan block");
    for (const StageSpec& s : stages) s.validate();
    if (scan) scan->validate();
    if (even_only && symmetry != ExchangeSymmetry::Boson)
        throw ConfigError("even_only requires bosons");
    if (even_only && initial != InitialStateKind::RandomPhasePackets)
        throw ConfigError("even_only requires packet initial states");
    if (initial == InitialStateKind::ReflectionOddDark && dims.n_max < 2)
        throw ConfigError("dark initial state needs n_max >= 2");
    if (n_traj < 1) throw ConfigError("n_traj >= 1 violated");
    if (!(sample_dt > 0.0)) throw ConfigError("sample_dt > 0 violated");
    if (!(dt_max > 0.0)) throw ConfigError("dt_max > 0 violated");
    if (!(ode_tol > 0.0)) throw ConfigError("ode_tol > 0 violated");
    if (!(jump_time_tol > 0.0))
        throw ConfigError("jump_time_tol > 0 violated");
    if (output_dir.empty()) throw ConfigError("output_dir must be non-empty");
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");
    check_keys(j, "config root",
               {"physical", "dims", "symmetry", "initial", "stages", "scan",
                "ensemble", "sampling", "output_dir"});

    RunConfig c;
    if (const json* v = find(j, "physical")) {
        check_keys(*v, "physical", {"u0", "kappa"});
        read_number(*v, "u0", c.params.u0);
        read_number(*v, "kappa", c.params.kappa);
    }
    if (const json* v = find(j, "dims")) {
        check_keys(*v, "dims", {"n_max", "q_c", "q_s", "geometry"});
        read_int(*v, "n_max", c.dims.n_max);
        read_int(*v, "q_c", c.dims.q_c);
        read_int(*v, "q_s", c.dims.q_s);
        if (const json* g = find(*v, "geometry"))
            c.dims.geometry = parse_geometry(as_string(*g, "dims.geometry"));
        // A linear cavity has q_c pinned to 1; only an explicit contrary
        // value should reach validation.
        if (c.dims.geometry == Geometry::Linear && !find(*v, "q_c"))
            c.dims.q_c = 1;
    }
    if (const json* v = find(j, "symmetry"))
        c.symmetry = parse_symmetry(as_string(*v, "symmetry"));
    if (const json* v = find(j, "initial")) {
        check_keys(*v, "initial", {"kind", "sigma_n", "even_only"});
        if (const json* k = find(*v, "kind"))
            c.initial = parse_initial_kind(as_string(*k, "initial.kind"));
        read_number(*v, "sigma_n", c.sigma_n);
        if (const json* k = find(*v, "even_only"))
            c.even_only = as_bool(*k, "initial.even_only");
    }
    if (const json* v = find(j, "stages")) {
        if (!v->is_array()) throw ConfigError("stages must be an array");
        for (std::size_t i = 0; i < v->size(); ++i)
            c.stages.push_back(
                parse_stage((*v)[i], "stages[" + std::to_string(i) + "]"));
    }
    if (const json* v = find(j, "scan")) {
        check_keys(*v, "scan",
                   {"delta_c_grid", "eta", "duration", "target_n", "n_traj"});
        ScanSpec scan;
        const json* grid = find(*v, "delta_c_grid");
        if (!grid || !grid->is_array())
            throw ConfigError("scan.delta_c_grid must be an array");
        for (const json& g : *grid)
            scan.grid.push_back(as_number(g, "scan.delta_c_grid entry"));
        read_number(*v, "eta", scan.stage.eta);
        read_number(*v, "duration", scan.stage.duration);
        read_int(*v, "target_n", scan.stage.target_n);
        read_int(*v, "n_traj", scan.n_traj);
        c.scan = std::move(scan);
    }
    if (const json* v = find(j, "ensemble")) {
        check_keys(*v, "ensemble", {"n_traj", "base_seed"});
        read_int(*v, "n_traj", c.n_traj);
        if (const json* s = find(*v, "base_seed")) {
            if (!s->is_number_unsigned())
                throw ConfigError("base_seed must be a non-negative integer");
            c.base_seed = s->get<std::uint64_t>();
        }
    }
    if (const json* v = find(j, "sampling")) {
        check_keys(*v, "sampling",
                   {"sample_dt", "dt_max", "ode_tol", "jump_time_tol"});
        read_number(*v, "sample_dt", c.sample_dt);
        read_number(*v, "dt_max", c.dt_max);
        read_number(*v, "ode_tol", c.ode_tol);
        read_number(*v, "jump_time_tol", c.jump_time_tol);
    }
    if (const json* v = find(j, "output_dir"))
        c.output_dir = as_string(*v, "output_dir");

    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string serialize_config(const RunConfig& config) {
    return to_json(config, false).dump(2) + "\n";
}

void save_config(const RunConfig& config, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write config file: " + path);
    out << serialize_config(config);
    if (!out) throw ConfigError("short write on config file: " + path);
}

std::uint64_t config_hash(const RunConfig& config) {
    const std::string canon = to_json(config, true).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char byte : canon) {
        h ^= byte;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash_hex(const RunConfig& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(config_hash(config)));
    return std::string(buf);
}

EnsembleSpec make_ensemble_spec(const RunConfig& config) {
    config.validate();
    EnsembleSpec spec;
    spec.dims = config.dims;
    spec.params = config.params;
    // A scan-only config still yields a valid base description; the scan
    // driver swaps in one stage per grid point anyway.
    spec.protocol.stages =
        config.stages.empty() ? std::vector<StageSpec>{config.scan->stage}
                              : config.stages;
    spec.protocol.sym = config.symmetry;
    spec.protocol.geometry = config.dims.geometry;
    spec.sigma_n = config.sigma_n;
    spec.initial = config.initial;
    spec.even_only = config.even_only;
    spec.n_traj = config.n_traj;
    spec.base_seed = config.base_seed;
    spec.sample_dt = config.sample_dt;
    spec.dt_max = config.dt_max;
    spec.ode_tol = config.ode_tol;
    spec.jump_time_tol = config.jump_time_tol;
    return spec;
}

ScanSpec make_scan_spec(const RunConfig& config) {
    config.validate();
    if (!config.scan) throw ConfigError("config has no scan block");
    return *config.scan;
}

}  // namespace subrecoil
