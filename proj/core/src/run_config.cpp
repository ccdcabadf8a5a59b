#include "roughpam/run_config.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "roughpam/common.hpp"

namespace roughpam {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) throw ConfigError(where + "." + key + ": unknown field");
    }
}

template <class T>
void read(const json& j, const char* key, const std::string& where, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

InitialCondition parse_u0(const json& j) {
    const std::string where = "model.u0";
    if (!j.is_object() || !j.contains("kind")) throw ConfigError(where + ".kind: missing");
    std::string kind;
    read(j, "kind", where, kind);
    if (kind == "constant") {
        reject_unknown(j, where, {"kind", "value"});
        double v = 1.0;
        read(j, "value", where, v);
        return InitialCondition::constant(v);
    }
    if (kind == "gaussian_bump") {
        reject_unknown(j, where, {"kind", "center", "width", "amplitude"});
        double c = 0.0, w = 1.0, a = 1.0;
        read(j, "center", where, c);
        read(j, "width", where, w);
        read(j, "amplitude", where, a);
        return InitialCondition::gaussian_bump(c, w, a);
    }
    if (kind == "spectral_decay") {
        reject_unknown(j, where, {"kind", "amplitude", "power"});
        double a = 1.0, p = 2.0;
        read(j, "amplitude", where, a);
        read(j, "power", where, p);
        return InitialCondition::spectral_decay(a, p);
    }
    throw ConfigError(where + ".kind: unknown kind '" + kind + "'");
}

json u0_json(const InitialCondition& u0) {
    switch (u0.kind()) {
        case InitialCondition::Kind::constant:
            return {{"kind", "constant"}, {"value", u0.amplitude()}};
        case InitialCondition::Kind::gaussian_bump:
        case InitialCondition::Kind::catalog:
            return {{"kind", "gaussian_bump"}, {"center", u0.center()}, {"width", u0.width()},
                    {"amplitude", u0.amplitude()}};
        case InitialCondition::Kind::spectral_decay:
            return {{"kind", "spectral_decay"}, {"amplitude", u0.amplitude()}, {"power", u0.power()}};
    }
    return {};
}

json config_json(const RunConfig& c, bool with_local) {
    json j;
    j["schema_version"] = RunConfig::kSchemaVersion;
    j["model"] = {{"h", c.model.h.value()},
                  {"kappa", c.model.kappa},
                  {"horizon", c.model.horizon},
                  {"noise_scale", c.model.noise_scale},
                  {"u0", u0_json(c.model.u0)}};
    j["grid"] = {{"domain_length", c.grid.domain_length}, {"mode_cutoff", c.grid.mode_cutoff}, {"dt", c.grid.dt}};
    j["solver"] = {{"trajectories", c.solver.trajectories},
                   {"snapshot_every", c.solver.snapshot_every},
                   {"probe_modes", c.solver.probe_modes}};
    j["fk"] = {{"dt_b", c.fk.dt_b}, {"eps_schedule", c.fk.eps_schedule}, {"samples", c.fk.samples},
               {"n_list", c.fk.n_list}, {"t", c.fk.t},   {"x", c.fk.x}};
    j["chaos"] = {{"n_max", c.chaos.n_max},
                  {"t", c.chaos.t},
                  {"x", c.chaos.x},
                  {"max_samples", c.chaos.max_samples},
                  {"target_rel_stderr", c.chaos.target_rel_stderr}};
    j["lab"] = {{"n_list", c.lab.n_list},
                {"t_grid", c.lab.t_grid},
                {"kappa_list", c.lab.kappa_list},
                {"samples", c.lab.samples},
                {"tolerance", c.lab.tolerance}};
    j["seed"] = c.seed;
    if (with_local) {
        j["threads"] = c.threads;
        j["output_dir"] = c.output_dir;
    }
    return j;
}

}  // namespace

void RunConfig::validate() const {
    model.validate();
    grid.validate();
    if (solver.trajectories < 2) throw ConfigError("solver.trajectories: need at least 2");
    if (solver.snapshot_every < 1) throw ConfigError("solver.snapshot_every: must be positive");
    if (solver.probe_modes < 0 || solver.probe_modes > grid.mode_cutoff) {
        throw ConfigError("solver.probe_modes: must lie in [0, grid.mode_cutoff]");
    }
    steps_for_horizon(model.horizon, grid.dt);
    if (!(fk.dt_b > 0.0)) throw ConfigError("fk.dt_b: must be positive");
    if (fk.eps_schedule.size() < 3) throw ConfigError("fk.eps_schedule: need at least 3 values");
    for (std::size_t i = 0; i < fk.eps_schedule.size(); ++i) {
        if (!(fk.eps_schedule[i] > 0.0)) throw ConfigError("fk.eps_schedule: values must be positive");
        if (i > 0 && !(fk.eps_schedule[i] < fk.eps_schedule[i - 1])) {
            throw ConfigError("fk.eps_schedule: must be strictly decreasing");
        }
    }
    if (fk.samples < 2) throw ConfigError("fk.samples: need at least 2");
    if (fk.n_list.empty()) throw ConfigError("fk.n_list: empty");
    for (int n : fk.n_list) {
        if (n < 1 || n > 6) throw ConfigError("fk.n_list: orders must lie in 1..6");
    }
    if (!(fk.t > 0.0)) throw ConfigError("fk.t: must be positive");
    if (chaos.n_max < 2 || chaos.n_max > 20) throw ConfigError("chaos.n_max: must lie in 2..20");
    if (!(chaos.t > 0.0)) throw ConfigError("chaos.t: must be positive");
    if (chaos.max_samples < 1000) throw ConfigError("chaos.max_samples: need at least 1000");
    if (!(chaos.target_rel_stderr > 0.0)) throw ConfigError("chaos.target_rel_stderr: must be positive");
    if (lab.n_list.empty() || lab.t_grid.size() < 4) throw ConfigError("lab: need n values and at least 4 times");
    for (int n : lab.n_list) {
        if (n < 2 || n > 6) throw ConfigError("lab.n_list: orders must lie in 2..6");
    }
    for (std::size_t i = 0; i < lab.t_grid.size(); ++i) {
        if (!(lab.t_grid[i] > 0.0)) throw ConfigError("lab.t_grid: times must be positive");
        if (i > 0 && !(lab.t_grid[i] > lab.t_grid[i - 1])) throw ConfigError("lab.t_grid: must be increasing");
    }
    for (double k : lab.kappa_list) {
        if (!(k > 0.0)) throw ConfigError("lab.kappa_list: values must be positive");
    }
    if (lab.samples < 2) throw ConfigError("lab.samples: need at least 2");
    if (!(lab.tolerance > 0.0)) throw ConfigError("lab.tolerance: must be positive");
    if (threads < 0) throw ConfigError("threads: must be >= 0");
}

std::string RunConfig::canonical() const { return config_json(*this, false).dump(); }

std::string RunConfig::fingerprint() const { return sha256_hex(canonical()); }

std::string RunConfig::to_json() const { return config_json(*this, true).dump(2); }

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // Report line and column of the failing byte.
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << "config parse error at line " << line << ", column " << col << ": " << e.what();
        throw ConfigError(msg.str());
    }
    reject_unknown(j, "config", {"schema_version", "model", "grid", "solver", "fk", "chaos", "lab", "seed", "threads",
                                 "output_dir"});
    int version = RunConfig::kSchemaVersion;
    read(j, "schema_version", "config", version);
    if (version != RunConfig::kSchemaVersion) throw ConfigError("config.schema_version: unsupported version");

    RunConfig c;
    if (j.contains("model")) {
        const json& m = j["model"];
        reject_unknown(m, "model", {"h", "kappa", "horizon", "noise_scale", "u0"});
        double h = c.model.h.value();
        read(m, "h", "model", h);
        c.model.h = HurstParam(h);
        read(m, "kappa", "model", c.model.kappa);
        read(m, "horizon", "model", c.model.horizon);
        read(m, "noise_scale", "model", c.model.noise_scale);
        if (m.contains("u0")) c.model.u0 = parse_u0(m["u0"]);
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        reject_unknown(g, "grid", {"domain_length", "mode_cutoff", "dt"});
        read(g, "domain_length", "grid", c.grid.domain_length);
        read(g, "mode_cutoff", "grid", c.grid.mode_cutoff);
        read(g, "dt", "grid", c.grid.dt);
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        reject_unknown(s, "solver", {"trajectories", "snapshot_every", "probe_modes"});
        read(s, "trajectories", "solver", c.solver.trajectories);
        read(s, "snapshot_every", "solver", c.solver.snapshot_every);
        read(s, "probe_modes", "solver", c.solver.probe_modes);
    }
    if (j.contains("fk")) {
        const json& f = j["fk"];
        reject_unknown(f, "fk", {"dt_b", "eps_schedule", "samples", "n_list", "t", "x"});
        read(f, "dt_b", "fk", c.fk.dt_b);
        read(f, "eps_schedule", "fk", c.fk.eps_schedule);
        read(f, "samples", "fk", c.fk.samples);
        read(f, "n_list", "fk", c.fk.n_list);
        read(f, "t", "fk", c.fk.t);
        read(f, "x", "fk", c.fk.x);
    }
    if (j.contains("chaos")) {
        const json& s = j["chaos"];
        reject_unknown(s, "chaos", {"n_max", "t", "x", "max_samples", "target_rel_stderr"});
        read(s, "n_max", "chaos", c.chaos.n_max);
        read(s, "t", "chaos", c.chaos.t);
        read(s, "x", "chaos", c.chaos.x);
        read(s, "max_samples", "chaos", c.chaos.max_samples);
        read(s, "target_rel_stderr", "chaos", c.chaos.target_rel_stderr);
    }
    if (j.contains("lab")) {
        const json& l = j["lab"];
        reject_unknown(l, "lab", {"n_list", "t_grid", "kappa_list", "samples", "tolerance"});
        read(l, "n_list", "lab", c.lab.n_list);
        read(l, "t_grid", "lab", c.lab.t_grid);
        read(l, "kappa_list", "lab", c.lab.kappa_list);
        read(l, "samples", "lab", c.lab.samples);
        read(l, "tolerance", "lab", c.lab.tolerance);
    }
    read(j, "seed", "config", c.seed);
    read(j, "threads", "config", c.threads);
    read(j, "output_dir", "config", c.output_dir);
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw IntegrityError("SHA-256 failed");
    }
    std::ostringstream out;
    out << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
    return out.str();
}

}  // namespace roughpam
