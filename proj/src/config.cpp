#include "bjj/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include <openssl/evp.h>

#include "bjj/error.hpp"

namespace bjj {

using nlohmann::json;

namespace {

/// One JSON object of the config; tracks which keys were read so leftovers
/// can be rejected.
class Section {
public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* get(const std::string& key) {
        used_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    const json& require(const std::string& key) {
        const json* v = get(key);
        if (!v) throw ConfigError(field(key), "required key missing");
        return *v;
    }

    double number(const std::string& key, double fallback) {
        const json* v = get(key);
        return v ? as_number(*v, field(key)) : fallback;
    }

    std::size_t count(const std::string& key, std::size_t fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_number_integer() || v->get<long long>() < 0)
            throw ConfigError(field(key), "expected a non-negative integer");
        return v->get<std::size_t>();
    }

    bool flag(const std::string& key, bool fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
        return v->get<bool>();
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        if (!v->is_string()) throw ConfigError(field(key), "expected a string");
        return v->get<std::string>();
    }

    /// A number or a list of numbers.
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        return as_numbers(*v, field(key));
    }

    double quantity(const std::string& key, Dimension dim) { return to_internal(parse_quantity(require(key), field(key)), dim, field(key)); }

    std::optional<double> optional_quantity(const std::string& key, Dimension dim) {
        const json* v = get(key);
        if (!v) return std::nullopt;
        return to_internal(parse_quantity(*v, field(key)), dim, field(key));
    }

    double quantity_or(const std::string& key, Dimension dim, double fallback) {
        return optional_quantity(key, dim).value_or(fallback);
    }

    /// Angles accept "rad" and "deg"; value may be a list.
    std::vector<double> angles(const std::string& key, std::vector<double> fallback) {
        const json* v = get(key);
        if (!v) return fallback;
        const std::string f = field(key);
        if (!v->is_object()) throw ConfigError(f, "expected {\"value\": ..., \"unit\": \"rad\" | \"deg\"}");
        check_quantity_keys(*v, f);
        const std::string unit = (*v)["unit"].get<std::string>();
        double scale = 1.0;
        if (unit == "deg") scale = constants::pi / 180.0;
        else if (unit != "rad") throw ConfigError(f, "unknown unit \"" + unit + "\" (allowed: rad, deg)");
        std::vector<double> out = as_numbers((*v)["value"], f + ".value");
        for (double& a : out) a *= scale;
        return out;
    }

    Section child(const std::string& key) {
        const json* v = get(key);
        static const json empty = json::object();
        return Section(v ? *v : empty, field(key));
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!used_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }

private:
    static double as_number(const json& v, const std::string& f) {
        if (!v.is_number()) throw ConfigError(f, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(f, "must be finite");
        return d;
    }

    static std::vector<double> as_numbers(const json& v, const std::string& f) {
        if (v.is_number()) return {as_number(v, f)};
        if (!v.is_array()) throw ConfigError(f, "expected a number or a list of numbers");
        std::vector<double> out;
        for (const auto& e : v) out.push_back(as_number(e, f));
        return out;
    }

    static void check_quantity_keys(const json& v, const std::string& f) {
        for (auto it = v.begin(); it != v.end(); ++it)
            if (it.key() != "value" && it.key() != "unit") throw ConfigError(f + "." + it.key(), "unknown key");
        if (!v.contains("value")) throw ConfigError(f + ".value", "required key missing");
        if (!v.contains("unit") || !v["unit"].is_string()) throw ConfigError(f + ".unit", "expected a unit string");
    }

    static Quantity parse_quantity(const json& v, const std::string& f) {
        if (!v.is_object()) throw ConfigError(f, "expected {\"value\": number, \"unit\": string}");
        check_quantity_keys(v, f);
        return Quantity{as_number(v["value"], f + ".value"), v["unit"].get<std::string>()};
    }

    const json& obj_;
    std::string path_;
    std::set<std::string> used_;
};

const std::set<std::string> known_models{"TMS", "JGP", "TMGP", "GPE"};

TrapConfig parse_trap(Section s) {
    TrapConfig t;
    const json* n = s.get("atom_number");
    if (!n) throw ConfigError(s.field("atom_number"), "required key missing");
    if (n->is_number()) t.atom_number = n->get<double>();
    else t.atom_number = s.quantity("atom_number", Dimension::count);
    t.scattering_length = s.quantity("scattering_length", Dimension::scattering_length);
    t.primary_depth = s.quantity("primary_depth", Dimension::energy);
    t.secondary_depth = s.quantity("secondary_depth", Dimension::energy);
    t.primary_period = s.quantity_or("primary_period", Dimension::length, t.primary_period);
    t.secondary_period = s.quantity_or("secondary_period", Dimension::length, t.secondary_period);
    t.radial_frequency = s.quantity("radial_frequency", Dimension::angular_frequency);
    t.tilt = s.quantity_or("tilt", Dimension::tilt, 0.0);
    t.imprint_duration = s.optional_quantity("imprint_duration", Dimension::time);
    t.well_gap = s.optional_quantity("well_gap", Dimension::energy);
    s.finish();
    t.validate();
    return t;
}

GridSpec parse_grid(Section s) {
    GridSpec g;
    g.x_min = s.quantity_or("x_min", Dimension::length, g.x_min);
    g.x_max = s.quantity_or("x_max", Dimension::length, g.x_max);
    g.n_points = s.count("n_points", g.n_points);
    s.finish();
    try {
        (void)g.build();
    } catch (const GridError& e) {
        throw ConfigError("grid", e.what());
    }
    return g;
}

SolverSettings parse_solver(Section s) {
    SolverSettings o;
    o.imaginary_step = s.quantity_or("imaginary_step", Dimension::time, o.imaginary_step);
    o.energy_tolerance = s.quantity_or("energy_tolerance", Dimension::energy, o.energy_tolerance);
    o.residual_tolerance = s.number("residual_tolerance", o.residual_tolerance);
    o.max_iterations = s.count("max_iterations", o.max_iterations);
    const std::string kinetic = s.text("kinetic", "spectral");
    if (kinetic == "spectral") o.kinetic = KineticModel::spectral;
    else if (kinetic == "finite_difference") o.kinetic = KineticModel::finite_difference;
    else throw ConfigError(s.field("kinetic"), "expected \"spectral\" or \"finite_difference\"");
    s.finish();
    if (!(o.imaginary_step > 0.0)) throw ConfigError(s.field("imaginary_step"), "must be > 0");
    if (!(o.energy_tolerance > 0.0)) throw ConfigError(s.field("energy_tolerance"), "must be > 0");
    if (!(o.residual_tolerance > 0.0)) throw ConfigError(s.field("residual_tolerance"), "must be > 0");
    if (o.max_iterations == 0) throw ConfigError(s.field("max_iterations"), "must be > 0");
    return o;
}

RunSpec parse_run(Section s) {
    RunSpec r;
    r.label = s.text("label", "");
    if (const json* m = s.get("models")) {
        if (!m->is_array()) throw ConfigError(s.field("models"), "expected a list of model names");
        for (const auto& e : *m) {
            if (!e.is_string() || !known_models.count(e.get<std::string>()))
                throw ConfigError(s.field("models"), "unknown model " + e.dump() + " (allowed: TMS, JGP, TMGP, GPE)");
            r.models.push_back(e.get<std::string>());
        }
    }
    r.z0 = s.numbers("z0", {});
    const auto phi0 = s.angles("phi0", {0.0});
    if (phi0.size() != 1) throw ConfigError(s.field("phi0"), "expected a single angle");
    r.phi0 = phi0.front();
    r.lambda = s.numbers("lambda", {});
    const std::string mode = s.text("sweep_mode", "tunneling");
    if (mode == "tunneling") r.sweep_mode = SweepMode::tunneling;
    else if (mode == "fixed_barrier") r.sweep_mode = SweepMode::fixed_barrier;
    else throw ConfigError(s.field("sweep_mode"), "expected \"tunneling\" or \"fixed_barrier\"");
    r.barrier_margin = s.number("barrier_margin", r.barrier_margin);
    r.secondary_depth_step = s.number("secondary_depth_step", r.secondary_depth_step);
    r.rabi_target = s.optional_quantity("rabi_target", Dimension::angular_frequency);
    r.lambda_tolerance = s.number("lambda_tolerance", r.lambda_tolerance);
    r.periods = s.number("periods", r.periods);
    r.samples_per_period = s.count("samples_per_period", r.samples_per_period);
    r.rk4_steps_per_period = s.count("rk4_steps_per_period", r.rk4_steps_per_period);
    r.dt = s.quantity_or("dt", Dimension::time, r.dt);
    r.t_end = s.optional_quantity("t_end", Dimension::time);
    r.delta = s.angles("delta", {});
    r.band_z0 = s.numbers("band_z0", r.band_z0);
    r.boundary_tolerance = s.number("boundary_tolerance", r.boundary_tolerance);
    r.gpe_boundary = s.flag("gpe_boundary", r.gpe_boundary);
    r.prep_tolerance = s.number("prep_tolerance", r.prep_tolerance);
    const std::string readout = s.text("readout", "auto");
    if (readout == "auto") r.readout = ReadoutChoice::automatic;
    else if (readout == "projection") r.readout = ReadoutChoice::projection;
    else if (readout == "density") r.readout = ReadoutChoice::density;
    else throw ConfigError(s.field("readout"), "expected \"auto\", \"projection\" or \"density\"");
    r.snapshot_every = s.count("snapshot_every", r.snapshot_every);
    r.write_trajectories = s.flag("write_trajectories", r.write_trajectories);
    r.solver = parse_solver(s.child("solver"));
    s.finish();

    for (double z : r.z0)
        if (!(std::abs(z) < 1.0)) throw ConfigError(s.field("z0"), "every z0 must satisfy |z0| < 1");
    for (double z : r.band_z0)
        if (!(std::abs(z) < 1.0)) throw ConfigError(s.field("band_z0"), "every entry must satisfy |z0| < 1");
    if (!(r.barrier_margin >= 1.0)) throw ConfigError(s.field("barrier_margin"), "must be >= 1");
    if (!(r.secondary_depth_step > 1.0)) throw ConfigError(s.field("secondary_depth_step"), "must be > 1");
    if (!(r.lambda_tolerance > 0.0 && r.lambda_tolerance <= 5e-3))
        throw ConfigError(s.field("lambda_tolerance"), "must lie in (0, 0.005]");
    if (!(r.periods >= 4.0)) throw ConfigError(s.field("periods"), "frequency fits need >= 4 periods");
    if (r.samples_per_period < 32) throw ConfigError(s.field("samples_per_period"), "must be >= 32");
    if (r.rk4_steps_per_period < r.samples_per_period)
        throw ConfigError(s.field("rk4_steps_per_period"), "must be >= samples_per_period");
    if (!(r.dt > 0.0)) throw ConfigError(s.field("dt"), "must be > 0");
    if (r.t_end && !(*r.t_end > 0.0)) throw ConfigError(s.field("t_end"), "must be > 0");
    if (!(r.boundary_tolerance > 0.0)) throw ConfigError(s.field("boundary_tolerance"), "must be > 0");
    if (!(r.prep_tolerance > 0.0)) throw ConfigError(s.field("prep_tolerance"), "must be > 0");
    return r;
}

}  // namespace

RunConfig parse_config(const json& doc) {
    Section root(doc, "");
    RunConfig cfg;
    cfg.trap = parse_trap(Section(root.require("trap"), "trap"));
    cfg.grid = parse_grid(root.child("grid"));
    cfg.run = parse_run(root.child("run"));
    root.finish();
    cfg.source = doc;
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("--config", "cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json describe(const RunConfig& cfg) {
    const UnitSystem& u = units();
    const TrapConfig& t = cfg.trap;
    json out;
    out["units"] = {{"energy_hz", u.energy_hz()}, {"time_ms", u.time_to_ms(1.0)}, {"length_um", 1.0}};
    out["trap"] = {
        {"atom_number", t.atom_number},
        {"scattering_length", t.scattering_length},
        {"scattering_length_a0", u.length_to_bohr(t.scattering_length)},
        {"primary_depth", t.primary_depth},
        {"primary_depth_hz", u.energy_to_hz(t.primary_depth)},
        {"secondary_depth", t.secondary_depth},
        {"secondary_depth_hz", u.energy_to_hz(t.secondary_depth)},
        {"primary_period", t.primary_period},
        {"secondary_period", t.secondary_period},
        {"radial_frequency", t.radial_frequency},
        {"radial_frequency_hz", u.angular_to_hz(t.radial_frequency)},
        {"tilt", t.tilt},
        {"coupling_1d", t.coupling_1d()},
        {"interaction_strength", t.interaction_strength()},
    };
    if (t.imprint_duration) out["trap"]["imprint_duration"] = *t.imprint_duration;
    if (t.well_gap) out["trap"]["well_gap"] = *t.well_gap;
    out["grid"] = {{"x_min", cfg.grid.x_min}, {"x_max", cfg.grid.x_max}, {"n_points", cfg.grid.n_points},
                   {"dx", (cfg.grid.x_max - cfg.grid.x_min) / static_cast<double>(cfg.grid.n_points)}};
    const RunSpec& r = cfg.run;
    out["run"] = {{"label", r.label}, {"models", r.models}, {"z0", r.z0}, {"phi0", r.phi0},
                  {"lambda", r.lambda}, {"dt", r.dt}, {"periods", r.periods},
                  {"sweep_mode", r.sweep_mode == SweepMode::tunneling ? "tunneling" : "fixed_barrier"}};
    if (r.rabi_target) out["run"]["rabi_target_hz"] = u.angular_to_hz(*r.rabi_target);
    if (r.t_end) out["run"]["t_end"] = *r.t_end;
    if (!r.delta.empty()) out["run"]["delta"] = r.delta;
    out["run"]["solver"] = {{"imaginary_step", r.solver.imaginary_step},
                            {"energy_tolerance", r.solver.energy_tolerance},
                            {"residual_tolerance", r.solver.residual_tolerance},
                            {"max_iterations", r.solver.max_iterations},
                            {"kinetic", r.solver.kinetic == KineticModel::spectral ? "spectral" : "finite_difference"}};
    return out;
}

json config_schema() {
    const json energy = {"internal", "Hz", "kHz", "nK"};
    const json length = {"internal", "um", "nm"};
    const json time = {"internal", "ms", "s"};
    auto q = [](const char* dim, const json& unit_list, bool required) {
        return json{{"type", "quantity"}, {"dimension", dim}, {"units", unit_list}, {"required", required}};
    };
    json s;
    s["trap"] = {
        {"atom_number", {{"type", "number or quantity"}, {"units", {"1"}}, {"required", true}}},
        {"scattering_length", q("scattering_length", {"internal", "a0", "nm"}, true)},
        {"primary_depth", q("energy", energy, true)},
        {"secondary_depth", q("energy", energy, true)},
        {"primary_period", q("length", length, false)},
        {"secondary_period", q("length", length, false)},
        {"radial_frequency", q("angular_frequency", {"internal", "Hz", "rad/s"}, true)},
        {"tilt", q("tilt", {"internal", "Hz/um", "nK/um"}, false)},
        {"imprint_duration", q("time", time, false)},
        {"well_gap", q("energy", energy, false)},
    };
    s["grid"] = {{"x_min", q("length", length, false)},
                 {"x_max", q("length", length, false)},
                 {"n_points", {{"type", "integer"}, {"constraint", "power of two >= 64"}}}};
    s["run"] = {
        {"label", {{"type", "string"}}},
        {"models", {{"type", "list"}, {"values", {"TMS", "JGP", "TMGP", "GPE"}}}},
        {"z0", {{"type", "number or list"}}},
        {"phi0", {{"type", "angle"}, {"units", {"rad", "deg"}}}},
        {"lambda", {{"type", "number or list"}}},
        {"sweep_mode", {{"type", "string"}, {"values", {"tunneling", "fixed_barrier"}}}},
        {"barrier_margin", {{"type", "number"}}},
        {"secondary_depth_step", {{"type", "number"}}},
        {"rabi_target", q("angular_frequency", {"internal", "Hz", "rad/s"}, false)},
        {"lambda_tolerance", {{"type", "number"}}},
        {"periods", {{"type", "number"}}},
        {"samples_per_period", {{"type", "integer"}}},
        {"rk4_steps_per_period", {{"type", "integer"}}},
        {"dt", q("time", time, false)},
        {"t_end", q("time", time, false)},
        {"delta", {{"type", "angle or angle list"}, {"units", {"rad", "deg"}}}},
        {"band_z0", {{"type", "list"}}},
        {"boundary_tolerance", {{"type", "number"}}},
        {"gpe_boundary", {{"type", "boolean"}}},
        {"prep_tolerance", {{"type", "number"}}},
        {"readout", {{"type", "string"}, {"values", {"auto", "projection", "density"}}}},
        {"snapshot_every", {{"type", "integer"}}},
        {"write_trajectories", {{"type", "boolean"}}},
        {"solver",
         {{"imaginary_step", q("time", time, false)},
          {"energy_tolerance", q("energy", energy, false)},
          {"residual_tolerance", {{"type", "number"}}},
          {"max_iterations", {{"type", "integer"}}},
          {"kinetic", {{"type", "string"}, {"values", {"spectral", "finite_difference"}}}}}},
    };
    return s;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string content_hash(const json& doc) { return sha256_hex(doc.dump()); }

}  // namespace bjj
