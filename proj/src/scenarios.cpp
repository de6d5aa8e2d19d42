#include "bjj/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "bjj/error.hpp"

namespace bjj {

namespace {

constexpr double two_pi = 2.0 * constants::pi;

struct ModelChoice {
    std::string name;
    std::optional<ModelVariant> variant;  // empty for GPE
};

std::vector<ModelChoice> models_of(const RunSpec& run, std::vector<std::string> fallback, bool allow_gpe = true) {
    const auto& names = run.models.empty() ? fallback : run.models;
    std::vector<ModelChoice> out;
    for (const auto& n : names) {
        if (n == "GPE") {
            if (!allow_gpe) throw SpecError("model GPE is not available for this command");
            out.push_back({n, std::nullopt});
        } else {
            out.push_back({n, parse_variant(n)});
        }
    }
    return out;
}

int model_rank(const std::string& m) {
    static const std::map<std::string, int> rank{{"TMS", 0}, {"JGP", 1}, {"TMGP", 2}, {"GPE", 3}};
    auto it = rank.find(m);
    return it == rank.end() ? 4 : it->second;
}

ResultRow base_row(const std::string& scenario, const std::string& param, double value, const std::string& model,
                   const Junction& j) {
    ResultRow r;
    r.scenario = scenario;
    r.sweep_param = param;
    r.sweep_value = value;
    r.model = model;
    r.lambda = j.params.lambda();
    r.scattering_length = j.cfg.scattering_length;
    r.secondary_depth = j.cfg.secondary_depth;
    r.two_k = j.params.two_k();
    r.chemical_potential = j.params.chemical_potential;
    r.barrier_height = j.params.barrier_height;
    r.tunneling = j.params.tunneling();
    if (model == "TMS") {
        // TMS rows carry the scale of the linear modes they run on.
        r.two_k = j.linear_params.two_k();
        r.lambda = j.linear_params.lambda();
    }
    return r;
}

void fill_measurement(ResultRow& r, const Measurement& m) {
    r.status = m.status;
    if (m.fit) {
        r.omega = m.fit->omega;
        r.amplitude = m.fit->amplitude;
        r.offset = m.fit->offset;
        r.fit_residual = m.fit->residual;
    }
    if (!m.z.empty()) {
        double sum = 0.0, lo = m.z.front(), peak = 0.0;
        for (double z : m.z) {
            sum += z;
            lo = std::min(lo, z);
            peak = std::max(peak, std::abs(z));
        }
        r.mean_z = sum / static_cast<double>(m.z.size());
        r.min_z = lo;
        r.max_abs_z = peak;
        r.phase_advance = m.phi.back() - m.phi.front();
    }
    if (m.model == "GPE") {
        r.leakage_max = m.leakage_max;
        r.energy_drift = m.energy_drift;
    } else {
        r.energy_drift = m.energy_drift;
    }
}

std::optional<double> formula_frequency(const TwoModeCoefficients& c, ModelVariant v) {
    try {
        return plasma_frequency(c, v);
    } catch (const PastCriticalError&) {
        return std::nullopt;
    }
}

Regime trajectory_regime(const std::vector<double>& z) {
    for (std::size_t i = 1; i < z.size(); ++i)
        if (z[i - 1] * z[i] <= 0.0 && z[i - 1] != z[i]) return Regime::oscillating;
    return Regime::self_trapped;
}

TrajectoryDump dump_of(const std::string& name, const Measurement& m) {
    return TrajectoryDump{name, m.model, m.t, m.z, m.phi, m.energy};
}

/// Shared preamble: secondary depth from a Rabi target when requested.
TrapConfig resolved_trap(const RunConfig& cfg, const Grid& grid) {
    TrapConfig trap = cfg.trap;
    if (cfg.run.rabi_target)
        trap.secondary_depth = find_secondary_depth(trap, grid, *cfg.run.rabi_target, cfg.run.solver.kinetic);
    return trap;
}

Junction junction_for(const RunConfig& cfg, const Grid& grid, ScenarioContext& ctx) {
    const TrapConfig trap = resolved_trap(cfg, grid);
    if (!cfg.run.lambda.empty()) return tune_lambda(trap, grid, cfg.run.lambda.front(), cfg.run.lambda_tolerance, ctx);
    return build_junction(trap, grid, ctx);
}

nlohmann::json junction_summary(const Junction& j) {
    const UnitSystem& u = units();
    nlohmann::json s = {
        {"lambda", j.params.lambda()},
        {"scattering_length_a0", u.length_to_bohr(j.cfg.scattering_length)},
        {"secondary_depth_hz", u.energy_to_hz(j.cfg.secondary_depth)},
        {"two_k_hz", u.energy_to_hz(j.params.two_k())},
        {"nu_hz", u.energy_to_hz(j.params.nu())},
        {"chemical_potential_hz", u.energy_to_hz(j.params.chemical_potential)},
        {"barrier_height_hz", u.energy_to_hz(j.params.barrier_height)},
        {"tunneling", j.params.tunneling()},
    };
    return s;
}

void require_no_interaction(const RunConfig& cfg, const char* scenario) {
    if (cfg.trap.scattering_length != 0.0)
        throw SpecError(std::string(scenario) + " requires trap.scattering_length = 0");
    if (!cfg.run.lambda.empty()) throw SpecError(std::string(scenario) + " does not take run.lambda");
}

void require_sorted(const std::vector<double>& v, const char* field) {
    if (!std::is_sorted(v.begin(), v.end())) throw ConfigError(field, "sweep values must be sorted ascending");
    if (std::adjacent_find(v.begin(), v.end()) != v.end()) throw ConfigError(field, "sweep values must be distinct");
}

std::string fmt(double v) { return format_shortest(v); }
std::string fmt(const std::optional<double>& v) { return v ? format_shortest(*v) : std::string(); }

}  // namespace

void sort_rows(std::vector<ResultRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
        return model_rank(a.model) < model_rank(b.model);
    });
}

CsvTable results_table(const std::vector<ResultRow>& rows) {
    const UnitSystem& u = units();
    CsvTable t({"scenario", "sweep_param", "sweep_value", "model", "z0", "phi0_rad", "lambda", "a_s_a0",
                "v_s_hz", "two_k_hz", "omega_hz", "omega_over_rabi", "formula_omega_hz", "formula_omega_over_rabi",
                "amplitude", "offset", "fit_residual", "band_lo_over_rabi", "band_hi_over_rabi", "regime", "z_c",
                "z_c_renormalized", "mean_z", "min_z", "max_abs_z", "mean_phi_rad", "phase_advance_rad",
                "phase_2pi_periods", "mu_hz", "v0_hz", "tunneling", "leakage_max", "energy_drift", "status"});
    auto hz = [&](const std::optional<double>& w) -> std::optional<double> {
        if (!w) return std::nullopt;
        return u.angular_to_hz(*w);
    };
    auto per_rabi = [](const std::optional<double>& w, double two_k) -> std::optional<double> {
        if (!w || two_k == 0.0) return std::nullopt;
        return *w / two_k;
    };
    for (const auto& r : rows) {
        t.add_row({r.scenario, r.sweep_param, fmt(r.sweep_value), r.model, fmt(r.z0), fmt(r.phi0), fmt(r.lambda),
                   fmt(u.length_to_bohr(r.scattering_length)), fmt(u.energy_to_hz(r.secondary_depth)),
                   fmt(u.energy_to_hz(r.two_k)), fmt(hz(r.omega)), fmt(per_rabi(r.omega, r.two_k)),
                   fmt(hz(r.formula_omega)), fmt(per_rabi(r.formula_omega, r.two_k)), fmt(r.amplitude),
                   fmt(r.offset), fmt(r.fit_residual), fmt(r.band_lo), fmt(r.band_hi), r.regime, fmt(r.z_c),
                   fmt(r.z_c_renormalized), fmt(r.mean_z), fmt(r.min_z), fmt(r.max_abs_z), fmt(r.mean_phi),
                   fmt(r.phase_advance), fmt(r.phase_2pi_periods), fmt(u.energy_to_hz(r.chemical_potential)),
                   fmt(u.energy_to_hz(r.barrier_height)), r.tunneling ? "true" : "false", fmt(r.leakage_max),
                   fmt(r.energy_drift), r.status});
    }
    return t;
}

CsvTable trajectory_table(const TrajectoryDump& d) {
    const UnitSystem& u = units();
    CsvTable t({"t_ms", "z", "phi_rad", "energy_internal", "model_variant"});
    for (std::size_t i = 0; i < d.t.size(); ++i)
        t.add_row({format_digits17(u.time_to_ms(d.t[i])), format_digits17(d.z[i]), format_digits17(d.phi[i]),
                   format_digits17(d.energy[i]), d.variant});
    return t;
}

CsvTable snapshot_table(const SnapshotDump& d) {
    const UnitSystem& u = units();
    CsvTable t({"t_ms", "x_um", "re_psi", "im_psi"});
    for (std::size_t s = 0; s < d.fields.size(); ++s)
        for (std::size_t j = 0; j < d.x.size(); ++j)
            t.add_row({format_digits17(u.time_to_ms(d.times[s])), format_digits17(d.x[j]),
                       format_digits17(d.fields[s][j].real()), format_digits17(d.fields[s][j].imag())});
    return t;
}

std::vector<std::string> write_outputs(const ScenarioResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> files;
    auto emit = [&](const std::string& name, const CsvTable& t) {
        t.write(dir / name);
        files.push_back(name);
    };
    if (!r.rows.empty()) emit(r.scenario + ".csv", results_table(r.rows));
    for (const auto& [name, table] : r.extra_tables) emit(r.scenario + "_" + name + ".csv", table);
    for (const auto& d : r.trajectories) emit(r.scenario + "_" + d.name + ".csv", trajectory_table(d));
    for (const auto& s : r.snapshots) emit(r.scenario + "_" + s.name + "_snapshots.csv", snapshot_table(s));
    return files;
}

ScenarioResult run_stationary(const RunConfig& cfg, ScenarioContext& ctx) {
    const UnitSystem& u = units();
    const Grid grid = cfg.grid.build();
    ScenarioResult out;
    out.scenario = "stationary";

    if (cfg.trap.tilt != 0.0) {
        // Tilted trap: only the ground state is defined.
        const Potential pot = build_potential(cfg.trap, grid);
        const StationaryState g = ctx.solve(cfg.trap, grid, pot, Parity::even);
        CsvTable modes({"x_um", "potential_hz", "psi_ground"});
        for (std::size_t i = 0; i < grid.size(); ++i)
            modes.add_row({format_digits17(grid[i]), format_digits17(u.energy_to_hz(pot[i])), format_digits17(g.psi[i])});
        out.extra_tables.emplace_back("modes", std::move(modes));
        out.summary = {{"ground_energy_hz", u.energy_to_hz(g.energy)},
                       {"chemical_potential_hz", u.energy_to_hz(g.chemical_potential)},
                       {"residual", g.residual}};
        return out;
    }

    const Junction j = junction_for(cfg, grid, ctx);
    CsvTable modes({"x_um", "potential_hz", "psi_ground", "psi_excited", "psi_left", "psi_right",
                    "psi_ground_linear", "psi_excited_linear"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        modes.add_row({format_digits17(grid[i]), format_digits17(u.energy_to_hz(j.potential[i])),
                       format_digits17(j.modes.ground[i]), format_digits17(j.modes.excited[i]),
                       format_digits17(j.modes.left[i]), format_digits17(j.modes.right[i]),
                       format_digits17(j.linear_modes.ground[i]), format_digits17(j.linear_modes.excited[i])});

    const JunctionParams& p = j.params;
    CsvTable params({"quantity", "value", "unit"});
    auto add = [&](const std::string& name, double v, const std::string& unit) {
        params.add_row({name, format_shortest(v), unit});
    };
    auto add_hz = [&](const std::string& name, double e) { add(name, u.energy_to_hz(e), "Hz"); };
    add("scattering_length", u.length_to_bohr(j.cfg.scattering_length), "a0");
    add_hz("secondary_depth", j.cfg.secondary_depth);
    add_hz("e0", p.e0);
    add_hz("k", p.k);
    add_hz("two_k", p.two_k());
    add_hz("u", p.u);
    add_hz("nu", p.nu());
    add_hz("i2", p.i2);
    add_hz("i3", p.i3);
    add_hz("ni2", p.ni2());
    add_hz("ni3", p.ni3());
    add("lambda", p.lambda(), "1");
    add("omega_rabi", u.angular_to_hz(p.rabi_frequency()), "Hz");
    if (auto w = p.josephson_frequency()) add("omega_josephson", u.angular_to_hz(*w), "Hz");
    if (auto z = p.critical_imbalance()) add("z_c", *z, "1");
    add_hz("chemical_potential", p.chemical_potential);
    add_hz("barrier_height", p.barrier_height);
    add("tunneling", p.tunneling() ? 1.0 : 0.0, "bool");
    add("well_frequency", u.angular_to_hz(p.well_frequency), "Hz");
    add("oscillator_length", p.oscillator_length, "um");
    add_hz("ground_energy", p.ground_energy);
    add_hz("excited_energy", p.excited_energy);
    add_hz("renormalization_mismatch", p.renormalization_mismatch);
    add("renormalization_mismatch_relative", p.renormalization_mismatch / (p.excited_energy - p.ground_energy), "1");
    add("left_fraction", j.modes.left_fraction, "1");
    add_hz("tms_two_k", j.linear_params.two_k());
    add("tms_lambda", j.linear_params.lambda(), "1");
    out.extra_tables.emplace_back("modes", std::move(modes));
    out.extra_tables.emplace_back("junction", std::move(params));
    out.summary = junction_summary(j);
    return out;
}

ScenarioResult run_evolve_two_mode(const RunConfig& cfg, ScenarioContext& ctx) {
    const Grid grid = cfg.grid.build();
    const auto models = models_of(cfg.run, {"JGP"}, false);
    if (cfg.run.z0.empty()) throw SpecError("evolve-2mode needs run.z0");
    const Junction j = junction_for(cfg, grid, ctx);
    ScenarioResult out;
    out.scenario = "evolve_2mode";
    out.summary = junction_summary(j);
    for (std::size_t k = 0; k < cfg.run.z0.size(); ++k) {
        const double z0 = cfg.run.z0[k];
        for (const auto& m : models) {
            const Measurement meas = measure_two_mode(j, *m.variant, z0, cfg.run.phi0, cfg.run, cfg.run.t_end);
            ResultRow r = base_row(out.scenario, "z0", z0, m.name, j);
            r.z0 = z0;
            r.phi0 = cfg.run.phi0;
            fill_measurement(r, meas);
            const TwoModeCoefficients c = j.coefficients(*m.variant);
            r.formula_omega = formula_frequency(c, *m.variant);
            r.regime = to_string(classify_regime({z0, cfg.run.phi0}, c));
            r.z_c = critical_imbalance(c, *m.variant);
            out.rows.push_back(r);
            if (cfg.run.write_trajectories) out.trajectories.push_back(dump_of(m.name + "_z" + std::to_string(k), meas));
        }
    }
    sort_rows(out.rows);
    return out;
}

ScenarioResult run_evolve_gpe(const RunConfig& cfg, ScenarioContext& ctx) {
    const Grid grid = cfg.grid.build();
    if (cfg.run.z0.empty()) throw SpecError("evolve-gpe needs run.z0");
    if (!cfg.run.models.empty() && cfg.run.models != std::vector<std::string>{"GPE"})
        throw SpecError("evolve-gpe runs the GPE only; drop run.models or set it to [\"GPE\"]");
    const Junction j = junction_for(cfg, grid, ctx);
    ScenarioResult out;
    out.scenario = "evolve_gpe";
    out.summary = junction_summary(j);
    const auto results = parallel_map<Measurement>(cfg.run.z0.size(), ctx.threads(), [&](std::size_t k) {
        return measure_gpe(j, grid, cfg.run.z0[k], cfg.run.phi0, cfg.run, ctx, cfg.run.t_end);
    });
    for (std::size_t k = 0; k < results.size(); ++k) {
        const Measurement& meas = results[k];
        ResultRow r = base_row(out.scenario, "z0", cfg.run.z0[k], "GPE", j);
        r.z0 = meas.z0;
        r.phi0 = cfg.run.phi0;
        fill_measurement(r, meas);
        r.regime = to_string(trajectory_regime(meas.z));
        out.rows.push_back(r);
        const std::string name = "GPE_z" + std::to_string(k);
        if (cfg.run.write_trajectories) out.trajectories.push_back(dump_of(name, meas));
        if (!meas.snapshots.empty()) {
            SnapshotDump s{name, std::vector<double>(grid.x().begin(), grid.x().end()), meas.snapshot_times,
                           meas.snapshots};
            out.snapshots.push_back(std::move(s));
        }
    }
    sort_rows(out.rows);
    return out;
}

ScenarioResult run_rabi(const RunConfig& cfg, ScenarioContext& ctx) {
    require_no_interaction(cfg, "rabi");
    if (cfg.run.z0.empty()) throw SpecError("rabi needs run.z0");
    const Grid grid = cfg.grid.build();
    const auto models = models_of(cfg.run, {"TMS", "GPE"});
    const Junction j = build_junction(resolved_trap(cfg, grid), grid, ctx);

    struct Item {
        std::size_t z_index;
        ModelChoice model;
    };
    std::vector<Item> items;
    for (std::size_t k = 0; k < cfg.run.z0.size(); ++k)
        for (const auto& m : models) items.push_back({k, m});
    const auto results = parallel_map<Measurement>(items.size(), ctx.threads(), [&](std::size_t i) {
        const Item& it = items[i];
        const double z0 = cfg.run.z0[it.z_index];
        if (it.model.variant) return measure_two_mode(j, *it.model.variant, z0, cfg.run.phi0, cfg.run);
        return measure_gpe(j, grid, z0, cfg.run.phi0, cfg.run, ctx);
    });

    ScenarioResult out;
    out.scenario = "rabi";
    out.summary = junction_summary(j);
    for (std::size_t i = 0; i < items.size(); ++i) {
        const double z0 = cfg.run.z0[items[i].z_index];
        ResultRow r = base_row(out.scenario, "z0", z0, items[i].model.name, j);
        r.z0 = results[i].z0;
        r.phi0 = cfg.run.phi0;
        fill_measurement(r, results[i]);
        r.formula_omega = j.params.rabi_frequency();
        r.regime = to_string(trajectory_regime(results[i].z));
        out.rows.push_back(r);
        if (cfg.run.write_trajectories)
            out.trajectories.push_back(dump_of(items[i].model.name + "_z" + std::to_string(items[i].z_index), results[i]));
    }
    sort_rows(out.rows);
    return out;
}

ScenarioResult run_pi_phase(const RunConfig& cfg, ScenarioContext& ctx) {
    require_no_interaction(cfg, "pi-phase");
    const Grid grid = cfg.grid.build();
    const auto models = models_of(cfg.run, {"TMS", "GPE"});
    const std::vector<double> deltas = cfg.run.delta.empty() ? std::vector<double>{0.3} : cfg.run.delta;
    require_sorted(deltas, "run.delta");
    const Junction j = build_junction(resolved_trap(cfg, grid), grid, ctx);

    struct Item {
        double delta;
        double center;  // pi or 0
        ModelChoice model;
    };
    std::vector<Item> items;
    for (double d : deltas)
        for (double center : {constants::pi, 0.0})
            for (const auto& m : models) items.push_back({d, center, m});
    // A fixed run length per point keeps the pi and zero branches comparable
    // and lets the stationary delta = 0 case finish.
    const double t_end = cfg.run.t_end.value_or(cfg.run.periods * two_pi / j.params.rabi_frequency());
    const auto results = parallel_map<Measurement>(items.size(), ctx.threads(), [&](std::size_t i) {
        const Item& it = items[i];
        const double phi0 = it.center + it.delta;
        if (it.model.variant) return measure_two_mode(j, *it.model.variant, 0.0, phi0, cfg.run, t_end);
        return measure_gpe(j, grid, 0.0, phi0, cfg.run, ctx, t_end);
    });

    ScenarioResult out;
    out.scenario = "pi_phase";
    out.summary = junction_summary(j);
    for (std::size_t i = 0; i < items.size(); ++i) {
        const Item& it = items[i];
        const Measurement& m = results[i];
        ResultRow r = base_row(out.scenario, it.center == 0.0 ? "delta_zero_branch" : "delta", it.delta,
                               it.model.name, j);
        r.z0 = m.z0;
        r.phi0 = it.center + it.delta;
        fill_measurement(r, m);
        r.formula_omega = j.params.rabi_frequency();
        // Mean phase over whole periods when a period is known.
        std::size_t count = m.t.size();
        if (m.fit) {
            const double period = two_pi / m.fit->omega;
            const double span = std::floor(m.t.back() / period) * period;
            count = static_cast<std::size_t>(std::upper_bound(m.t.begin(), m.t.end(), span) - m.t.begin());
        }
        double sum = 0.0;
        for (std::size_t k = 0; k < count; ++k) sum += m.phi[k];
        const double mean = sum / static_cast<double>(std::max<std::size_t>(count, 1));
        r.mean_phi = it.center + std::remainder(mean - it.center, two_pi);
        if (r.status == "no_oscillation") r.regime = "stationary";
        else r.regime = to_string(trajectory_regime(m.z));
        out.rows.push_back(r);
        if (cfg.run.write_trajectories) {
            std::ostringstream name;
            name << it.model.name << (it.center == 0.0 ? "_zero_d" : "_pi_d") << std::distance(deltas.begin(), std::find(deltas.begin(), deltas.end(), it.delta));
            out.trajectories.push_back(dump_of(name.str(), m));
        }
    }
    std::stable_sort(out.rows.begin(), out.rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.sweep_param != b.sweep_param) return a.sweep_param < b.sweep_param;
        return false;
    });
    sort_rows(out.rows);
    return out;
}

ScenarioResult sweep_lambda(const RunConfig& cfg, ScenarioContext& ctx) {
    const RunSpec& run = cfg.run;
    if (run.lambda.empty()) throw SpecError("sweep-lambda needs run.lambda");
    require_sorted(run.lambda, "run.lambda");
    const Grid grid = cfg.grid.build();
    const auto models = models_of(run, {"TMS", "JGP", "TMGP", "GPE"});
    const double z0 = run.z0.empty() ? 0.05 : run.z0.front();
    const TrapConfig base = resolved_trap(cfg, grid);
    const bool fixed = run.sweep_mode == SweepMode::fixed_barrier;
    const std::string scenario = "sweep_lambda";

    auto tuned = [&](double target) {
        TrapConfig trap = base;
        for (int raise = 0; raise < 40; ++raise) {
            Junction j = tune_lambda(trap, grid, target, run.lambda_tolerance, ctx);
            if (fixed || j.params.barrier_height >= run.barrier_margin * j.params.chemical_potential) return j;
            trap.secondary_depth *= run.secondary_depth_step;
        }
        throw SpecError("tunneling condition unreachable at Lambda = " + format_shortest(target));
    };

    auto point = [&](double target) {
        std::vector<ResultRow> rows;
        if (target < -1.0) {
            for (const auto& m : models) {
                ResultRow r;
                r.scenario = scenario;
                r.sweep_param = "lambda";
                r.sweep_value = target;
                r.model = m.name;
                r.lambda = target;
                r.z0 = z0;
                r.status = "past_critical";
                rows.push_back(r);
            }
            return rows;
        }
        const Junction j = tuned(target);
        for (const auto& m : models) {
            ResultRow r = base_row(scenario, "lambda", target, m.name, j);
            r.z0 = z0;
            r.phi0 = run.phi0;
            if (m.variant) {
                const TwoModeCoefficients c = j.coefficients(*m.variant);
                r.formula_omega = formula_frequency(c, *m.variant);
                fill_measurement(r, measure_two_mode(j, *m.variant, z0, run.phi0, run));
                std::optional<double> lo, hi;
                for (double zb : run.band_z0) {
                    const Measurement b = measure_two_mode(j, *m.variant, zb, run.phi0, run);
                    if (!b.fit) continue;
                    const double w = b.fit->omega / r.two_k;
                    lo = lo ? std::min(*lo, w) : w;
                    hi = hi ? std::max(*hi, w) : w;
                }
                r.band_lo = lo;
                r.band_hi = hi;
                r.regime = to_string(classify_regime({z0, run.phi0}, c));
            } else {
                const Measurement g = measure_gpe(j, grid, z0, run.phi0, run, ctx);
                fill_measurement(r, g);
                r.z0 = g.z0;
                r.regime = to_string(trajectory_regime(g.z));
            }
            rows.push_back(r);
        }
        return rows;
    };

    // Where mu meets V0 at fixed barrier, as a Lambda value.
    auto crossing = [&]() {
        ResultRow r;
        r.scenario = scenario;
        r.sweep_param = "lambda";
        r.regime = "crossing";
        const double top = run.lambda.back();
        if (top <= 0.0) {
            r.status = "no_crossing";
            return std::vector<ResultRow>{r};
        }
        const Junction hi_j = tune_lambda(base, grid, top, run.lambda_tolerance, ctx);
        auto gap = [&](double a_s) {
            TrapConfig t = base;
            t.scattering_length = a_s;
            const Junction j = build_junction(t, grid, ctx);
            return j.params.chemical_potential - j.params.barrier_height;
        };
        const double g_lo = gap(0.0);
        const double g_hi = hi_j.params.chemical_potential - hi_j.params.barrier_height;
        if (g_lo >= 0.0 || g_hi <= 0.0) {
            r.status = "no_crossing";
            r.sweep_value = g_lo >= 0.0 ? 0.0 : top;
            return std::vector<ResultRow>{r};
        }
        std::uintmax_t iters = 60;
        const auto root = boost::math::tools::toms748_solve(gap, 0.0, hi_j.cfg.scattering_length, g_lo, g_hi,
                                                            boost::math::tools::eps_tolerance<double>(20), iters);
        TrapConfig t = base;
        t.scattering_length = 0.5 * (root.first + root.second);
        const Junction j = build_junction(t, grid, ctx);
        r = base_row(scenario, "lambda", j.params.lambda(), "", j);
        r.regime = "crossing";
        return std::vector<ResultRow>{r};
    };

    const std::size_t n = run.lambda.size() + (fixed ? 1 : 0);
    const auto chunks = parallel_map<std::vector<ResultRow>>(n, ctx.threads(), [&](std::size_t i) {
        return i < run.lambda.size() ? point(run.lambda[i]) : crossing();
    });
    ScenarioResult out;
    out.scenario = scenario;
    for (const auto& c : chunks) out.rows.insert(out.rows.end(), c.begin(), c.end());
    sort_rows(out.rows);
    out.summary = {{"sweep_mode", fixed ? "fixed_barrier" : "tunneling"},
                   {"secondary_depth_hz", units().energy_to_hz(base.secondary_depth)}};
    return out;
}

ScenarioResult sweep_z0(const RunConfig& cfg, ScenarioContext& ctx) {
    const RunSpec& run = cfg.run;
    if (run.lambda.empty()) throw SpecError("sweep-z0 needs a Lambda target in run.lambda");
    if (run.z0.empty()) throw SpecError("sweep-z0 needs run.z0");
    require_sorted(run.z0, "run.z0");
    for (double z : run.z0)
        if (!(z > 0.0 && z < 0.95)) throw ConfigError("run.z0", "sweep-z0 values must lie in (0, 0.95)");
    const Grid grid = cfg.grid.build();
    const auto models = models_of(run, {"JGP", "TMGP", "GPE"});
    const Junction j = junction_for(cfg, grid, ctx);
    const std::string scenario = "sweep_z0";

    struct Item {
        std::size_t z_index;
        ModelChoice model;
    };
    std::vector<Item> items;
    for (std::size_t k = 0; k < run.z0.size(); ++k)
        for (const auto& m : models) items.push_back({k, m});
    const auto ladder = parallel_map<ResultRow>(items.size(), ctx.threads(), [&](std::size_t i) {
        const Item& it = items[i];
        const double z0 = run.z0[it.z_index];
        ResultRow r = base_row(scenario, "z0", z0, it.model.name, j);
        r.z0 = z0;
        r.phi0 = run.phi0;
        if (it.model.variant) {
            const TwoModeCoefficients c = j.coefficients(*it.model.variant);
            fill_measurement(r, measure_two_mode(j, *it.model.variant, z0, run.phi0, run));
            r.formula_omega = formula_frequency(c, *it.model.variant);
            r.regime = to_string(classify_regime({z0, run.phi0}, c));
            r.z_c = critical_imbalance(c, *it.model.variant);
            if (*it.model.variant == ModelVariant::tmgp) r.z_c_renormalized = critical_imbalance_renormalized(c);
        } else {
            const Measurement g = measure_gpe(j, grid, z0, run.phi0, run, ctx);
            fill_measurement(r, g);
            r.z0 = g.z0;
            r.regime = to_string(trajectory_regime(g.z));
        }
        return r;
    });

    // Boundary per model, bracketed by the ladder where it can be.
    const auto boundaries = parallel_map<ResultRow>(models.size(), ctx.threads(), [&](std::size_t mi) {
        const ModelChoice& m = models[mi];
        double lo = 0.0, hi = 0.99;
        bool seen_trapped = false;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (items[i].model.name != m.name) continue;
            const double z0 = run.z0[items[i].z_index];
            if (ladder[i].regime == "self_trapped") {
                if (!seen_trapped) hi = z0;
                seen_trapped = true;
            } else if (!seen_trapped) {
                lo = z0;
            }
        }
        ResultRow r = base_row(scenario, "z0", 0.0, m.name, j);
        r.regime = "boundary";
        r.phi0 = run.phi0;
        if (m.variant) {
            const TwoModeCoefficients c = j.coefficients(*m.variant);
            r.z_c = critical_imbalance(c, *m.variant);
            if (*m.variant == ModelVariant::tmgp) r.z_c_renormalized = critical_imbalance_renormalized(c);
            try {
                const double b = two_mode_boundary(c, *m.variant, run.phi0, lo, hi, run.boundary_tolerance, run);
                r.sweep_value = r.z0 = b;
            } catch (const SpecError& e) {
                r.status = std::string("no_boundary: ") + e.what();
            }
            return r;
        }
        if (!run.gpe_boundary) {
            r.status = "skipped";
            return r;
        }
        if (!seen_trapped) {
            r.status = "no_boundary: no trapped GPE point on the ladder";
            return r;
        }
        const TwoModeCoefficients c = j.coefficients(ModelVariant::jgp);
        double lambda_rate = 0.0;
        try {
            lambda_rate = plasma_frequency(c, ModelVariant::jgp);
        } catch (const PastCriticalError&) {
            lambda_rate = std::abs(c.two_k());
        }
        const double t_class = std::max(run.periods, 10.0) * two_pi / lambda_rate;
        while (hi - lo > run.boundary_tolerance) {
            const double mid = 0.5 * (lo + hi);
            const Measurement g = measure_gpe(j, grid, mid, run.phi0, run, ctx, t_class);
            (trajectory_regime(g.z) == Regime::self_trapped ? hi : lo) = mid;
        }
        r.sweep_value = r.z0 = 0.5 * (lo + hi);
        return r;
    });

    ScenarioResult out;
    out.scenario = scenario;
    out.rows = ladder;
    out.rows.insert(out.rows.end(), boundaries.begin(), boundaries.end());
    sort_rows(out.rows);
    out.summary = junction_summary(j);
    return out;
}

ScenarioResult run_mqst(const RunConfig& cfg, ScenarioContext& ctx) {
    const RunSpec& run = cfg.run;
    if (run.lambda.empty()) throw SpecError("mqst needs a Lambda target in run.lambda");
    if (run.z0.empty()) throw SpecError("mqst needs run.z0");
    const Grid grid = cfg.grid.build();
    const auto models = models_of(run, {"JGP"});
    const Junction j = junction_for(cfg, grid, ctx);
    const std::string scenario = "mqst";

    // Refuse anything the energy classifier does not call trapped.
    std::ostringstream refused;
    for (double z0 : run.z0) {
        for (const auto& m : models) {
            const ModelVariant v = m.variant.value_or(ModelVariant::tmgp);
            const TwoModeCoefficients c = j.coefficients(v);
            const Regime reg = classify_regime({z0, run.phi0}, c);
            if (reg == Regime::self_trapped) continue;
            refused << "z0 = " << format_shortest(z0) << ", " << m.name << ": " << to_string(reg)
                    << " (H = " << format_shortest(tm_energy({z0, run.phi0}, c))
                    << ", threshold = " << format_shortest(regime_threshold(c));
            if (auto zc = critical_imbalance(c, v)) refused << ", z_c = " << format_shortest(*zc);
            refused << ")\n";
        }
    }
    if (!refused.str().empty()) throw SpecError("mqst requires self-trapped starts:\n" + refused.str());

    struct Item {
        std::size_t z_index;
        ModelChoice model;
    };
    std::vector<Item> items;
    for (std::size_t k = 0; k < run.z0.size(); ++k)
        for (const auto& m : models) items.push_back({k, m});
    const auto results = parallel_map<Measurement>(items.size(), ctx.threads(), [&](std::size_t i) {
        const Item& it = items[i];
        const double z0 = run.z0[it.z_index];
        if (it.model.variant) return measure_two_mode(j, *it.model.variant, z0, run.phi0, run, run.t_end);
        return measure_gpe(j, grid, z0, run.phi0, run, ctx, run.t_end);
    });

    ScenarioResult out;
    out.scenario = scenario;
    out.summary = junction_summary(j);
    for (std::size_t i = 0; i < items.size(); ++i) {
        const Measurement& m = results[i];
        const double z0 = run.z0[items[i].z_index];
        ResultRow r = base_row(scenario, "z0", z0, items[i].model.name, j);
        r.z0 = m.z0;
        r.phi0 = run.phi0;
        fill_measurement(r, m);
        r.regime = to_string(trajectory_regime(m.z));
        if (items[i].model.variant) r.z_c = critical_imbalance(j.coefficients(*items[i].model.variant), *items[i].model.variant);
        if (m.fit) {
            for (std::size_t k = 0; k < m.phi.size(); ++k) {
                if (std::abs(m.phi[k] - m.phi.front()) >= two_pi) {
                    r.phase_2pi_periods = m.t[k] * m.fit->omega / two_pi;
                    break;
                }
            }
        }
        out.rows.push_back(r);
        if (run.write_trajectories)
            out.trajectories.push_back(dump_of(items[i].model.name + "_z" + std::to_string(items[i].z_index), m));
    }
    sort_rows(out.rows);
    return out;
}

}  // namespace bjj
