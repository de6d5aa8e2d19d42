#include <algorithm>
#include <chrono>
#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "bjj/diag_oracle.hpp"
#include "bjj/error.hpp"
#include "bjj/scenarios.hpp"

namespace bjj {

namespace {

constexpr double two_pi = 2.0 * constants::pi;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Rates {
    double slow;  // sets the run length
    double fast;  // sets the sampling
};

Rates estimate_rates(const TwoModeCoefficients& c, ModelVariant v, double z0, double phi0) {
    double linear = 0.0;
    try {
        linear = plasma_frequency(c, v);
    } catch (const PastCriticalError&) {
    }
    const double tk = std::abs(c.two_k());
    // A trapped state oscillates near the running-phase rate NU z0, and the
    // GPE somewhat below it.
    const double running = std::abs(c.nu * z0);
    const double fast = std::max({linear, tk, running + tk});
    if (running > 0.0 && classify_regime({z0, phi0}, c) == Regime::self_trapped) return {0.5 * running, fast};
    return {linear > 0.0 ? linear : tk, fast};
}

/// Sign changes of z - mean(z); two per period.
std::size_t half_periods(const std::vector<double>& z) {
    if (z.empty()) return 0;
    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(z.size());
    std::size_t count = 0;
    for (std::size_t i = 1; i < z.size(); ++i)
        if ((z[i - 1] - mean) * (z[i] - mean) < 0.0) ++count;
    return count;
}

void fit_into(Measurement& m) {
    try {
        m.fit = extract_frequency(m.t, m.z);
    } catch (const NoOscillationError&) {
        m.status = "no_oscillation";
    } catch (const FitError& e) {
        m.status = std::string("fit_error: ") + e.what();
    }
}

constexpr int max_extensions = 2;
constexpr double extension_factor = 4.0;

}  // namespace

ScenarioContext::ScenarioContext(SolverSettings settings, ModeCache* cache, std::size_t threads)
    : settings_(settings), cache_(cache), threads_(std::max<std::size_t>(1, threads)) {}

StationaryState ScenarioContext::solve(const TrapConfig& cfg, const Grid& grid, const Potential& pot, Parity parity) {
    const double gN = cfg.interaction_strength();
    std::string key;
    if (cache_ && cache_->enabled()) {
        key = stationary_key(cfg, grid.x_min(), grid.x_max(), grid.size(), settings_, gN, parity);
        if (auto hit = cache_->load(key)) return std::move(*hit);
    }
    const auto t0 = std::chrono::steady_clock::now();
    StationaryState s = solve_stationary(pot, gN, parity, settings_);
    {
        std::lock_guard lock(mutex_);
        stationary_seconds_ += seconds_since(t0);
    }
    if (!key.empty()) cache_->store(key, s);
    return s;
}

void ScenarioContext::add_dynamics_time(double seconds) {
    std::lock_guard lock(mutex_);
    dynamics_seconds_ += seconds;
}

double ScenarioContext::stationary_seconds() const {
    std::lock_guard lock(mutex_);
    return stationary_seconds_;
}

double ScenarioContext::dynamics_seconds() const {
    std::lock_guard lock(mutex_);
    return dynamics_seconds_;
}

TwoModeCoefficients Junction::coefficients(ModelVariant v) const {
    return v == ModelVariant::tms ? bjj::coefficients(linear_params, v) : bjj::coefficients(params, v);
}

ObservableMethod Junction::readout(ReadoutChoice choice) const {
    switch (choice) {
        case ReadoutChoice::projection: return ObservableMethod::projection;
        case ReadoutChoice::density: return ObservableMethod::density;
        case ReadoutChoice::automatic: break;
    }
    return params.tunneling() ? ObservableMethod::projection : ObservableMethod::density;
}

Junction build_junction(const TrapConfig& cfg, const Grid& grid, ScenarioContext& ctx) {
    cfg.validate();
    if (cfg.tilt != 0.0) throw SpecError("trap.tilt must be 0 for a junction; loading applies its own tilt");
    Potential pot = build_potential(cfg, grid);
    const StationaryState g = ctx.solve(cfg, grid, pot, Parity::even);
    const StationaryState e = ctx.solve(cfg, grid, pot, Parity::odd);
    TrapConfig lin = cfg;
    lin.scattering_length = 0.0;
    const bool linear = cfg.scattering_length == 0.0;
    const StationaryState lg = linear ? g : ctx.solve(lin, grid, pot, Parity::even);
    const StationaryState le = linear ? e : ctx.solve(lin, grid, pot, Parity::odd);
    ModePair modes = make_modes(g, e, grid);
    ModePair lmodes = make_modes(lg, le, grid);
    const KineticModel k = ctx.settings().kinetic;
    JunctionParams params = junction_integrals(modes, pot, cfg.coupling_1d(), cfg.atom_number, k);
    JunctionParams lparams = junction_integrals(lmodes, pot, cfg.coupling_1d(), cfg.atom_number, k);
    return Junction{cfg, std::move(pot), std::move(modes), params, std::move(lmodes), lparams};
}

Junction tune_lambda(TrapConfig cfg, const Grid& grid, double target, double tolerance, ScenarioContext& ctx) {
    if (!std::isfinite(target)) throw ConfigError("run.lambda", "target must be finite");
    if (target == 0.0) {
        cfg.scattering_length = 0.0;
        return build_junction(cfg, grid, ctx);
    }
    if (!(cfg.radial_frequency > 0.0 && cfg.atom_number > 0.0))
        throw ConfigError("trap", "Lambda targeting needs radial_frequency > 0 and atom_number > 0");

    // Lambda is exactly linear in a_s for frozen linear modes; that slope
    // gives the first secant point.
    TrapConfig probe = cfg;
    probe.scattering_length = 0.0;
    const Junction lin = build_junction(probe, grid, ctx);
    TrapConfig unit = cfg;
    unit.scattering_length = 1.0;
    const double slope = junction_integrals(lin.linear_modes, lin.potential, unit.coupling_1d(), cfg.atom_number,
                                            ctx.settings().kinetic)
                             .lambda();

    double a_prev = 0.0, l_prev = 0.0;
    double a = target / slope;
    double miss = 0.0;
    for (int iter = 0; iter < 40; ++iter) {
        cfg.scattering_length = a;
        Junction j = build_junction(cfg, grid, ctx);
        const double l = j.params.lambda();
        miss = std::abs(l - target);
        if (miss <= tolerance * std::abs(target)) return j;
        if (l == l_prev) break;
        const double a_next = a - (l - target) * (a - a_prev) / (l - l_prev);
        if (!std::isfinite(a_next)) break;
        a_prev = a;
        l_prev = l;
        a = a_next;
    }
    throw ConvergenceError("Lambda targeting did not converge", miss);
}

double find_secondary_depth(TrapConfig cfg, const Grid& grid, double rabi_target, KineticModel kinetic) {
    if (!(rabi_target > 0.0)) throw ConfigError("run.rabi_target", "must be > 0");
    cfg.scattering_length = 0.0;
    auto splitting = [&](double vs) {
        cfg.secondary_depth = vs;
        const Spectrum sp = diag_oracle(build_potential(cfg, grid), 2, kinetic);
        return sp.energies[1] - sp.energies[0];
    };
    // Below V_P/4 the central maximum is gone; far above, tunneling is negligible.
    const double lo = 0.25 * cfg.primary_depth * 1.001;
    const double hi = 40.0 * cfg.primary_depth;
    const double f_lo = splitting(lo) - rabi_target;
    const double f_hi = splitting(hi) - rabi_target;
    if (!(f_lo > 0.0 && f_hi < 0.0))
        throw SpecError("rabi_target outside the splitting range reachable by tuning secondary_depth");
    std::uintmax_t max_iter = 200;
    const auto r = boost::math::tools::toms748_solve([&](double vs) { return splitting(vs) - rabi_target; }, lo, hi,
                                                     f_lo, f_hi, boost::math::tools::eps_tolerance<double>(40),
                                                     max_iter);
    return 0.5 * (r.first + r.second);
}

Measurement measure_two_mode(const Junction& j, ModelVariant v, double z0, double phi0, const RunSpec& run,
                             std::optional<double> t_end) {
    const TwoModeCoefficients c = j.coefficients(v);
    const Rates r = estimate_rates(c, v, z0, phi0);
    const double dt = two_pi / (r.fast * static_cast<double>(run.rk4_steps_per_period));
    const std::size_t every = std::max<std::size_t>(1, run.rk4_steps_per_period / run.samples_per_period);
    double duration = t_end.value_or(run.periods * two_pi / r.slow);

    Measurement m;
    m.model = to_string(v);
    m.z0 = z0;
    for (int attempt = 0;; ++attempt) {
        const Trajectory tr = tm_integrate({z0, phi0}, c, v, duration, dt, every);
        m.t = tr.t;
        m.z = tr.z;
        m.phi = tr.phi;
        m.energy = tr.energy;
        if (tr.aborted) {
            m.status = "aborted: " + *tr.aborted;
            break;
        }
        if (!t_end && attempt < max_extensions && half_periods(m.z) < 9) {
            duration *= extension_factor;
            continue;
        }
        fit_into(m);
        break;
    }
    const double scale = c.energy_scale();
    for (double e : m.energy) m.energy_drift = std::max(m.energy_drift, std::abs(e - m.energy.front()) / scale);
    return m;
}

Measurement measure_gpe(const Junction& j, const Grid& grid, double z0, double phi0, const RunSpec& run,
                        ScenarioContext& ctx, std::optional<double> t_end) {
    const auto t0 = std::chrono::steady_clock::now();
    const ObservableMethod method = j.readout(run.readout);
    const double gN = j.cfg.interaction_strength();
    const double xb = j.potential.barrier_position();

    Field psi;
    if (z0 == 0.0) {
        psi = to_field(j.modes.ground);
    } else {
        SolveFn solve = [&](const Potential& p, double, Parity parity) {
            TrapConfig c = j.cfg;
            c.tilt = p.tilt();
            return ctx.solve(c, grid, p, parity);
        };
        psi = prepare_tilted_ground(z0, j.cfg, grid, gN, j.modes, ctx.settings(), method, run.prep_tolerance, solve)
                  .psi;
    }
    if (phi0 != 0.0) psi = imprint_phase(psi, phi0, grid, xb);

    const TwoModeCoefficients c = j.coefficients(ModelVariant::jgp);
    const Rates r = estimate_rates(c, ModelVariant::jgp, z0, phi0);
    const std::size_t every = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(two_pi / (r.fast * run.dt * static_cast<double>(run.samples_per_period)))));
    const double sample_dt = static_cast<double>(every) * run.dt;
    // Repulsive GPE dynamics run slower than the JGP estimate.
    double duration = t_end.value_or(run.periods * two_pi / r.slow * (c.lambda() > 0.0 ? 1.5 : 1.0));

    Measurement m;
    m.model = "GPE";
    m.z0 = measure_observables(psi, j.modes, grid, xb, method).z();
    double t_offset = 0.0;
    double e_ref = 0.0;
    for (int attempt = 0;; ++attempt) {
        EvolveOptions opt;
        opt.dt = run.dt;
        opt.sample_every = every;
        opt.method = method;
        opt.snapshot_every = run.snapshot_every;
        opt.kinetic = ctx.settings().kinetic;
        opt.t_end = std::max(1.0, std::ceil(duration / sample_dt)) * sample_dt;
        const GpeTrajectory tr = gpe_evolve(psi, j.potential, gN, j.modes, opt);
        // A continuation repeats the last sample as its first.
        const std::size_t first = m.t.empty() ? 0 : 1;
        const double phi_shift =
            m.phi.empty() ? 0.0 : two_pi * std::round((m.phi.back() - tr.phi.front()) / two_pi);
        if (m.t.empty()) e_ref = tr.energy.front();
        for (std::size_t i = first; i < tr.size(); ++i) {
            m.t.push_back(t_offset + tr.t[i]);
            m.z.push_back(tr.z[i]);
            m.phi.push_back(tr.phi[i] + phi_shift);
            m.energy.push_back(tr.energy[i]);
            m.leakage_max = std::max(m.leakage_max, tr.leakage[i]);
            m.energy_drift = std::max(m.energy_drift, std::abs(tr.energy[i] - e_ref) / std::abs(e_ref));
        }
        for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
            if (first == 1 && i == 0) continue;
            m.snapshots.push_back(tr.snapshots[i]);
            m.snapshot_times.push_back(t_offset + tr.snapshot_times[i]);
        }
        t_offset += tr.t.back();
        psi = tr.final_field;
        if (!t_end && attempt < max_extensions && half_periods(m.z) < 9) {
            duration *= extension_factor - 1.0;
            continue;
        }
        break;
    }
    fit_into(m);
    if (m.status == "ok" && m.energy_drift > 1e-6) m.status = "energy_drift";
    ctx.add_dynamics_time(seconds_since(t0));
    return m;
}

double two_mode_boundary(const TwoModeCoefficients& c, ModelVariant v, double phi0, double lo, double hi,
                         double tolerance, const RunSpec& run) {
    auto trapped = [&](double z0) {
        const Rates r = estimate_rates(c, v, z0, phi0);
        const double dt = two_pi / (r.fast * static_cast<double>(run.rk4_steps_per_period));
        const double duration = std::max(run.periods, 10.0) * two_pi / r.slow;
        const Trajectory tr = tm_integrate({z0, phi0}, c, v, duration, dt, 1);
        return classify_trajectory(tr) == Regime::self_trapped;
    };
    if (trapped(lo)) throw SpecError("boundary bracket: lower end already self-trapped");
    if (!trapped(hi)) throw SpecError("boundary bracket: upper end still oscillating");
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        (trapped(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace bjj
