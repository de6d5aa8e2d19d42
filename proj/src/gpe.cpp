#include "bjj/gpe.hpp"

#include <algorithm>
#include <cmath>

#include "bjj/error.hpp"
#include "bjj/units.hpp"

namespace bjj {

namespace {

double wrap_pi(double a) { return std::remainder(a, 2.0 * constants::pi); }

}  // namespace

Field to_field(std::span<const double> psi) { return Field(psi.begin(), psi.end()); }

double field_norm(std::span<const std::complex<double>> psi, const Grid& grid) {
    double s = 0.0;
    for (const auto& v : psi) s += std::norm(v);
    return s * grid.dx();
}

Observables measure_observables(std::span<const std::complex<double>> psi, const ModePair& modes,
                                const Grid& grid, double barrier_position, ObservableMethod preferred) {
    const std::size_t n = grid.size();
    if (psi.size() != n || modes.left.size() != n) throw DimensionError("field and modes differ in size");
    const double dx = grid.dx();
    std::complex<double> cl = 0.0, cr = 0.0, sum_l = 0.0, sum_r = 0.0;
    double nl = 0.0, nr = 0.0, total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        cl += modes.left[j] * psi[j];
        cr += modes.right[j] * psi[j];
        const double d = std::norm(psi[j]);
        total += d;
        if (grid[j] < barrier_position) {
            nl += d;
            sum_l += psi[j];
        } else {
            nr += d;
            sum_r += psi[j];
        }
    }
    cl *= dx;
    cr *= dx;
    Observables o;
    const double pl = std::norm(cl), pr = std::norm(cr);
    o.z_projection = (pl - pr) / (pl + pr);
    o.phi_projection = std::arg(cr * std::conj(cl));
    o.leakage = total * dx - pl - pr;
    o.z_density = (nl - nr) / total;
    o.phi_density = std::arg(sum_r * std::conj(sum_l));
    o.preferred = preferred;
    o.two_mode_breakdown = preferred == ObservableMethod::projection && o.leakage > 0.2;
    return o;
}

Field imprint_phase(std::span<const std::complex<double>> psi, double phi0, const Grid& grid,
                    double barrier_position) {
    Field out(psi.begin(), psi.end());
    const std::complex<double> factor = std::polar(1.0, phi0);
    for (std::size_t j = 0; j < out.size(); ++j)
        if (grid[j] > barrier_position) out[j] *= factor;
    return out;
}

GpePropagator::GpePropagator(const Potential& potential, double gN, double dt, KineticModel kinetic)
    : potential_(potential), gN_(gN), dt_(dt), kinetic_(potential.grid(), kinetic),
      linear_phase_(potential.grid().size()), scratch_(potential.grid().size()) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt", "must be finite and > 0");
    const double vmax = std::max(std::abs(potential.max_value()), std::abs(potential.min_value()));
    if (dt * vmax >= 0.1) throw ConfigError("dt", "dt * max|V| must stay below 0.1");
    for (std::size_t j = 0; j < linear_phase_.size(); ++j)
        linear_phase_[j] = std::polar(1.0, -potential[j] * dt);
}

void GpePropagator::potential_phase(std::span<std::complex<double>> psi) {
    if (gN_ == 0.0) {
        for (std::size_t j = 0; j < psi.size(); ++j) psi[j] *= linear_phase_[j];
        return;
    }
    for (std::size_t j = 0; j < psi.size(); ++j)
        psi[j] *= std::polar(1.0, -(potential_[j] + gN_ * std::norm(psi[j])) * dt_);
}

void GpePropagator::check(const FieldState& state) const {
    for (const auto& v : state.psi)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw BlowUpError("non-finite field", steps_taken_);
}

void GpePropagator::step(FieldState& state) { advance(state, 1); }

void GpePropagator::advance(FieldState& state, std::size_t count) {
    if (count == 0) return;
    if (state.psi.size() != potential_.grid().size()) throw DimensionError("field does not match grid");
    if (steps_taken_ == 0 && gN_ != 0.0) {
        double peak = 0.0;
        for (std::size_t j = 0; j < state.psi.size(); ++j)
            peak = std::max(peak, std::abs(potential_[j] + gN_ * std::norm(state.psi[j])));
        if (dt_ * peak >= 0.1) throw ConfigError("dt", "dt * max|V + gN|psi|^2| must stay below 0.1");
    }
    kinetic_.propagate(state.psi, 0.5 * dt_);
    for (std::size_t s = 0; s < count; ++s) {
        potential_phase(state.psi);
        kinetic_.propagate(state.psi, s + 1 == count ? 0.5 * dt_ : dt_);
        ++steps_taken_;
    }
    state.time += static_cast<double>(count) * dt_;
    check(state);
}

double GpePropagator::energy(std::span<const std::complex<double>> psi) {
    kinetic_.apply(psi, scratch_);
    double e = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const double d = std::norm(psi[j]);
        e += (std::conj(psi[j]) * scratch_[j]).real() + potential_[j] * d + 0.5 * gN_ * d * d;
    }
    return e * potential_.grid().dx();
}

FieldState gpe_step(const FieldState& state, const Potential& potential, double gN, double dt) {
    GpePropagator prop(potential, gN, dt);
    FieldState next = state;
    prop.step(next);
    return next;
}

GpeTrajectory gpe_evolve(const Field& psi0, const Potential& potential, double gN,
                         const ModePair& modes, const EvolveOptions& options) {
    const Grid& grid = potential.grid();
    if (std::abs(field_norm(psi0, grid) - 1.0) > 1e-8)
        throw ConfigError("psi0", "initial field is not normalized");
    if (!(options.t_end > 0.0)) throw ConfigError("t_end", "must be > 0");
    const std::size_t every = std::max<std::size_t>(1, options.sample_every);
    const auto steps = static_cast<std::size_t>(std::llround(options.t_end / options.dt));

    GpePropagator prop(potential, gN, options.dt, options.kinetic);
    FieldState state{psi0, 0.0};
    GpeTrajectory traj;
    double phi_prev = 0.0, phi_density_prev = 0.0;
    const double xb = potential.barrier_position();
    std::size_t sample_index = 0;
    auto record = [&] {
        const Observables o = measure_observables(state.psi, modes, grid, xb, options.method);
        const double phi = sample_index == 0 ? o.phi() : phi_prev + wrap_pi(o.phi() - phi_prev);
        const double phid = sample_index == 0 ? o.phi_density
                                              : phi_density_prev + wrap_pi(o.phi_density - phi_density_prev);
        phi_prev = phi;
        phi_density_prev = phid;
        traj.t.push_back(state.time);
        traj.z.push_back(o.z());
        traj.phi.push_back(phi);
        traj.norm.push_back(field_norm(state.psi, grid));
        traj.energy.push_back(prop.energy(state.psi));
        traj.max_energy_drift = std::max(
            traj.max_energy_drift, std::abs(traj.energy.back() - traj.energy.front()) / std::abs(traj.energy.front()));
        traj.leakage.push_back(o.leakage);
        traj.z_density.push_back(o.z_density);
        traj.phi_density.push_back(phid);
        if (o.two_mode_breakdown) ++traj.breakdown_samples;
        if (options.snapshot_every > 0 && sample_index % options.snapshot_every == 0) {
            traj.snapshots.push_back(state.psi);
            traj.snapshot_times.push_back(state.time);
        }
        ++sample_index;
    };

    record();
    std::size_t done = 0;
    while (done < steps) {
        const std::size_t chunk = std::min(every, steps - done);
        prop.advance(state, chunk);
        // Exact sample times, free of accumulated rounding.
        done += chunk;
        state.time = static_cast<double>(done) * options.dt;
        if (chunk == every) record();
    }
    traj.final_field = std::move(state.psi);
    return traj;
}

PreparedState prepare_tilted_ground(double target_z, const TrapConfig& cfg, const Grid& grid,
                                    double gN, const ModePair& modes, const SolverSettings& settings,
                                    ObservableMethod method, double tolerance, const SolveFn& solve) {
    if (!(std::abs(target_z) < 0.95)) throw PreparationError("target imbalance must satisfy |z0| < 0.95");
    PreparedState out;
    auto solve_at = [&](double tilt) {
        const Potential pot = with_tilt(cfg, grid, tilt);
        StationaryState s;
        try {
            s = solve ? solve(pot, gN, Parity::even) : solve_stationary(pot, gN, Parity::even, settings);
        } catch (const CollapseError& e) {
            throw PreparationError(std::string("loading collapsed: ") + e.what());
        }
        ++out.solves;
        Field psi = to_field(s.psi);
        const double z = measure_observables(psi, modes, grid, 0.5 * (grid.x_min() + grid.x_max()), method).z();
        return std::pair{std::move(psi), z};
    };

    if (target_z == 0.0) {
        auto [psi, z] = solve_at(0.0);
        out.psi = std::move(psi);
        out.z = z;
        return out;
    }

    const double sign = target_z > 0.0 ? 1.0 : -1.0;
    const double cap = cfg.primary_depth / (0.5 * grid.length());
    double lo = 0.0;
    double hi = 1e-4 * cap;
    auto [psi_hi, z_hi] = solve_at(sign * hi);
    while (sign * z_hi < sign * target_z) {
        if (std::abs(z_hi - target_z) < tolerance) break;
        lo = hi;
        hi *= 2.0;
        if (hi > cap) throw PreparationError("target imbalance unreachable within the tilt cap");
        std::tie(psi_hi, z_hi) = solve_at(sign * hi);
    }
    if (std::abs(z_hi - target_z) < tolerance) {
        out.psi = std::move(psi_hi);
        out.tilt = sign * hi;
        out.z = z_hi;
        return out;
    }
    for (int iter = 0; iter < 60; ++iter) {
        const double mid = 0.5 * (lo + hi);
        auto [psi, z] = solve_at(sign * mid);
        if (std::abs(z - target_z) < tolerance) {
            out.psi = std::move(psi);
            out.tilt = sign * mid;
            out.z = z;
            return out;
        }
        if (sign * z < sign * target_z) lo = mid;
        else hi = mid;
    }
    throw PreparationError("tilt bisection did not reach the target imbalance");
}

}  // namespace bjj
