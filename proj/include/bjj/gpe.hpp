#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bjj/junction.hpp"
#include "bjj/kinetic.hpp"
#include "bjj/potential.hpp"

namespace bjj {

using Field = std::vector<std::complex<double>>;

struct FieldState {
    Field psi;
    double time = 0.0;
};

/// Real to complex, no copy of the phase.
Field to_field(std::span<const double> psi);
double field_norm(std::span<const std::complex<double>> psi, const Grid& grid);

/// How (z, phi) are read off a field.
/// projection: c_{L,R} = <psi_{L,R}|Psi>; density: split at the barrier.
enum class ObservableMethod { projection, density };

/// Both readouts of a field. phi follows arg c_R - arg c_L.
struct Observables {
    double z_projection = 0.0;
    double phi_projection = 0.0;
    double leakage = 0.0;  // 1 - |c_L|^2 - |c_R|^2
    double z_density = 0.0;
    double phi_density = 0.0;
    ObservableMethod preferred = ObservableMethod::projection;
    /// Leakage above 0.2 while projection is preferred.
    bool two_mode_breakdown = false;

    double z() const { return preferred == ObservableMethod::projection ? z_projection : z_density; }
    double phi() const { return preferred == ObservableMethod::projection ? phi_projection : phi_density; }
};

Observables measure_observables(std::span<const std::complex<double>> psi, const ModePair& modes,
                                const Grid& grid, double barrier_position,
                                ObservableMethod preferred = ObservableMethod::projection);

/// Multiplies the part right of the barrier by exp(i phi0).
Field imprint_phase(std::span<const std::complex<double>> psi, double phi0, const Grid& grid,
                    double barrier_position);

/// Second-order Strang splitting for i dPsi/dt = (T + V + gN|Psi|^2) Psi:
/// half kinetic step in the sine basis, full potential plus nonlinear phase,
/// half kinetic step. Owns its transform workspace (one per trajectory).
///
/// Stable while dt * max|V + gN|Psi|^2| < 0.1 (checked on construction
/// against the potential, and on the first step against the field). With
/// gN != 0 and dt * max(k^2/2) past about 2 pi the nonlinear phase can pump
/// the fastest grid modes; gpe_evolve reports the energy drift that exposes it.
class GpePropagator {
public:
    GpePropagator(const Potential& potential, double gN, double dt,
                  KineticModel kinetic = KineticModel::spectral);

    /// One step; BlowUpError on a non-finite field (checked every call).
    void step(FieldState& state);
    /// `count` steps; back-to-back half kinetic factors are fused.
    void advance(FieldState& state, std::size_t count);
    double energy(std::span<const std::complex<double>> psi);
    double dt() const { return dt_; }

private:
    void potential_phase(std::span<std::complex<double>> psi);
    void check(const FieldState& state) const;

    const Potential& potential_;
    double gN_;
    double dt_;
    KineticOperator kinetic_;
    std::vector<std::complex<double>> linear_phase_;
    std::size_t steps_taken_ = 0;
    Field scratch_;
};

/// Convenience single step (builds a fresh propagator).
FieldState gpe_step(const FieldState& state, const Potential& potential, double gN, double dt);

struct GpeTrajectory {
    std::vector<double> t;
    std::vector<double> z;
    std::vector<double> phi;  // unwrapped
    std::vector<double> norm;
    std::vector<double> energy;
    std::vector<double> leakage;
    std::vector<double> z_density;
    std::vector<double> phi_density;  // unwrapped
    std::size_t breakdown_samples = 0;
    /// max |E(t) - E(0)| / |E(0)| over the samples.
    double max_energy_drift = 0.0;
    /// Decimated copies of the field (if requested) and their times.
    std::vector<Field> snapshots;
    std::vector<double> snapshot_times;
    Field final_field;

    std::size_t size() const { return t.size(); }
};

struct EvolveOptions {
    double t_end = 0.0;
    double dt = 2e-4;
    std::size_t sample_every = 100;
    ObservableMethod method = ObservableMethod::projection;
    /// Keep the field at every k-th sample; 0 disables.
    std::size_t snapshot_every = 0;
    KineticModel kinetic = KineticModel::spectral;
};

/// Real-time evolution with observables recorded every `sample_every` steps.
GpeTrajectory gpe_evolve(const Field& psi0, const Potential& potential, double gN,
                         const ModePair& modes, const EvolveOptions& options);

struct PreparedState {
    Field psi;
    double tilt = 0.0;
    double z = 0.0;  // achieved imbalance
    std::size_t solves = 0;
};

/// Stationary solver hook, so callers can route solves through a cache.
using SolveFn = std::function<StationaryState(const Potential&, double gN, Parity)>;

/// Tilt-loading protocol: bisection on the tilt eps of the ground state of
/// V_dw + eps x until |z - target| < tolerance, z read with `method` from
/// the untilted modes. PreparationError if unreachable within the tilt cap
/// or if the attractive state collapses.
PreparedState prepare_tilted_ground(double target_z, const TrapConfig& cfg, const Grid& grid,
                                    double gN, const ModePair& modes, const SolverSettings& settings,
                                    ObservableMethod method = ObservableMethod::projection,
                                    double tolerance = 0.005, const SolveFn& solve = {});

}  // namespace bjj
