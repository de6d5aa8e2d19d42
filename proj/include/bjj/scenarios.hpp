#pragma once

#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bjj/cache.hpp"
#include "bjj/config.hpp"
#include "bjj/csv.hpp"
#include "bjj/frequency_fit.hpp"
#include "bjj/gpe.hpp"
#include "bjj/junction.hpp"
#include "bjj/twomode.hpp"

namespace bjj {

/// Settings, cache and bookkeeping shared by the work items of one run.
class ScenarioContext {
public:
    ScenarioContext(SolverSettings settings, ModeCache* cache = nullptr, std::size_t threads = 1);

    /// Stationary solve of `pot` at the interaction of `cfg`, through the cache.
    /// `cfg` must be the configuration `pot` was built from.
    StationaryState solve(const TrapConfig& cfg, const Grid& grid, const Potential& pot, Parity parity);

    const SolverSettings& settings() const { return settings_; }
    std::size_t threads() const { return threads_; }
    ModeCache* cache() const { return cache_; }

    void add_dynamics_time(double seconds);
    /// Summed over workers, so it can exceed wall time.
    double stationary_seconds() const;
    double dynamics_seconds() const;

private:
    SolverSettings settings_;
    ModeCache* cache_;
    std::size_t threads_;
    mutable std::mutex mutex_;
    double stationary_seconds_ = 0.0;
    double dynamics_seconds_ = 0.0;
};

/// Runs fn(0..n-1) on up to `threads` workers and returns the results in
/// index order. The first exception by index is rethrown after all finish.
template <class T>
std::vector<T> parallel_map(std::size_t n, std::size_t threads, const std::function<T(std::size_t)>& fn);

/// A double well with both mode pairs and their integrals.
struct Junction {
    TrapConfig cfg;
    Potential potential;
    ModePair modes;                // GPE modes at cfg's interaction
    JunctionParams params;
    ModePair linear_modes;         // Schroedinger modes
    JunctionParams linear_params;  // linear modes, cfg's coupling (TMS)

    TwoModeCoefficients coefficients(ModelVariant v) const;
    ObservableMethod readout(ReadoutChoice choice) const;
};

Junction build_junction(const TrapConfig& cfg, const Grid& grid, ScenarioContext& ctx);

/// Secant iteration on a_s until |Lambda - target| <= tolerance * |target|.
/// Target 0 means a_s = 0 exactly.
Junction tune_lambda(TrapConfig cfg, const Grid& grid, double target, double tolerance, ScenarioContext& ctx);

/// V_S whose linear doublet splitting (sine-basis dense diagonalization)
/// equals `rabi_target` = 2K/hbar. SpecError when outside the reachable range.
double find_secondary_depth(TrapConfig cfg, const Grid& grid, double rabi_target, KineticModel kinetic);

/// A dynamical run reduced to what the result tables need.
struct Measurement {
    std::string model;
    std::optional<FrequencyFit> fit;
    std::string status = "ok";
    double z0 = 0.0;  // achieved initial imbalance
    std::vector<double> t, z, phi, energy;
    double leakage_max = 0.0;
    double energy_drift = 0.0;
    std::vector<Field> snapshots;
    std::vector<double> snapshot_times;
};

/// Two-mode run long enough for a frequency fit; the run is extended
/// (up to twice, 4x each) when fewer than 4 periods were captured.
Measurement measure_two_mode(const Junction& j, ModelVariant v, double z0, double phi0, const RunSpec& run,
                             std::optional<double> t_end = std::nullopt);
/// GPE run from the tilt-loaded state with phi0 imprinted at the barrier.
Measurement measure_gpe(const Junction& j, const Grid& grid, double z0, double phi0, const RunSpec& run,
                        ScenarioContext& ctx, std::optional<double> t_end = std::nullopt);

/// Oscillating/trapped boundary by bisection on the trajectory classifier.
double two_mode_boundary(const TwoModeCoefficients& c, ModelVariant v, double phi0, double lo, double hi,
                         double tolerance, const RunSpec& run);

/// One line of a scenario table. Empty optionals print as empty cells.
struct ResultRow {
    std::string scenario;
    std::string sweep_param;
    double sweep_value = 0.0;
    std::string model;
    double z0 = 0.0;
    double phi0 = 0.0;
    double lambda = 0.0;
    double scattering_length = 0.0;
    double secondary_depth = 0.0;
    double two_k = 0.0;
    std::optional<double> omega;
    std::optional<double> formula_omega;
    std::optional<double> amplitude;
    std::optional<double> offset;
    std::optional<double> fit_residual;
    std::optional<double> band_lo;
    std::optional<double> band_hi;
    std::string regime;
    std::optional<double> z_c;
    std::optional<double> z_c_renormalized;
    std::optional<double> mean_z;
    std::optional<double> min_z;
    std::optional<double> max_abs_z;
    std::optional<double> mean_phi;
    std::optional<double> phase_advance;
    std::optional<double> phase_2pi_periods;
    double chemical_potential = 0.0;
    double barrier_height = 0.0;
    bool tunneling = false;
    std::optional<double> leakage_max;
    std::optional<double> energy_drift;
    std::string status = "ok";
};

/// Result table in SI-flavoured units (Hz, a0, rad); shortest round-trip numbers.
CsvTable results_table(const std::vector<ResultRow>& rows);
/// Stable sort by sweep value, then model (TMS, JGP, TMGP, GPE, other).
void sort_rows(std::vector<ResultRow>& rows);

struct TrajectoryDump {
    std::string name;
    std::string variant;
    std::vector<double> t, z, phi, energy;
};
/// Columns t_ms, z, phi_rad, energy_internal, model_variant; 17 digits.
CsvTable trajectory_table(const TrajectoryDump& d);

struct SnapshotDump {
    std::string name;
    std::vector<double> x;
    std::vector<double> times;
    std::vector<Field> fields;
};
/// Long format: t_ms, x_um, re_psi, im_psi.
CsvTable snapshot_table(const SnapshotDump& d);

struct ScenarioResult {
    std::string scenario;
    std::vector<ResultRow> rows;
    std::vector<TrajectoryDump> trajectories;
    std::vector<SnapshotDump> snapshots;
    std::vector<std::pair<std::string, CsvTable>> extra_tables;
    nlohmann::json summary = nlohmann::json::object();
};

ScenarioResult run_stationary(const RunConfig& cfg, ScenarioContext& ctx);
ScenarioResult run_evolve_two_mode(const RunConfig& cfg, ScenarioContext& ctx);
ScenarioResult run_evolve_gpe(const RunConfig& cfg, ScenarioContext& ctx);
ScenarioResult run_rabi(const RunConfig& cfg, ScenarioContext& ctx);
ScenarioResult run_pi_phase(const RunConfig& cfg, ScenarioContext& ctx);
ScenarioResult sweep_lambda(const RunConfig& cfg, ScenarioContext& ctx);
ScenarioResult sweep_z0(const RunConfig& cfg, ScenarioContext& ctx);
ScenarioResult run_mqst(const RunConfig& cfg, ScenarioContext& ctx);

/// Writes the scenario table, trajectories and extra tables into `dir` and
/// returns the file names, in a fixed order.
std::vector<std::string> write_outputs(const ScenarioResult& r, const std::filesystem::path& dir);

}  // namespace bjj

#include "bjj/parallel.ipp"
