#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bjj/gpe.hpp"
#include "bjj/grid.hpp"
#include "bjj/stationary.hpp"
#include "bjj/units.hpp"

namespace bjj {

struct GridSpec {
    double x_min = -5.0;
    double x_max = 5.0;
    std::size_t n_points = 512;

    Grid build() const { return build_grid(x_min, x_max, n_points); }
};

/// How sweep_lambda holds the junction while the interaction changes.
/// tunneling: raise V_S whenever V0 drops below margin * mu.
/// fixed_barrier: keep V_S and report where V0 = mu is crossed.
enum class SweepMode { tunneling, fixed_barrier };

/// Observable readout for GPE runs; automatic picks projection when V0 > mu.
enum class ReadoutChoice { automatic, projection, density };

/// Everything under the "run" key, internal units.
struct RunSpec {
    std::string label;
    std::vector<std::string> models;  // subset of TMS, JGP, TMGP, GPE
    std::vector<double> z0;
    double phi0 = 0.0;
    /// Targets for sweep_lambda; the first entry is the target elsewhere.
    std::vector<double> lambda;
    SweepMode sweep_mode = SweepMode::tunneling;
    double barrier_margin = 1.2;
    double secondary_depth_step = 1.15;
    /// Rabi frequency 2K/hbar to reach by tuning V_S (linear splitting).
    std::optional<double> rabi_target;
    double lambda_tolerance = 1e-4;  // relative
    double periods = 6.0;
    std::size_t samples_per_period = 64;
    std::size_t rk4_steps_per_period = 1000;
    double dt = 2e-4;  // GPE step
    std::optional<double> t_end;
    std::vector<double> delta;  // pi-phase offsets
    std::vector<double> band_z0{0.01, 0.2};
    double boundary_tolerance = 0.005;
    bool gpe_boundary = true;
    double prep_tolerance = 0.005;
    ReadoutChoice readout = ReadoutChoice::automatic;
    std::size_t snapshot_every = 0;
    bool write_trajectories = true;
    SolverSettings solver;
};

struct RunConfig {
    TrapConfig trap;
    GridSpec grid;
    RunSpec run;
    /// The document as read, for hashing and the manifest.
    nlohmann::json source;
};

/// Parses and validates a config document. Unknown keys, unknown units and
/// broken invariants raise ConfigError naming the offending key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// The resolved configuration in internal units, plus a few derived values.
nlohmann::json describe(const RunConfig& cfg);
/// JSON description of every accepted key with its dimension and units.
nlohmann::json config_schema();

/// SHA-256 of the canonical (sorted-key, shortest-number) JSON serialization.
std::string content_hash(const nlohmann::json& doc);
std::string sha256_hex(const std::string& bytes);

}  // namespace bjj
