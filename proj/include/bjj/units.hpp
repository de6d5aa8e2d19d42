#pragma once

#include <optional>
#include <string>

namespace bjj {

// Physical constants, SI. Exact values are the 2019 SI defining constants;
// the rest are CODATA 2018 recommended values.
namespace constants {
inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double planck_h = 6.62607015e-34;           // J s, exact
inline constexpr double hbar = planck_h / (2.0 * pi);        // J s
inline constexpr double boltzmann = 1.380649e-23;            // J/K, exact
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg, CODATA 2018
inline constexpr double bohr_radius = 5.29177210903e-11;     // m, CODATA 2018
// 39K atomic mass, AME2020: 38.963706486(5) u.
inline constexpr double potassium39_mass_u = 38.9637064864;
inline constexpr double potassium39_mass = potassium39_mass_u * atomic_mass_unit;
}  // namespace constants

/// Internal unit system: hbar = 1, m = m(39K), lengths in micrometres.
/// Energy unit is hbar^2 / (m L0^2), time unit hbar / E_u.
struct UnitSystem {
    double length_m = 1e-6;
    double mass_kg = constants::potassium39_mass;

    double energy_j() const { return constants::hbar * constants::hbar / (mass_kg * length_m * length_m); }
    double time_s() const { return constants::hbar / energy_j(); }
    /// E_u / h in Hz.
    double energy_hz() const { return energy_j() / constants::planck_h; }

    double energy_from_hz(double hz) const { return hz * constants::planck_h / energy_j(); }
    double energy_to_hz(double e) const { return e * energy_j() / constants::planck_h; }
    double energy_from_nk(double nk) const { return nk * 1e-9 * constants::boltzmann / energy_j(); }
    double energy_to_nk(double e) const { return e * energy_j() / (1e-9 * constants::boltzmann); }

    double length_from_um(double um) const { return um * 1e-6 / length_m; }
    double length_from_bohr(double a0) const { return a0 * constants::bohr_radius / length_m; }
    double length_to_bohr(double l) const { return l * length_m / constants::bohr_radius; }

    double time_from_ms(double ms) const { return ms * 1e-3 / time_s(); }
    double time_to_ms(double t) const { return t * time_s() * 1e3; }

    /// Angular frequency given as f in Hz (omega = 2 pi f) to internal units.
    double angular_from_hz(double hz) const { return 2.0 * constants::pi * hz * time_s(); }
    double angular_to_hz(double w) const { return w / (2.0 * constants::pi * time_s()); }
};

/// The shared unit system. Everything past config parsing uses it implicitly.
const UnitSystem& units();

/// Trap, cloud and interaction parameters, internal units throughout.
struct TrapConfig {
    double atom_number = 6000.0;
    double scattering_length = 0.0;   // length (a_s)
    double primary_depth = 0.0;       // energy (V_P)
    double secondary_depth = 0.0;     // energy (V_S)
    double primary_period = 10.0;     // length (lambda_P / 2)
    double secondary_period = 5.0;    // length (lambda_S / 2)
    double radial_frequency = 0.0;    // angular (omega_perp)
    double tilt = 0.0;                // energy / length (epsilon)
    std::optional<double> imprint_duration;  // time (tau)
    std::optional<double> well_gap;          // energy (Delta E)

    /// Effective 1D coupling g_1D = 2 hbar omega_perp a_s (Gaussian radial ansatz).
    double coupling_1d() const { return 2.0 * radial_frequency * scattering_length; }
    /// g_1D N, the coefficient of |psi|^2 for a unit-normalized field.
    double interaction_strength() const { return coupling_1d() * atom_number; }

    /// Throws ConfigError naming the first field that breaks an invariant.
    void validate() const;
};

/// A value with its unit string exactly as written in a config file.
struct Quantity {
    double value = 0.0;
    std::string unit;
};

enum class Dimension { energy, length, scattering_length, angular_frequency, time, tilt, count };

/// Converts a quantity to internal units. Unknown units for the dimension
/// raise ConfigError naming `field` and the unit.
double to_internal(const Quantity& q, Dimension dim, const std::string& field);

}  // namespace bjj
