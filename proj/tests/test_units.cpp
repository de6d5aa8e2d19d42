#include <doctest.h>

#include <cmath>

#include "bjj/error.hpp"
#include "bjj/units.hpp"

using namespace bjj;

namespace {

// CODATA 2018 / SI 2019, written out independently of the library table.
constexpr double h_si = 6.62607015e-34;
constexpr double hbar_si = h_si / (2.0 * 3.14159265358979323846);
constexpr double u_si = 1.66053906660e-27;
constexpr double kb_si = 1.380649e-23;
constexpr double a0_si = 5.29177210903e-11;

double energy_unit_hz(double mass_u) { return hbar_si * hbar_si / (mass_u * u_si * 1e-12) / h_si; }

}  // namespace

TEST_CASE("energy unit of 39K at one micrometre") {
    const UnitSystem& u = units();
    CHECK(u.energy_hz() == doctest::Approx(energy_unit_hz(38.9637064864)).epsilon(1e-13));
    // The integer-mass estimate quoted for this unit system.
    CHECK(std::abs(energy_unit_hz(39.0) - 259.2) / 259.2 < 1e-3);
    CHECK(std::abs(u.energy_hz() - 259.2) / 259.2 < 2e-3);
}

TEST_CASE("time unit is hbar over the energy unit") {
    const UnitSystem& u = units();
    CHECK(u.time_s() * u.energy_j() == doctest::Approx(hbar_si).epsilon(1e-14));
    CHECK(u.time_to_ms(1.0) == doctest::Approx(0.61352632).epsilon(1e-6));
}

TEST_CASE("conversions round-trip") {
    const UnitSystem& u = units();
    for (double v : {1e-3, 0.35, 17.0, 2.5e4}) {
        CHECK(u.energy_to_hz(u.energy_from_hz(v)) == doctest::Approx(v).epsilon(1e-14));
        CHECK(u.energy_to_nk(u.energy_from_nk(v)) == doctest::Approx(v).epsilon(1e-14));
        CHECK(u.length_to_bohr(u.length_from_bohr(v)) == doctest::Approx(v).epsilon(1e-14));
        CHECK(u.time_to_ms(u.time_from_ms(v)) == doctest::Approx(v).epsilon(1e-14));
        CHECK(u.angular_to_hz(u.angular_from_hz(v)) == doctest::Approx(v).epsilon(1e-14));
    }
}

TEST_CASE("temperature and length scales") {
    const UnitSystem& u = units();
    // 1 nK * k_B / h.
    CHECK(u.energy_to_hz(u.energy_from_nk(1.0)) == doctest::Approx(kb_si * 1e-9 / h_si).epsilon(1e-13));
    CHECK(u.length_from_bohr(1.0) == doctest::Approx(a0_si / 1e-6).epsilon(1e-14));
    // omega = 2 pi f in internal units is 2 pi f t_u.
    CHECK(u.angular_from_hz(200.0) == doctest::Approx(2.0 * constants::pi * 200.0 * u.time_s()).epsilon(1e-14));
}

TEST_CASE("quantities with units") {
    CHECK(to_internal({5.0, "internal"}, Dimension::energy, "f") == 5.0);
    CHECK(to_internal({259.41013045965, "Hz"}, Dimension::energy, "f") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(to_internal({2.0, "um"}, Dimension::length, "f") == doctest::Approx(2.0));
    CHECK(to_internal({1500.0, "nm"}, Dimension::length, "f") == doctest::Approx(1.5));
    CHECK(to_internal({1.0, "ms"}, Dimension::time, "f") == doctest::Approx(1.0 / 0.61352632).epsilon(1e-6));
}

TEST_CASE("unknown unit is rejected by name") {
    try {
        to_internal({1.0, "meter"}, Dimension::scattering_length, "trap.scattering_length");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "trap.scattering_length");
        CHECK(std::string(e.what()).find("meter") != std::string::npos);
    }
    CHECK_THROWS_AS(to_internal({1.0, "Hz"}, Dimension::length, "x"), ConfigError);
}

TEST_CASE("trap validation") {
    TrapConfig t;
    t.primary_depth = 3.0;
    t.secondary_depth = 2.0;
    t.radial_frequency = 0.77;
    CHECK_NOTHROW(t.validate());
    TrapConfig bad = t;
    bad.atom_number = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = t;
    bad.radial_frequency = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("effective 1D coupling") {
    TrapConfig t;
    t.radial_frequency = 0.5;
    t.scattering_length = 1e-4;
    t.atom_number = 1000.0;
    CHECK(t.coupling_1d() == doctest::Approx(2.0 * 0.5 * 1e-4));
    CHECK(t.interaction_strength() == doctest::Approx(0.1));
}
