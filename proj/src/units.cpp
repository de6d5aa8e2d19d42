#include "bjj/units.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "bjj/error.hpp"

namespace bjj {

const UnitSystem& units() {
    static const UnitSystem system{};
    return system;
}

namespace {

void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) throw ConfigError(field, "value is not finite");
}

}  // namespace

void TrapConfig::validate() const {
    require_finite(atom_number, "atom_number");
    require_finite(scattering_length, "scattering_length");
    require_finite(primary_depth, "primary_depth");
    require_finite(secondary_depth, "secondary_depth");
    require_finite(primary_period, "primary_period");
    require_finite(secondary_period, "secondary_period");
    require_finite(radial_frequency, "radial_frequency");
    require_finite(tilt, "tilt");
    if (imprint_duration) require_finite(*imprint_duration, "imprint_duration");
    if (well_gap) require_finite(*well_gap, "well_gap");

    if (atom_number < 1.0) throw ConfigError("atom_number", "must be >= 1");
    if (primary_depth <= 0.0) throw ConfigError("primary_depth", "must be > 0");
    if (secondary_depth < 0.0) throw ConfigError("secondary_depth", "must be >= 0");
    if (radial_frequency <= 0.0) throw ConfigError("radial_frequency", "must be > 0");
    if (primary_period <= 0.0) throw ConfigError("primary_period", "must be > 0");
    if (std::abs(primary_period - 2.0 * secondary_period) > 1e-12 * primary_period)
        throw ConfigError("secondary_period", "primary period must be twice the secondary period");
    if (imprint_duration && *imprint_duration < 0.0)
        throw ConfigError("imprint_duration", "must be >= 0");
}

double to_internal(const Quantity& q, Dimension dim, const std::string& field) {
    const UnitSystem& u = units();
    if (!std::isfinite(q.value)) throw ConfigError(field, "value is not finite");

    using Converter = double (*)(const UnitSystem&, double);
    using Table = std::map<std::string, Converter, std::less<>>;
    static const std::map<Dimension, Table> tables = {
        {Dimension::energy,
         {{"internal", [](const UnitSystem&, double v) { return v; }},
          {"Hz", [](const UnitSystem& s, double v) { return s.energy_from_hz(v); }},
          {"kHz", [](const UnitSystem& s, double v) { return s.energy_from_hz(1e3 * v); }},
          {"nK", [](const UnitSystem& s, double v) { return s.energy_from_nk(v); }}}},
        {Dimension::length,
         {{"internal", [](const UnitSystem&, double v) { return v; }},
          {"um", [](const UnitSystem& s, double v) { return s.length_from_um(v); }},
          {"nm", [](const UnitSystem& s, double v) { return s.length_from_um(1e-3 * v); }}}},
        {Dimension::scattering_length,
         {{"internal", [](const UnitSystem&, double v) { return v; }},
          {"a0", [](const UnitSystem& s, double v) { return s.length_from_bohr(v); }},
          {"nm", [](const UnitSystem& s, double v) { return s.length_from_um(1e-3 * v); }}}},
        {Dimension::angular_frequency,
         {{"internal", [](const UnitSystem&, double v) { return v; }},
          {"Hz", [](const UnitSystem& s, double v) { return s.angular_from_hz(v); }},
          {"rad/s", [](const UnitSystem& s, double v) { return v * s.time_s(); }}}},
        {Dimension::time,
         {{"internal", [](const UnitSystem&, double v) { return v; }},
          {"ms", [](const UnitSystem& s, double v) { return s.time_from_ms(v); }},
          {"s", [](const UnitSystem& s, double v) { return s.time_from_ms(1e3 * v); }}}},
        {Dimension::tilt,
         {{"internal", [](const UnitSystem&, double v) { return v; }},
          {"Hz/um", [](const UnitSystem& s, double v) { return s.energy_from_hz(v) / s.length_from_um(1.0); }},
          {"nK/um", [](const UnitSystem& s, double v) { return s.energy_from_nk(v) / s.length_from_um(1.0); }}}},
        {Dimension::count, {{"1", [](const UnitSystem&, double v) { return v; }}}},
    };

    const Table& table = tables.at(dim);
    auto it = table.find(q.unit);
    if (it == table.end()) {
        std::string allowed;
        for (const auto& [name, _] : table) allowed += (allowed.empty() ? "" : ", ") + name;
        throw ConfigError(field, "unknown unit \"" + q.unit + "\" (allowed: " + allowed + ")");
    }
    return it->second(u, q.value);
}

}  // namespace bjj
