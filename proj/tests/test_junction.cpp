#include <doctest.h>

#include <cmath>

#include "bjj/error.hpp"
#include "bjj/junction.hpp"
#include "bjj/potential.hpp"
#include "bjj/stationary.hpp"
#include "bjj/units.hpp"

using namespace bjj;

namespace {

TrapConfig trap(double vs_hz, double as_a0) {
    const UnitSystem& u = units();
    TrapConfig t;
    t.primary_depth = u.energy_from_nk(40.0);
    t.secondary_depth = u.energy_from_hz(vs_hz);
    t.radial_frequency = u.angular_from_hz(200.0);
    t.scattering_length = u.length_from_bohr(as_a0);
    return t;
}

struct Solved {
    Potential potential;
    StationaryState ground, excited;
    ModePair modes;
    JunctionParams params;
};

Solved solve(const TrapConfig& t, std::size_t n = 512) {
    const Grid g(-5.0, 5.0, n);
    Potential p = build_potential(t, g);
    const double gN = t.interaction_strength();
    StationaryState e = solve_stationary(p, gN, Parity::even);
    StationaryState o = solve_stationary(p, gN, Parity::odd);
    ModePair m = make_modes(e, o, g);
    JunctionParams jp = junction_integrals(m, p, t.coupling_1d(), t.atom_number);
    return {std::move(p), std::move(e), std::move(o), std::move(m), jp};
}

double dot(const std::vector<double>& a, const std::vector<double>& b, double dx) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i] * dx;
    return s;
}

}  // namespace

TEST_CASE("localized modes") {
    const Solved s = solve(trap(500.0, 2.0));
    const double dx = s.potential.grid().dx();
    CHECK(std::abs(dot(s.modes.left, s.modes.right, dx)) < 1e-10);
    CHECK(dot(s.modes.left, s.modes.left, dx) == doctest::Approx(1.0).epsilon(1e-10));
    for (std::size_t j = 0; j < s.modes.left.size(); ++j) {
        CHECK(std::abs(s.modes.left[j] + s.modes.right[j] - std::sqrt(2.0) * s.ground.psi[j]) < 1e-12);
        CHECK(std::abs(s.modes.left[j] - s.modes.right[s.modes.right.size() - 1 - j]) < 1e-8);
    }
    CHECK(s.modes.left_fraction == doctest::Approx(s.modes.right_fraction).epsilon(1e-10));
}

TEST_CASE("tunneling regime keeps the modes in their wells") {
    // V_S = 550 Hz, a_s = 2 a0: V0 sits about 1.3 mu above the well bottom.
    const Solved s = solve(trap(550.0, 2.0));
    const double ratio = s.params.barrier_height / s.params.chemical_potential;
    CHECK(ratio > 1.2);
    CHECK(ratio < 1.5);
    CHECK(s.params.tunneling());
    CHECK(s.modes.left_fraction > 0.95);
}

TEST_CASE("make_modes rejects wrong parities and mixed interactions") {
    const Grid g(-5.0, 5.0, 256);
    const Potential p = build_potential(trap(500.0, 0.0), g);
    const StationaryState e = solve_stationary(p, 0.0, Parity::even);
    const StationaryState o = solve_stationary(p, 0.0, Parity::odd);
    CHECK_THROWS_AS(make_modes(o, e, g), ModeError);
    StationaryState other = o;
    other.interaction = 1.0;
    CHECK_THROWS_AS(make_modes(e, other, g), ModeError);
}

TEST_CASE("non-interacting limit") {
    const Solved s = solve(trap(500.0, 0.0));
    CHECK(s.params.u == 0.0);
    CHECK(s.params.i2 == 0.0);
    CHECK(s.params.i3 == 0.0);
    const double split = s.excited.energy - s.ground.energy;
    CHECK(std::abs(s.params.two_k() - split) / split < 1e-8);
    CHECK(s.params.lambda() == 0.0);
    CHECK(s.params.josephson_frequency().value() == doctest::Approx(s.params.two_k()));
    CHECK_FALSE(s.params.critical_imbalance().has_value());
}

TEST_CASE("integrals against direct quadrature of the modes") {
    const Solved s = solve(trap(500.0, 4.0));
    const double g = trap(500.0, 4.0).coupling_1d();
    const Grid& grid = s.potential.grid();
    double u = 0.0, i2 = 0.0, i3 = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double l = s.modes.left[j], r = s.modes.right[j];
        u += l * l * l * l;
        i2 += l * l * r * r;
        i3 += l * l * l * r;
    }
    CHECK(s.params.u == doctest::Approx(g * u * grid.dx()).epsilon(1e-12));
    CHECK(s.params.i2 == doctest::Approx(g * i2 * grid.dx()).epsilon(1e-12));
    CHECK(s.params.i3 == doctest::Approx(g * i3 * grid.dx()).epsilon(1e-12));
    // K = -<L|H0|R>, E0 = <L|H0|L>.
    KineticOperator kin(grid, KineticModel::spectral);
    auto h0 = [&](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> tb(b.size());
        kin.apply(b, tb);
        double acc = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) acc += a[j] * (tb[j] + s.potential[j] * b[j]);
        return acc * grid.dx();
    };
    CHECK(s.params.k == doctest::Approx(-h0(s.modes.left, s.modes.right)).epsilon(1e-10));
    CHECK(s.params.e0 == doctest::Approx(h0(s.modes.left, s.modes.left)).epsilon(1e-12));
}

TEST_CASE("crossing-over regime: overlap integrals and the renormalized coupling") {
    // a_s ladder at V_S = 500 Hz, where V0 and mu cross.
    for (double as : {2.0, 4.0, 6.0, 9.0, 12.0}) {
        CAPTURE(as);
        const Solved s = solve(trap(500.0, as));
        const JunctionParams& p = s.params;
        CHECK(p.i2 > 0.0);
        CHECK(p.i3 < 0.0);
        CHECK(std::abs(p.i2) / p.u > 1e-3);
        CHECK(std::abs(p.i2) / p.u < 1e-1);
        CHECK(std::abs(p.i3) / p.u > 1e-3);
        CHECK(std::abs(p.i3) / p.u < 1e-1);
        const double gap = s.excited.energy - s.ground.energy;
        CHECK(std::abs((p.two_k() - 2.0 * p.ni3()) - gap) / gap < 1e-2);
        CHECK(p.renormalization_mismatch == doctest::Approx(std::abs((p.two_k() - 2.0 * p.ni3()) - gap)));
    }
}

TEST_CASE("Lambda carries the sign of a_s") {
    CHECK(solve(trap(600.0, 1.0), 256).params.lambda() > 0.0);
    CHECK(solve(trap(600.0, -0.3), 256).params.lambda() < 0.0);
}

TEST_CASE("K falls as the barrier rises") {
    double previous = 0.0;
    bool first = true;
    for (double vs : {400.0, 500.0, 600.0, 700.0, 800.0}) {
        const double k = solve(trap(vs, 2.0), 256).params.k;
        CHECK(k > 0.0);
        if (!first) CHECK(k < previous);
        previous = k;
        first = false;
    }
}

TEST_CASE("grid refinement at the default resolution") {
    const TrapConfig t = trap(500.0, 4.0);
    const Solved coarse = solve(t, 512);
    const Solved fine = solve(t, 1024);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    CHECK(rel(coarse.ground.energy, fine.ground.energy) < 1e-4);
    CHECK(rel(coarse.excited.energy, fine.excited.energy) < 1e-4);
    CHECK(rel(coarse.params.k, fine.params.k) < 1e-4);
    CHECK(rel(coarse.params.u, fine.params.u) < 1e-4);
}

TEST_CASE("Josephson formulas") {
    JunctionParams p;
    p.atom_number = 100.0;
    p.k = 0.5;
    p.u = 0.17;  // Lambda = 17
    CHECK(p.lambda() == doctest::Approx(17.0));
    CHECK(p.josephson_frequency().value() == doctest::Approx(std::sqrt(18.0)));
    CHECK(p.critical_imbalance().value() == doctest::Approx(2.0 / 17.0 * 4.0));
    p.u = -0.011;
    CHECK_FALSE(p.josephson_frequency().has_value());
}

TEST_CASE("mismatched grids are rejected") {
    const Solved s = solve(trap(500.0, 0.0), 256);
    const Potential other = build_potential(trap(500.0, 0.0), Grid(-5.0, 5.0, 512));
    CHECK_THROWS_AS(junction_integrals(s.modes, other, 0.0, 6000.0), DimensionError);
}
