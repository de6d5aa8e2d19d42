#include <doctest.h>

#include <cmath>
#include <complex>

#include "bjj/diag_oracle.hpp"
#include "bjj/error.hpp"
#include "bjj/frequency_fit.hpp"
#include "bjj/gpe.hpp"
#include "bjj/junction.hpp"
#include "bjj/potential.hpp"
#include "bjj/stationary.hpp"
#include "bjj/twomode.hpp"
#include "bjj/units.hpp"

using namespace bjj;

namespace {

constexpr double pi = constants::pi;

TrapConfig trap(double vs_hz, double as_a0) {
    const UnitSystem& u = units();
    TrapConfig t;
    t.primary_depth = u.energy_from_nk(40.0);
    t.secondary_depth = u.energy_from_hz(vs_hz);
    t.radial_frequency = u.angular_from_hz(200.0);
    t.scattering_length = u.length_from_bohr(as_a0);
    return t;
}

struct Well {
    TrapConfig cfg;
    Grid grid;
    Potential potential;
    double gN;
    StationaryState ground;
    ModePair modes;
    JunctionParams params;
};

Well well(double vs_hz, double as_a0, std::size_t n = 512) {
    const TrapConfig cfg = trap(vs_hz, as_a0);
    const Grid g(-5.0, 5.0, n);
    Potential p = build_potential(cfg, g);
    const double gN = cfg.interaction_strength();
    StationaryState e = solve_stationary(p, gN, Parity::even);
    const StationaryState o = solve_stationary(p, gN, Parity::odd);
    ModePair m = make_modes(e, o, g);
    const JunctionParams jp = junction_integrals(m, p, cfg.coupling_1d(), cfg.atom_number);
    return {cfg, g, std::move(p), gN, std::move(e), std::move(m), jp};
}

double sup_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

// Frequency of a GPE run from a given field, with the run length set from a guess.
double gpe_frequency(const Well& w, const Field& psi0, double omega_guess, double dt) {
    const double period = 2.0 * pi / omega_guess;
    EvolveOptions opt;
    opt.dt = dt;
    opt.t_end = 6.0 * period;
    opt.sample_every = std::max<std::size_t>(1, static_cast<std::size_t>(period / dt / 64.0));
    const GpeTrajectory tr = gpe_evolve(psi0, w.potential, w.gN, w.modes, opt);
    return extract_frequency(tr.t, tr.z).omega;
}

}  // namespace

TEST_CASE("harmonic eigenstate: stationary modulus, phase at E") {
    const Grid g(-5.0, 5.0, 512);
    const Potential p = harmonic_potential(g, 4.0);
    const Spectrum sp = diag_oracle(p, 1, KineticModel::spectral);
    const Field psi0 = to_field(sp.vectors[0]);
    GpePropagator prop(p, 0.0, 1e-4);
    FieldState s{psi0, 0.0};
    prop.advance(s, 10000);
    CHECK(s.time == doctest::Approx(1.0));
    double dmod = 0.0;
    std::complex<double> overlap = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        dmod = std::max(dmod, std::abs(std::abs(s.psi[j]) - std::abs(psi0[j])));
        overlap += std::conj(psi0[j]) * s.psi[j] * g.dx();
    }
    CHECK(dmod < 1e-8);
    CHECK(std::remainder(std::arg(overlap) + sp.energies[0] * s.time, 2.0 * pi) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("self-consistent ground state stays put for 100 ms") {
    const Well w = well(500.0, 4.0);
    const double t_end = units().time_from_ms(100.0);
    const double dt = 2e-4;
    GpePropagator prop(w.potential, w.gN, dt);
    FieldState s{to_field(w.ground.psi), 0.0};
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt));
    double worst = 0.0;
    for (std::size_t done = 0; done < steps; done += 5000) {
        prop.advance(s, 5000);
        for (std::size_t j = 0; j < w.grid.size(); ++j)
            worst = std::max(worst, std::abs(std::norm(s.psi[j]) - w.ground.psi[j] * w.ground.psi[j]));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("Strang splitting is second order in dt") {
    const Well w = well(500.0, 4.0);
    const Field psi0 = to_field(w.modes.left);
    const double t_end = 2.0;
    auto run = [&](double dt) {
        GpePropagator prop(w.potential, w.gN, dt);
        FieldState s{psi0, 0.0};
        prop.advance(s, static_cast<std::size_t>(std::llround(t_end / dt)));
        return s.psi;
    };
    const double dt = 4e-3;
    const Field reference = run(dt / 8.0);
    const double e1 = sup_abs_diff(run(dt), reference);
    const double e2 = sup_abs_diff(run(dt / 2.0), reference);
    // Richardson against dt/8: the dt/2 error carries a 1/(1 - 1/16) bias at most.
    const double ratio = e1 / e2;
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.6);
}

TEST_CASE("non-interacting run from psi_L oscillates at the doublet splitting") {
    const Well w = well(500.0, 0.0);
    const Spectrum sp = diag_oracle(w.potential, 2, KineticModel::spectral);
    const double rabi = sp.energies[1] - sp.energies[0];
    const double omega = gpe_frequency(w, to_field(w.modes.left), rabi, 2e-3);
    CHECK(std::abs(omega - rabi) / rabi < 5e-3);
}

TEST_CASE("non-interacting frequency does not depend on z0") {
    const Well w = well(500.0, 0.0);
    const double rabi = w.params.two_k();
    std::vector<double> omegas;
    for (double z0 : {0.1, 0.4, 0.7}) {
        const PreparedState prep = prepare_tilted_ground(z0, w.cfg, w.grid, 0.0, w.modes, SolverSettings{});
        omegas.push_back(gpe_frequency(w, prep.psi, rabi, 2e-3));
    }
    for (double om : omegas) CHECK(std::abs(om - omegas.front()) / omegas.front() < 1e-2);
}

TEST_CASE("repulsive tunneling junction follows the Josephson frequency") {
    const Well w = well(550.0, 1.0);
    REQUIRE(w.params.tunneling());
    const double omega_j = plasma_frequency(coefficients(w.params, ModelVariant::jgp), ModelVariant::jgp);
    const PreparedState prep = prepare_tilted_ground(0.05, w.cfg, w.grid, w.gN, w.modes, SolverSettings{});
    const double omega = gpe_frequency(w, prep.psi, omega_j, 2e-3);
    CHECK(std::abs(omega - omega_j) / omega_j < 0.1);
}

TEST_CASE("tilted loading") {
    const Well w = well(500.0, 0.0);
    const PreparedState zero = prepare_tilted_ground(0.0, w.cfg, w.grid, 0.0, w.modes, SolverSettings{});
    CHECK(zero.tilt == 0.0);
    CHECK(std::abs(zero.z) < 1e-10);

    double previous = -2.0;
    for (int i = 0; i < 10; ++i) {
        const double eps = -2e-3 + 4e-3 * i / 9.0;
        const StationaryState s = solve_stationary(with_tilt(w.cfg, w.grid, eps), 0.0, Parity::even);
        const double z = measure_observables(to_field(s.psi), w.modes, w.grid, 0.0).z();
        CHECK(z > previous);
        previous = z;
    }

    const PreparedState p = prepare_tilted_ground(0.2, w.cfg, w.grid, 0.0, w.modes, SolverSettings{});
    CHECK(std::abs(p.z - 0.2) < 0.005);
    CHECK(p.tilt > 0.0);
    CHECK(field_norm(p.psi, w.grid) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(prepare_tilted_ground(0.97, w.cfg, w.grid, 0.0, w.modes, SolverSettings{}), PreparationError);
}

TEST_CASE("phase imprint and its readout") {
    const Well w = well(550.0, 2.0);
    const Field g = to_field(w.ground.psi);
    CHECK(sup_abs_diff(imprint_phase(g, 0.0, w.grid, 0.0), g) == 0.0);

    const Field flipped = imprint_phase(g, pi, w.grid, 0.0);
    for (std::size_t j = 0; j < g.size(); ++j) {
        CHECK(std::abs(flipped[j]) == std::abs(g[j]));
        if (w.grid[j] > 0.0) CHECK(flipped[j].real() == doctest::Approx(-g[j].real()).epsilon(1e-15));
    }

    const Observables o = measure_observables(imprint_phase(g, 0.7, w.grid, 0.0), w.modes, w.grid, 0.0);
    CHECK(o.phi_density == doctest::Approx(0.7).epsilon(1e-12));
    // Each mode overlaps the ground state on both sides of the barrier, so the
    // projected phase is arg(a_R + e^{i phi0} b_R) - arg(a_L + e^{i phi0} b_L).
    std::complex<double> cl = 0.0, cr = 0.0;
    const std::complex<double> rot = std::polar(1.0, 0.7);
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double side = w.grid[j] > 0.0 ? 1.0 : 0.0;
        const std::complex<double> f = g[j] * (side * rot + (1.0 - side));
        cl += w.modes.left[j] * f * w.grid.dx();
        cr += w.modes.right[j] * f * w.grid.dx();
    }
    CHECK(o.phi_projection == doctest::Approx(std::arg(cr) - std::arg(cl)).epsilon(1e-12));
    CHECK(o.phi_projection > 0.0);

    const Observables ground = measure_observables(g, w.modes, w.grid, 0.0);
    CHECK(std::abs(ground.z_projection) < 1e-12);
    CHECK(std::abs(ground.z_density) < 1e-12);
    CHECK(ground.phi_projection == 0.0);
    CHECK(ground.phi_density == 0.0);
}

TEST_CASE("readouts of constructed two-mode states") {
    const Well w = well(550.0, 2.0);
    const Observables left = measure_observables(to_field(w.modes.left), w.modes, w.grid, 0.0);
    CHECK(left.z_projection == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(left.z_density == doctest::Approx(2.0 * w.modes.left_fraction - 1.0).epsilon(1e-10));
    CHECK(left.z_density > 0.9);

    Field mix(w.grid.size());
    const std::complex<double> e = std::polar(1.0, pi / 3.0);
    for (std::size_t j = 0; j < mix.size(); ++j) mix[j] = (w.modes.left[j] + e * w.modes.right[j]) / std::sqrt(2.0);
    const Observables o = measure_observables(mix, w.modes, w.grid, 0.0);
    CHECK(o.phi_projection == doctest::Approx(pi / 3.0).epsilon(1e-12));
    CHECK(std::abs(o.z_projection) < 1e-12);
    CHECK(std::abs(o.leakage) < 1e-10);
}

TEST_CASE("projection and density readouts agree in the tunneling regime") {
    const Well w = well(550.0, 2.0);
    REQUIRE(w.params.barrier_height > w.params.chemical_potential);
    const PreparedState prep = prepare_tilted_ground(0.3, w.cfg, w.grid, w.gN, w.modes, SolverSettings{});
    EvolveOptions opt;
    opt.dt = 2e-3;
    opt.t_end = 40.0;
    opt.sample_every = 200;
    const GpeTrajectory tr = gpe_evolve(prep.psi, w.potential, w.gN, w.modes, opt);
    std::size_t compared = 0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        if (tr.leakage[k] >= 0.01) continue;
        ++compared;
        // L(x) R(x) is even, so a pure two-mode state gives z_density = (2 f_L - 1) z.
        CHECK(std::abs(tr.z_density[k] - (2.0 * w.modes.left_fraction - 1.0) * tr.z[k]) < 0.01);
    }
    CHECK(compared > tr.size() / 2);
}

TEST_CASE("unitarity and energy over an untilted run") {
    const Well w = well(550.0, 4.0);
    const Field psi0 = imprint_phase(to_field(w.modes.left), 0.4, w.grid, 0.0);
    EvolveOptions opt;
    opt.dt = 2e-4;
    opt.t_end = 2e4 * opt.dt;
    opt.sample_every = 1000;
    const GpeTrajectory tr = gpe_evolve(psi0, w.potential, w.gN, w.modes, opt);
    double norm_drift = 0.0;
    for (double n : tr.norm) norm_drift = std::max(norm_drift, std::abs(n - tr.norm.front()));
    CHECK(norm_drift / 2.0 < 1e-7);
    for (double z : tr.z) CHECK(std::abs(z) <= 1.0);

    // The imprinted step carries high-k content; its splitting error needs a finer dt.
    opt.dt = 1e-4;
    opt.t_end = 4.0;
    CHECK(gpe_evolve(psi0, w.potential, w.gN, w.modes, opt).max_energy_drift < 1e-6);
    opt.dt = 2e-4;
    CHECK(gpe_evolve(to_field(w.modes.left), w.potential, w.gN, w.modes, opt).max_energy_drift < 1e-6);
}

TEST_CASE("linear propagation matches the eigenbasis evolution") {
    const Grid g(-5.0, 5.0, 256);
    const Potential p = build_potential(trap(500.0, 0.0), g);
    const Spectrum sp = diag_oracle(p, g.size(), KineticModel::spectral);
    const StationaryState e = solve_stationary(p, 0.0, Parity::even);
    const StationaryState o = solve_stationary(p, 0.0, Parity::odd);
    const ModePair m = make_modes(e, o, g);
    const Field psi0 = imprint_phase(to_field(m.left), 0.9, g, 0.0);

    const double dt = 2e-4;
    const std::size_t steps = 20000;
    GpePropagator prop(p, 0.0, dt);
    FieldState s{psi0, 0.0};
    prop.advance(s, steps);

    const double t = dt * static_cast<double>(steps);
    Field exact(g.size(), 0.0);
    for (std::size_t k = 0; k < sp.energies.size(); ++k) {
        std::complex<double> c = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) c += sp.vectors[k][j] * psi0[j] * g.dx();
        c *= std::polar(1.0, -sp.energies[k] * t);
        for (std::size_t j = 0; j < g.size(); ++j) exact[j] += c * sp.vectors[k][j];
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) worst = std::max(worst, std::abs(std::abs(s.psi[j]) - std::abs(exact[j])));
    CHECK(worst < 1e-6);
}

TEST_CASE("mirror image of the preparation gives the mirrored trajectory") {
    const Well w = well(550.0, 3.0);
    const PreparedState a = prepare_tilted_ground(0.25, w.cfg, w.grid, w.gN, w.modes, SolverSettings{});
    Field mirrored(a.psi.size());
    for (std::size_t j = 0; j < a.psi.size(); ++j) mirrored[j] = a.psi[w.grid.mirror(j)];
    EvolveOptions opt;
    opt.dt = 2e-3;
    opt.t_end = 20.0;
    opt.sample_every = 100;
    const GpeTrajectory ta = gpe_evolve(a.psi, w.potential, w.gN, w.modes, opt);
    const GpeTrajectory tb = gpe_evolve(mirrored, w.potential, w.gN, w.modes, opt);
    for (std::size_t k = 0; k < ta.size(); ++k) CHECK(std::abs(ta.z[k] + tb.z[k]) < 1e-8);
}

TEST_CASE("guards") {
    const Well w = well(500.0, 0.0, 256);
    CHECK_THROWS_AS(GpePropagator(w.potential, 0.0, 0.5), ConfigError);
    CHECK_THROWS_AS(GpePropagator(w.potential, 0.0, -1e-3), ConfigError);
    try {
        GpePropagator(w.potential, 0.0, 0.5);
    } catch (const ConfigError& e) {
        CHECK(e.field() == "dt");
    }
    GpePropagator prop(w.potential, 0.0, 1e-3);
    FieldState s{to_field(w.ground.psi), 0.0};
    s.psi[10] = std::complex<double>(std::nan(""), 0.0);
    CHECK_THROWS_AS(prop.step(s), BlowUpError);

    Field unnormalized = to_field(w.ground.psi);
    for (auto& v : unnormalized) v *= 2.0;
    EvolveOptions opt;
    opt.t_end = 1.0;
    CHECK_THROWS_AS(gpe_evolve(unnormalized, w.potential, 0.0, w.modes, opt), ConfigError);
}
