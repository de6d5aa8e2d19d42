#include <doctest.h>

#include <cmath>
#include <random>

#include "bjj/error.hpp"
#include "bjj/frequency_fit.hpp"
#include "bjj/twomode.hpp"
#include "bjj/units.hpp"

using namespace bjj;

namespace {

constexpr double pi = constants::pi;

TwoModeCoefficients jgp(double two_k, double lambda) {
    TwoModeCoefficients c;
    c.k = 0.5 * two_k;
    c.nu = lambda * two_k;
    return c;
}

// The overlap-term configuration used below: NI2 = 0.3, NI3 = -1.7, 2K = 6.7 (Hz), Lambda = 30.
TwoModeCoefficients tmgp_example() {
    TwoModeCoefficients c = jgp(6.7, 30.0);
    c.ni2 = 0.3;
    c.ni3 = -1.7;
    return c;
}

double wrap(double a) { return std::remainder(a, 2.0 * pi); }

}  // namespace

TEST_CASE("derivatives at a reference point") {
    const auto [dz, dphi] = tm_derivatives({0.3, 0.4}, tmgp_example());
    // Evaluated separately from the written-out equations.
    CHECK(dz == doctest::Approx(-3.556124154222581).epsilon(1e-12));
    CHECK(dphi == doctest::Approx(62.982865245497756).epsilon(1e-12));

    const auto [dz0, dphi0] = tm_derivatives({0.0, 0.0}, jgp(1.0, 17.0));
    CHECK(dz0 == 0.0);
    CHECK(dphi0 == 0.0);
    CHECK_THROWS_AS(tm_derivatives({1.0, 0.0}, jgp(1.0, 1.0)), PoleError);
}

TEST_CASE("equations are Hamilton's with z_dot = -dH/dphi, phi_dot = dH/dz") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> zd(-0.9, 0.9), pd(-pi, pi);
    const TwoModeCoefficients c = tmgp_example();
    const double h = 1e-6;
    for (int i = 0; i < 20; ++i) {
        const TwoModeState s{zd(rng), pd(rng)};
        const auto [dz, dphi] = tm_derivatives(s, c);
        const double dh_dphi = (tm_energy({s.z, s.phi + h}, c) - tm_energy({s.z, s.phi - h}, c)) / (2 * h);
        const double dh_dz = (tm_energy({s.z + h, s.phi}, c) - tm_energy({s.z - h, s.phi}, c)) / (2 * h);
        CHECK(dz == doctest::Approx(-dh_dphi).epsilon(1e-7));
        CHECK(dphi == doctest::Approx(dh_dz).epsilon(1e-7));
    }
}

TEST_CASE("Josephson energy") {
    const TwoModeCoefficients c = jgp(1.0, 17.0);
    CHECK(tm_energy({0.0, 0.0}, c) == doctest::Approx(-1.0));
    CHECK(tm_energy({0.0, pi}, c) == doctest::Approx(1.0));
    CHECK(tm_energy({0.6, 0.2}, c) == doctest::Approx(17.0 * 0.18 - std::sqrt(0.64) * std::cos(0.2)));
    CHECK(regime_threshold(c) == doctest::Approx(1.0));
}

TEST_CASE("non-interacting limit is Rabi flopping") {
    const TwoModeCoefficients c = jgp(1.3, 0.0);
    const double z0 = 0.4;
    const Trajectory tr = tm_integrate({z0, 0.0}, c, ModelVariant::jgp, 30.0, 1e-3, 10);
    REQUIRE_FALSE(tr.aborted.has_value());
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) worst = std::max(worst, std::abs(tr.z[i] - z0 * std::cos(1.3 * tr.t[i])));
    CHECK(worst < 1e-6);
}

TEST_CASE("z/phi integrator agrees with the amplitude integrator") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> zd(-0.8, 0.8), pd(-pi, pi);
    TwoModeCoefficients c = jgp(1.0, 4.0);
    c.ni2 = 0.03;
    c.ni3 = -0.08;
    c.e0 = 0.7;
    for (int i = 0; i < 20; ++i) {
        const TwoModeState s0{zd(rng), pd(rng)};
        CAPTURE(s0.z);
        CAPTURE(s0.phi);
        const Trajectory a = tm_integrate(s0, c, ModelVariant::tmgp, 10.0, 1e-3, 100);
        const Trajectory b = amp_integrate(AmplitudeState::from(s0), c, 10.0, 1e-3, 100);
        REQUIRE(a.size() == b.size());
        double dz = 0.0, dphi = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            dz = std::max(dz, std::abs(a.z[k] - b.z[k]));
            dphi = std::max(dphi, std::abs(wrap(a.phi[k] - b.phi[k])));
        }
        CHECK(dz < 1e-8);
        CHECK(dphi < 1e-8);
        CHECK(b.max_norm_drift < 1e-10);
        CHECK_FALSE(b.norm_flagged);
    }
}

TEST_CASE("amplitude state round trip") {
    const TwoModeState s{-0.35, 2.1};
    const AmplitudeState a = AmplitudeState::from(s);
    CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-15));
    const TwoModeState back = a.observables();
    CHECK(back.z == doctest::Approx(s.z).epsilon(1e-14));
    CHECK(wrap(back.phi - s.phi) == doctest::Approx(0.0).epsilon(1e-14));
    // phi is arg c_R - arg c_L.
    CHECK(std::arg(a.right) - std::arg(a.left) == doctest::Approx(s.phi).epsilon(1e-14));
}

TEST_CASE("small-amplitude frequency") {
    CHECK(plasma_frequency(jgp(1.0, 17.0), ModelVariant::jgp) == doctest::Approx(std::sqrt(18.0)));
    CHECK(plasma_frequency(jgp(2.0, 0.0), ModelVariant::tms) == doctest::Approx(2.0));
    CHECK_THROWS_AS(plasma_frequency(jgp(1.0, -1.5), ModelVariant::jgp), PastCriticalError);

    const TwoModeCoefficients c = tmgp_example();
    const double two_k = 6.7, nu = 201.0, ni2 = 0.3, ni3 = -1.7;
    const double expect = two_k * std::sqrt((1.0 - 2.0 * (ni3 + ni2) / two_k) *
                                            (1.0 + nu / two_k - (3.0 * ni2 + 2.0 * ni3) / two_k));
    CHECK(plasma_frequency(c, ModelVariant::tmgp) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("critical imbalance") {
    CHECK(critical_imbalance(jgp(1.0, 17.0), ModelVariant::jgp).value() == doctest::Approx(8.0 / 17.0));
    CHECK_FALSE(critical_imbalance(jgp(1.0, 0.8), ModelVariant::jgp).has_value());
    CHECK_FALSE(critical_imbalance(jgp(1.0, 0.0), ModelVariant::jgp).has_value());

    const TwoModeCoefficients c = tmgp_example();
    const double k = 3.35, nu = 201.0, ni2 = 0.3, ni3 = -1.7;
    const double expect = 4.0 * k / nu / (1.0 - 3.0 * ni2 / nu) *
                          std::sqrt((1.0 - ni3 / k) * (nu / (2 * k) - 1.0 + (2 * ni3 - 3 * ni2) / (2 * k)));
    CHECK(critical_imbalance(c, ModelVariant::tmgp).value() == doctest::Approx(expect).epsilon(1e-14));

    const double kr = k - ni3;
    CHECK(critical_imbalance_renormalized(c).value() ==
          doctest::Approx(4.0 * kr / nu * std::sqrt(nu / (2 * kr) - 1.0)).epsilon(1e-14));
    // Wrong-signed product under the root: no self-trapping.
    TwoModeCoefficients odd = jgp(1.0, 2.0);
    odd.ni3 = -3.0;
    CHECK_FALSE(critical_imbalance(odd, ModelVariant::tmgp).has_value());
}

TEST_CASE("regime classification") {
    const TwoModeCoefficients c = jgp(1.0, 17.0);
    CHECK(classify_regime({0.3, 0.0}, c) == Regime::oscillating);
    CHECK(classify_regime({0.6, 0.0}, c) == Regime::self_trapped);
    CHECK(classify_regime({0.0, pi}, c) == Regime::critical);
    // The energy boundary sits at z_c for phi0 = 0.
    const double zc = 8.0 / 17.0;
    CHECK(classify_regime({zc - 1e-4, 0.0}, c) == Regime::oscillating);
    CHECK(classify_regime({zc + 1e-4, 0.0}, c) == Regime::self_trapped);

    const Trajectory osc = tm_integrate({0.3, 0.0}, c, ModelVariant::jgp, 20.0, 1e-3, 10);
    const Trajectory trap = tm_integrate({0.6, 0.0}, c, ModelVariant::jgp, 20.0, 1e-3, 10);
    CHECK(classify_trajectory(osc) == Regime::oscillating);
    CHECK(classify_trajectory(trap) == Regime::self_trapped);
    CHECK_THROWS_AS(classify_regime({1.2, 0.0}, c), ConfigError);
}

TEST_CASE("mirror symmetry (z, phi) -> (-z, -phi)") {
    const TwoModeCoefficients c = tmgp_example();
    const auto [dz, dphi] = tm_derivatives({0.25, 0.7}, c);
    const auto [mz, mphi] = tm_derivatives({-0.25, -0.7}, c);
    CHECK(mz == doctest::Approx(-dz).epsilon(1e-14));
    CHECK(mphi == doctest::Approx(-dphi).epsilon(1e-14));
    CHECK(tm_energy({0.25, 0.7}, c) == doctest::Approx(tm_energy({-0.25, -0.7}, c)).epsilon(1e-14));

    const TwoModeCoefficients j = jgp(1.0, 5.0);
    const Trajectory a = tm_integrate({0.3, 0.0}, j, ModelVariant::jgp, 10.0, 1e-3, 50);
    const Trajectory b = tm_integrate({-0.3, 0.0}, j, ModelVariant::jgp, 10.0, 1e-3, 50);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(b.z[k] == doctest::Approx(-a.z[k]).epsilon(1e-12));
        CHECK(b.phi[k] == doctest::Approx(-a.phi[k]).epsilon(1e-12));
    }
}

TEST_CASE("TMGP with vanishing overlaps is JGP") {
    const TwoModeCoefficients c = jgp(1.0, 12.0);
    const Trajectory a = tm_integrate({0.2, 0.3}, c, ModelVariant::jgp, 10.0, 1e-3, 20);
    const Trajectory b = tm_integrate({0.2, 0.3}, c, ModelVariant::tmgp, 10.0, 1e-3, 20);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(std::abs(a.z[k] - b.z[k]) < 1e-12);
        CHECK(std::abs(a.phi[k] - b.phi[k]) < 1e-12);
    }
    CHECK(plasma_frequency(c, ModelVariant::tmgp) == doctest::Approx(plasma_frequency(c, ModelVariant::jgp)).epsilon(1e-12));
    CHECK(critical_imbalance(c, ModelVariant::tmgp).value() ==
          doctest::Approx(critical_imbalance(c, ModelVariant::jgp).value()).epsilon(1e-12));
}

TEST_CASE("frequency rises monotonically with Lambda") {
    double previous = -1.0;
    for (int i = 0; i < 50; ++i) {
        const double lambda = -0.99 + (16.0 + 0.99) * i / 49.0;
        const double w = plasma_frequency(jgp(1.0, lambda), ModelVariant::jgp);
        CHECK(w > previous);
        previous = w;
    }
}

TEST_CASE("small oscillations run at the plasma frequency") {
    for (double lambda : {-0.5, 0.0, 3.0, 17.0}) {
        CAPTURE(lambda);
        const TwoModeCoefficients c = jgp(1.0, lambda);
        const double w = plasma_frequency(c, ModelVariant::jgp);
        const double period = 2.0 * pi / w;
        const Trajectory tr = tm_integrate({0.01, 0.0}, c, ModelVariant::jgp, 8.0 * period, period / 1000.0, 10);
        const FrequencyFit fit = extract_frequency(tr.t, tr.z);
        CHECK(std::abs(fit.omega - w) / w < 1e-3);
    }
}

TEST_CASE("Josephson frequency falls with amplitude below z_c") {
    const TwoModeCoefficients c = jgp(1.0, 17.0);
    double previous = 1e300;
    for (double z0 : {0.05, 0.15, 0.25, 0.35, 0.45}) {
        const double period = 2.0 * pi / plasma_frequency(c, ModelVariant::jgp);
        const Trajectory tr = tm_integrate({z0, 0.0}, c, ModelVariant::jgp, 30.0 * period, period / 1000.0, 10);
        const double w = extract_frequency(tr.t, tr.z).omega;
        CHECK(w < previous);
        previous = w;
    }
}

TEST_CASE("integration stops near the pole") {
    // Lambda = -10 puts z = 1 on the H = Lambda / 2 level set; start on it, heading up.
    const TwoModeCoefficients c = jgp(1.0, -10.0);
    const double z0 = 0.99;
    const double phi0 = -std::acos(5.0 * std::sqrt(1.0 - z0 * z0));
    const Trajectory tr = tm_integrate({z0, phi0}, c, ModelVariant::jgp, 50.0, 1e-4);
    REQUIRE(tr.aborted.has_value());
    CHECK(std::abs(tr.z.back()) > 0.9999);
    CHECK(tr.t.back() < 50.0);
    CHECK_THROWS_AS(tm_integrate({0.9995, 0.0}, c, ModelVariant::jgp, 1.0, 1e-3), ConfigError);
    CHECK_THROWS_AS(tm_integrate({0.1, 0.0}, c, ModelVariant::jgp, 1.0, 0.0), ConfigError);
}

TEST_CASE("energy is conserved over ten periods") {
    const TwoModeCoefficients c = jgp(1.0, 17.0);
    const double period = 2.0 * pi / plasma_frequency(c, ModelVariant::jgp);
    const Trajectory tr = tm_integrate({0.3, 0.0}, c, ModelVariant::jgp, 10.0 * period, period / 1000.0, 50);
    double drift = 0.0;
    for (double e : tr.energy) drift = std::max(drift, std::abs(e - tr.energy.front()));
    CHECK(drift / c.energy_scale() < 1e-8);
}

TEST_CASE("variant names") {
    for (ModelVariant v : {ModelVariant::tms, ModelVariant::jgp, ModelVariant::tmgp})
        CHECK(parse_variant(to_string(v)) == v);
    CHECK_THROWS_AS(parse_variant("GPE2"), ConfigError);
}
