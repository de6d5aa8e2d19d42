#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "bjj/error.hpp"
#include "bjj/grid.hpp"
#include "bjj/kinetic.hpp"
#include "bjj/units.hpp"

using namespace bjj;

namespace {

std::vector<double> sine_mode(const Grid& g, int m) {
    std::vector<double> f(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) f[j] = std::sin(m * constants::pi * (g[j] - g.x_min()) / g.length());
    return f;
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("DST-II then DST-III returns 2n times the input") {
    const std::size_t n = 128;
    SineTransform dst(n);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> f(n), c(n), back(n);
    for (auto& v : f) v = d(rng);
    dst.forward(f, c);
    dst.inverse(c, back);
    for (std::size_t i = 0; i < n; ++i) CHECK(back[i] == doctest::Approx(2.0 * n * f[i]).epsilon(1e-12));
    std::vector<double> wrong(n + 1);
    CHECK_THROWS_AS(dst.forward(wrong, c), DimensionError);
}

TEST_CASE("sine modes are eigenvectors of both kinetic models") {
    const Grid g(-5.0, 5.0, 256);
    KineticOperator spectral(g, KineticModel::spectral);
    KineticOperator fd(g, KineticModel::finite_difference);
    for (int m : {1, 2, 7, 40}) {
        const auto f = sine_mode(g, m);
        std::vector<double> tf(g.size());
        const double k = m * constants::pi / g.length();
        spectral.apply(f, tf);
        std::vector<double> expect(g.size());
        for (std::size_t j = 0; j < g.size(); ++j) expect[j] = 0.5 * k * k * f[j];
        CHECK(sup_diff(tf, expect) < 1e-9 * (1.0 + 0.5 * k * k));

        fd.apply(f, tf);
        const double h = g.dx();
        const double lam = (1.0 - std::cos(k * h)) / (h * h);
        for (std::size_t j = 0; j < g.size(); ++j) expect[j] = lam * f[j];
        CHECK(sup_diff(tf, expect) < 1e-9 * (1.0 + lam));
    }
}

TEST_CASE("finite-difference operator is the three-point stencil with walls half a cell out") {
    const Grid g(-5.0, 5.0, 64);
    KineticOperator fd(g, KineticModel::finite_difference);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> f(g.size()), tf(g.size());
    for (auto& v : f) v = d(rng);
    fd.apply(f, tf);
    const double h2 = g.dx() * g.dx();
    const std::size_t n = g.size();
    for (std::size_t j = 0; j < n; ++j) {
        // Odd reflection about each wall: f(-1) = -f(0), f(n) = -f(n-1).
        const double left = j == 0 ? -f[0] : f[j - 1];
        const double right = j + 1 == n ? -f[n - 1] : f[j + 1];
        CHECK(tf[j] == doctest::Approx(-0.5 * (left - 2.0 * f[j] + right) / h2).epsilon(1e-10));
    }
}

TEST_CASE("real-time kinetic propagation is unitary") {
    const Grid g(-5.0, 5.0, 128);
    KineticOperator t(g, KineticModel::spectral);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> d;
    std::vector<std::complex<double>> psi(g.size());
    for (auto& v : psi) v = {d(rng), d(rng)};
    double n0 = 0.0;
    for (auto v : psi) n0 += std::norm(v);
    for (int i = 0; i < 50; ++i) t.propagate(psi, 0.01);
    double n1 = 0.0;
    for (auto v : psi) n1 += std::norm(v);
    CHECK(n1 == doctest::Approx(n0).epsilon(1e-13));
}

TEST_CASE("imaginary-time factor damps mode m by exp(-k^2/2 tau)") {
    const Grid g(-5.0, 5.0, 128);
    KineticOperator t(g, KineticModel::spectral);
    auto f = sine_mode(g, 3);
    t.propagate_imaginary(f, 0.2);
    const double k = 3.0 * constants::pi / g.length();
    const auto ref = sine_mode(g, 3);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(f[j] == doctest::Approx(std::exp(-0.1 * k * k) * ref[j]).epsilon(1e-12));
}

TEST_CASE("eigenvalues ascend") {
    const Grid g(-5.0, 5.0, 128);
    for (auto model : {KineticModel::spectral, KineticModel::finite_difference}) {
        KineticOperator t(g, model);
        const auto ev = t.eigenvalues();
        for (std::size_t m = 1; m < ev.size(); ++m) CHECK(ev[m] > ev[m - 1]);
    }
}
