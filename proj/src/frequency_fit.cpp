#include "bjj/frequency_fit.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <complex>
#include <mutex>
#include <vector>

#include "bjj/error.hpp"
#include "bjj/kinetic.hpp"
#include "bjj/units.hpp"

namespace bjj {

namespace {

struct LinearFit {
    double a = 0.0, b = 0.0, c = 0.0;
    double sse = 0.0;
};

LinearFit solve_linear(std::span<const double> t, std::span<const double> z, double omega) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < t.size(); ++i) {
        const Eigen::Vector3d row(std::sin(omega * t[i]), std::cos(omega * t[i]), 1.0);
        m.noalias() += row * row.transpose();
        rhs += row * z[i];
    }
    const Eigen::Vector3d coef = m.ldlt().solve(rhs);
    LinearFit f{coef(0), coef(1), coef(2), 0.0};
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = z[i] - f.a * std::sin(omega * t[i]) - f.b * std::cos(omega * t[i]) - f.c;
        f.sse += r * r;
    }
    return f;
}

/// Peak of the zero-padded periodogram, parabolically interpolated, in
/// cycles per sample; also returns peak / mean power.
std::pair<double, double> spectral_peak(std::span<const double> y) {
    const std::size_t n = y.size();
    const std::size_t padded = std::bit_ceil(n) * 8;
    const std::size_t bins = padded / 2 + 1;
    // FFTW-allocated buffers: the plan (and so the rounding) must not depend
    // on where the allocator happened to place the arrays.
    double* in = fftw_alloc_real(padded);
    fftw_complex* spectrum = fftw_alloc_complex(bins);
    std::fill(in, in + padded, 0.0);
    std::copy(y.begin(), y.end(), in);
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(padded), in, spectrum, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::vector<std::complex<double>> out(bins);
    for (std::size_t k = 0; k < bins; ++k) out[k] = {spectrum[k][0], spectrum[k][1]};
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(spectrum);
    }
    std::vector<double> power(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) power[k] = std::norm(out[k]);
    std::size_t best = 1;
    double mean = 0.0;
    for (std::size_t k = 1; k < power.size(); ++k) {
        mean += power[k];
        if (power[k] > power[best]) best = k;
    }
    mean /= static_cast<double>(power.size() - 1);
    double shift = 0.0;
    if (best + 1 < power.size()) {
        const double l = power[best - 1], c = power[best], r = power[best + 1];
        const double denom = l - 2.0 * c + r;
        if (denom != 0.0) shift = 0.5 * (l - r) / denom;
    }
    return {(static_cast<double>(best) + shift) / static_cast<double>(padded),
            mean > 0.0 ? power[best] / mean : 0.0};
}

}  // namespace

FrequencyFit extract_frequency(std::span<const double> t, std::span<const double> z) {
    const std::size_t n = t.size();
    if (z.size() != n) throw DimensionError("time and signal lengths differ");
    if (n < 16) throw FitError("too few samples for a frequency fit", 0.0);
    const double dt = t[1] - t[0];
    if (!(dt > 0.0)) throw FitError("sample times must increase", 0.0);

    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> y(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = z[i] - mean;
        var += y[i] * y[i];
    }
    const double rms = std::sqrt(var / static_cast<double>(n));
    if (rms <= 1e-12 * std::max(1.0, std::abs(mean)))
        throw NoOscillationError("signal is flat: no oscillation to fit");

    const auto [cycles, contrast] = spectral_peak(y);
    if (contrast < 50.0) throw NoOscillationError("no spectral peak above the noise floor");

    const double omega0 = 2.0 * constants::pi * cycles / dt;
    const double bin = 2.0 * constants::pi / (static_cast<double>(n) * dt);
    const double lo = std::max(0.5 * omega0, omega0 - bin);
    const double hi = omega0 + bin;
    auto objective = [&](double w) { return solve_linear(t, z, w).sse; };
    const auto [omega, sse] =
        boost::math::tools::brent_find_minima(objective, lo, hi, std::numeric_limits<double>::digits / 2);

    const LinearFit f = solve_linear(t, z, omega);
    FrequencyFit out;
    out.omega = omega;
    out.amplitude = std::hypot(f.a, f.b);
    out.phase = std::atan2(f.b, f.a);
    out.offset = f.c;
    out.residual = std::sqrt(sse / static_cast<double>(n));

    const double duration = t[n - 1] - t[0];
    const double periods = omega * duration / (2.0 * constants::pi);
    const double per_period = 2.0 * constants::pi / (omega * dt);
    if (periods < 4.0 - 1e-9)
        throw FitError("fewer than 4 periods sampled (" + std::to_string(periods) + ")", out.residual);
    if (per_period < 32.0)
        throw FitError("fewer than 32 samples per period", out.residual);
    if (out.residual > 0.5 * out.amplitude)
        throw FitError("sinusoidal fit did not converge", out.residual);
    return out;
}

}  // namespace bjj
