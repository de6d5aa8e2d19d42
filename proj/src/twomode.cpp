#include "bjj/twomode.hpp"

#include <algorithm>
#include <cmath>

#include "bjj/error.hpp"
#include "bjj/units.hpp"

namespace bjj {

const char* to_string(ModelVariant v) {
    switch (v) {
        case ModelVariant::tms: return "TMS";
        case ModelVariant::jgp: return "JGP";
        case ModelVariant::tmgp: return "TMGP";
    }
    return "?";
}

ModelVariant parse_variant(const std::string& name) {
    if (name == "TMS") return ModelVariant::tms;
    if (name == "JGP") return ModelVariant::jgp;
    if (name == "TMGP") return ModelVariant::tmgp;
    throw ConfigError("model", "unknown two-mode variant \"" + name + "\"");
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::oscillating: return "oscillating";
        case Regime::self_trapped: return "self_trapped";
        case Regime::critical: return "critical";
    }
    return "?";
}

double TwoModeCoefficients::energy_scale() const {
    return std::max(std::abs(2.0 * k), 0.5 * std::abs(nu));
}

TwoModeCoefficients coefficients(const JunctionParams& p, ModelVariant v) {
    TwoModeCoefficients c;
    c.e0 = p.e0;
    c.k = p.k;
    c.nu = p.nu();
    if (v == ModelVariant::tmgp) {
        c.ni2 = p.ni2();
        c.ni3 = p.ni3();
    }
    return c;
}

AmplitudeState AmplitudeState::from(TwoModeState s) {
    const double z = std::clamp(s.z, -1.0, 1.0);
    AmplitudeState a;
    a.left = {std::sqrt(0.5 * (1.0 + z)), 0.0};
    a.right = std::polar(std::sqrt(0.5 * (1.0 - z)), s.phi);
    return a;
}

TwoModeState AmplitudeState::observables() const {
    const double nl = std::norm(left);
    const double nr = std::norm(right);
    return {(nl - nr) / (nl + nr), std::arg(right * std::conj(left))};
}

std::pair<double, double> tm_derivatives(TwoModeState s, const TwoModeCoefficients& c) {
    const double z = s.z;
    const double one_minus = 1.0 - z * z;
    if (!(one_minus > 0.0)) throw PoleError("two-mode equations are singular at |z| = 1");
    const double root = std::sqrt(one_minus);
    const double tunnel = 2.0 * c.k - 2.0 * c.ni3;  // 2K - 2 N I3
    const double dz = -tunnel * root * std::sin(s.phi) + c.ni2 * one_minus * std::sin(2.0 * s.phi);
    const double dphi = (c.nu - 2.0 * c.ni2) * z + tunnel * z / root * std::cos(s.phi) -
                        c.ni2 * z * std::cos(2.0 * s.phi);
    return {dz, dphi};
}

double tm_energy(TwoModeState s, const TwoModeCoefficients& c) {
    const double one_minus = std::max(0.0, 1.0 - s.z * s.z);
    return (c.nu - 2.0 * c.ni2) * 0.5 * s.z * s.z +
           (-2.0 * c.k + 2.0 * c.ni3) * std::sqrt(one_minus) * std::cos(s.phi) +
           0.5 * c.ni2 * one_minus * std::cos(2.0 * s.phi);
}

namespace {

constexpr double pole_limit = 0.9999;

std::size_t step_count(double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt", "must be finite and > 0");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end", "must be finite and > 0");
    return static_cast<std::size_t>(std::llround(t_end / dt));
}

double wrap_pi(double a) { return std::remainder(a, 2.0 * constants::pi); }

}  // namespace

Trajectory tm_integrate(TwoModeState s0, const TwoModeCoefficients& c, ModelVariant v,
                        double t_end, double dt, std::size_t sample_every) {
    if (std::abs(s0.z) > 0.999) throw ConfigError("z0", "|z0| must be <= 0.999");
    if (sample_every == 0) sample_every = 1;
    const std::size_t steps = step_count(t_end, dt);

    Trajectory traj;
    traj.variant = to_string(v);
    traj.coefficients = c;
    const std::size_t reserve = steps / sample_every + 1;
    traj.t.reserve(reserve);
    traj.z.reserve(reserve);
    traj.phi.reserve(reserve);
    traj.energy.reserve(reserve);
    auto record = [&](std::size_t step, TwoModeState s) {
        traj.t.push_back(static_cast<double>(step) * dt);
        traj.z.push_back(s.z);
        traj.phi.push_back(s.phi);
        traj.energy.push_back(tm_energy(s, c));
    };

    TwoModeState s = s0;
    record(0, s);
    try {
        for (std::size_t step = 1; step <= steps; ++step) {
            const auto [k1z, k1p] = tm_derivatives(s, c);
            const auto [k2z, k2p] = tm_derivatives({s.z + 0.5 * dt * k1z, s.phi + 0.5 * dt * k1p}, c);
            const auto [k3z, k3p] = tm_derivatives({s.z + 0.5 * dt * k2z, s.phi + 0.5 * dt * k2p}, c);
            const auto [k4z, k4p] = tm_derivatives({s.z + dt * k3z, s.phi + dt * k3p}, c);
            s.z += dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
            s.phi += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            if (std::abs(s.z) > pole_limit) {
                record(step, s);
                traj.aborted = "|z| exceeded " + std::to_string(pole_limit) + " at t = " +
                               std::to_string(static_cast<double>(step) * dt);
                return traj;
            }
            if (step % sample_every == 0) record(step, s);
        }
    } catch (const PoleError& e) {
        traj.aborted = std::string("pole reached mid-step: ") + e.what();
    }
    return traj;
}

std::pair<std::complex<double>, std::complex<double>> amp_derivatives(const AmplitudeState& a,
                                                                       const TwoModeCoefficients& c) {
    const auto cl = a.left;
    const auto cr = a.right;
    const double nl = std::norm(cl);
    const double nr = std::norm(cr);
    const std::complex<double> m11 = c.e0 + c.nu * nl + c.ni3 * std::conj(cr) * cl + 2.0 * c.ni2 * nr;
    const std::complex<double> m12 = -c.k + 2.0 * c.ni3 * nl + c.ni2 * std::conj(cl) * cr + c.ni3 * nr;
    const std::complex<double> m21 = -c.k + 2.0 * c.ni3 * nr + c.ni2 * std::conj(cr) * cl + c.ni3 * nl;
    const std::complex<double> m22 = c.e0 + c.nu * nr + c.ni3 * std::conj(cl) * cr + 2.0 * c.ni2 * nl;
    const std::complex<double> minus_i{0.0, -1.0};
    return {minus_i * (m11 * cl + m12 * cr), minus_i * (m21 * cl + m22 * cr)};
}

Trajectory amp_integrate(AmplitudeState a0, const TwoModeCoefficients& c, double t_end, double dt,
                         std::size_t sample_every) {
    if (std::abs(a0.norm() - 1.0) > 1e-10) throw ConfigError("amplitudes", "initial amplitudes are not normalized");
    if (sample_every == 0) sample_every = 1;
    const std::size_t steps = step_count(t_end, dt);

    Trajectory traj;
    traj.variant = "amplitude";
    traj.coefficients = c;
    double phi_prev = a0.observables().phi;
    auto record = [&](std::size_t step, const AmplitudeState& a) {
        TwoModeState s = a.observables();
        s.phi = phi_prev + wrap_pi(s.phi - phi_prev);
        phi_prev = s.phi;
        traj.t.push_back(static_cast<double>(step) * dt);
        traj.z.push_back(s.z);
        traj.phi.push_back(s.phi);
        traj.energy.push_back(tm_energy(s, c));
        const double drift = std::abs(a.norm() - 1.0);
        traj.max_norm_drift = std::max(traj.max_norm_drift, drift);
    };

    AmplitudeState a = a0;
    record(0, a);
    auto shifted = [](const AmplitudeState& base, double h, std::complex<double> dl, std::complex<double> dr) {
        AmplitudeState out;
        out.left = base.left + h * dl;
        out.right = base.right + h * dr;
        return out;
    };
    for (std::size_t step = 1; step <= steps; ++step) {
        const auto [k1l, k1r] = amp_derivatives(a, c);
        const auto [k2l, k2r] = amp_derivatives(shifted(a, 0.5 * dt, k1l, k1r), c);
        const auto [k3l, k3r] = amp_derivatives(shifted(a, 0.5 * dt, k2l, k2r), c);
        const auto [k4l, k4r] = amp_derivatives(shifted(a, dt, k3l, k3r), c);
        a.left += dt / 6.0 * (k1l + 2.0 * k2l + 2.0 * k3l + k4l);
        a.right += dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        // Keep phases unwrapped: track every step, record on the sampling grid.
        if (step % sample_every == 0) {
            record(step, a);
        } else {
            const double raw = std::arg(a.right * std::conj(a.left));
            phi_prev += wrap_pi(raw - phi_prev);
            traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(a.norm() - 1.0));
        }
        if (!std::isfinite(a.norm())) {
            traj.aborted = "amplitudes became non-finite";
            break;
        }
    }
    traj.norm_flagged = traj.max_norm_drift > 1e-6;
    return traj;
}

double plasma_frequency(const TwoModeCoefficients& c, ModelVariant v) {
    if (v != ModelVariant::tmgp) {
        const double lambda = c.lambda();
        if (lambda < -1.0) throw PastCriticalError("Lambda < -1: beyond the symmetry-breaking transition");
        return c.two_k() * std::sqrt(1.0 + lambda);
    }
    const double two_k = c.two_k();
    const double first = 1.0 - 2.0 * (c.ni3 + c.ni2) / two_k;
    const double second = 1.0 + c.nu / two_k - (3.0 * c.ni2 + 2.0 * c.ni3) / two_k;
    const double product = first * second;
    if (product < 0.0 || first < 0.0)
        throw PastCriticalError("negative small-amplitude stiffness: beyond the symmetry-breaking transition");
    return two_k * std::sqrt(product);
}

std::optional<double> critical_imbalance(const TwoModeCoefficients& c, ModelVariant v) {
    if (c.nu == 0.0) return std::nullopt;
    double zc = 0.0;
    if (v != ModelVariant::tmgp) {
        const double lambda = c.lambda();
        if (!(lambda > 1.0)) return std::nullopt;
        zc = 4.0 * c.k / c.nu * std::sqrt(lambda - 1.0);
    } else {
        const double u_ratio = c.ni2 / c.nu;  // I2 / U
        const double a = 1.0 - c.ni3 / c.k;
        const double b = c.nu / c.two_k() - 1.0 + (2.0 * c.ni3 - 3.0 * c.ni2) / c.two_k();
        const double pre = 4.0 * c.k / c.nu / (1.0 - 3.0 * u_ratio);
        if (!(a * b > 0.0) || !(pre > 0.0)) return std::nullopt;
        zc = pre * std::sqrt(a * b);
    }
    return std::min(zc, 1.0);
}

std::optional<double> critical_imbalance_renormalized(const TwoModeCoefficients& c) {
    TwoModeCoefficients r = c;
    r.k = c.k - c.ni3;
    r.ni2 = r.ni3 = 0.0;
    return critical_imbalance(r, ModelVariant::jgp);
}

double regime_threshold(const TwoModeCoefficients& c) {
    // Largest H(0, phi): candidates phi = 0, pi and the interior extremum
    // cos(phi) = -b/(2 c2) of b cos(phi) + c2/2 cos(2 phi).
    const double b = -2.0 * c.k + 2.0 * c.ni3;
    double best = std::max(tm_energy({0.0, 0.0}, c), tm_energy({0.0, constants::pi}, c));
    if (c.ni2 != 0.0) {
        const double cosine = -b / (2.0 * c.ni2);
        if (std::abs(cosine) <= 1.0) best = std::max(best, tm_energy({0.0, std::acos(cosine)}, c));
    }
    return best;
}

Regime classify_regime(TwoModeState s0, const TwoModeCoefficients& c) {
    if (std::abs(s0.z) > 1.0) throw ConfigError("z0", "|z0| must be <= 1");
    const double h = tm_energy(s0, c);
    const double threshold = regime_threshold(c);
    if (std::abs(h - threshold) <= 1e-9 * c.energy_scale()) return Regime::critical;
    return h > threshold ? Regime::self_trapped : Regime::oscillating;
}

Regime classify_trajectory(const Trajectory& traj) {
    if (traj.z.empty()) throw ConfigError("trajectory", "empty trajectory");
    const double sign0 = traj.z.front();
    if (sign0 == 0.0) return Regime::oscillating;
    for (double z : traj.z)
        if (z * sign0 <= 0.0) return Regime::oscillating;
    return Regime::self_trapped;
}

}  // namespace bjj
