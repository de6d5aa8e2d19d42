#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bjj/junction.hpp"

namespace bjj {

/// TMS: Josephson equations with K, U from linear (Schroedinger) modes.
/// JGP: Josephson equations with GPE modes, I2 = I3 = 0.
/// TMGP: all overlap terms retained.
enum class ModelVariant { tms, jgp, tmgp };

const char* to_string(ModelVariant v);
ModelVariant parse_variant(const std::string& name);

/// Energy scales entering the two-mode equations (hbar = 1).
struct TwoModeCoefficients {
    double e0 = 0.0;
    double k = 0.0;
    double nu = 0.0;
    double ni2 = 0.0;
    double ni3 = 0.0;

    double two_k() const { return 2.0 * k; }
    double lambda() const { return nu / (2.0 * k); }
    /// Energy scale used for relative drift: max(|2K|, |NU|/2).
    double energy_scale() const;
};

/// Coefficients for a variant; JGP and TMS drop I2 and I3.
TwoModeCoefficients coefficients(const JunctionParams& p, ModelVariant v);

/// Population imbalance z = (N_L - N_R)/N and unwrapped relative phase
/// phi = arg c_R - arg c_L (the convention in which the z/phi equations
/// below follow from the amplitude equations).
struct TwoModeState {
    double z = 0.0;
    double phi = 0.0;
};

/// Complex mode amplitudes, |c_L|^2 + |c_R|^2 = 1.
struct AmplitudeState {
    std::complex<double> left{1.0, 0.0};
    std::complex<double> right{0.0, 0.0};

    static AmplitudeState from(TwoModeState s);
    TwoModeState observables() const;
    double norm() const { return std::norm(left) + std::norm(right); }
};

/// Uniformly sampled time series from any model.
struct Trajectory {
    std::string variant;
    TwoModeCoefficients coefficients;
    std::vector<double> t;
    std::vector<double> z;
    std::vector<double> phi;
    std::vector<double> energy;
    /// Set when integration stopped early (pole proximity, norm blow-up).
    std::optional<std::string> aborted;
    /// Largest |norm - 1| seen (amplitude integrator only).
    double max_norm_drift = 0.0;
    bool norm_flagged = false;

    std::size_t size() const { return t.size(); }
    double sample_interval() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
};

/// (dz/dt, dphi/dt) of the full two-mode equations; PoleError at |z| >= 1.
std::pair<double, double> tm_derivatives(TwoModeState s, const TwoModeCoefficients& c);

/// Canonical Hamiltonian; reduces to NU z^2/2 - 2K sqrt(1-z^2) cos(phi)
/// when I2 = I3 = 0.
double tm_energy(TwoModeState s, const TwoModeCoefficients& c);

/// Classical RK4 with fixed step. Stops with a partial trajectory once
/// |z| > 0.9999. Every `sample_every` steps is recorded (plus t = 0).
Trajectory tm_integrate(TwoModeState s0, const TwoModeCoefficients& c, ModelVariant v,
                        double t_end, double dt, std::size_t sample_every = 1);

/// RK4 on the complex-amplitude form; emits z and phi per sample.
/// Flags (does not throw) a norm drift above 1e-6.
Trajectory amp_integrate(AmplitudeState a0, const TwoModeCoefficients& c, double t_end, double dt,
                         std::size_t sample_every = 1);

/// d(c_L, c_R)/dt of the amplitude equations.
std::pair<std::complex<double>, std::complex<double>> amp_derivatives(const AmplitudeState& a,
                                                                       const TwoModeCoefficients& c);

/// Small-amplitude frequency. JGP/TMS: 2K sqrt(1 + Lambda); TMGP: the full
/// expression with I2, I3. PastCriticalError beyond the transition.
double plasma_frequency(const TwoModeCoefficients& c, ModelVariant v);

/// MQST onset. Empty when there is no self-trapping (Lambda <= 1 for JGP);
/// clamped to 1.
std::optional<double> critical_imbalance(const TwoModeCoefficients& c, ModelVariant v);
/// JGP formula with K -> K - N I3.
std::optional<double> critical_imbalance_renormalized(const TwoModeCoefficients& c);

enum class Regime { oscillating, self_trapped, critical };
const char* to_string(Regime r);

/// Energy threshold classification: H(z0, phi0) against the largest
/// energy reachable on the z = 0 line (H(0, pi) = 2K for JGP).
/// Within 1e-9 of the energy scale counts as critical.
Regime classify_regime(TwoModeState s0, const TwoModeCoefficients& c);
/// The threshold energy used by classify_regime.
double regime_threshold(const TwoModeCoefficients& c);

/// Trajectory-level classifier: trapped if z never changes sign.
Regime classify_trajectory(const Trajectory& traj);

}  // namespace bjj
