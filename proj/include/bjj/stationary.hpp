#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bjj/kinetic.hpp"
#include "bjj/potential.hpp"

namespace bjj {

/// Reflection parity about the grid centre. `none` applies no projection
/// and is what a tilted (asymmetric) ground state carries.
enum class Parity { even, odd, none };

const char* to_string(Parity p);

/// Knobs of the imaginary-time solver; every one is exposed in config.
struct SolverSettings {
    double imaginary_step = 1e-3;
    double energy_tolerance = 1e-12;
    double residual_tolerance = 1e-8;
    std::size_t max_iterations = 200000;
    KineticModel kinetic = KineticModel::spectral;
};

/// Real stationary state of H0 + gN |psi|^2, normalized to one.
struct StationaryState {
    std::vector<double> psi;
    /// Energy functional <H0> + gN/2 int psi^4.
    double energy = 0.0;
    /// Lagrange multiplier <H0> + gN int psi^4.
    double chemical_potential = 0.0;
    Parity parity = Parity::even;
    double interaction = 0.0;  // gN used
    double residual = 0.0;     // || (H0 + gN psi^2 - mu) psi ||
    std::size_t iterations = 0;
};

/// Ground state in the requested parity sector by imaginary-time descent.
///
/// Strang-split imaginary time (kinetic factor in the sine basis) brings the
/// state close; a preconditioned gradient stage then removes the splitting
/// bias so the residual reaches `residual_tolerance`. Parity `even` on an
/// asymmetric potential returns the unprojected ground state (tag `none`);
/// parity `odd` there is rejected with UnsupportedError. CollapseError when
/// the rms width drops below 4 dx, ConvergenceError after max_iterations.
StationaryState solve_stationary(const Potential& potential, double gN, Parity parity,
                                 const SolverSettings& settings = {});

/// psi(x) <- (psi(x) +/- psi(-x)) / 2, mirror-exact. No-op for `none`.
void project_parity(std::span<double> psi, Parity parity);
/// Scales to unit L2 norm on the grid; returns the previous norm.
double normalize(std::span<double> psi, const Grid& grid);

/// <psi|T|psi> + int V psi^2 + gN/2 int psi^4 for a real field.
double energy_functional(std::span<const double> psi, const Potential& potential, double gN,
                         KineticOperator& kinetic);
/// || (T + V + gN psi^2 - mu) psi || with mu the Rayleigh quotient.
double stationary_residual(std::span<const double> psi, const Potential& potential, double gN,
                           KineticOperator& kinetic);
/// sqrt(<x^2> - <x>^2) of the density.
double rms_width(std::span<const double> psi, const Grid& grid);

}  // namespace bjj
