#pragma once

#include <optional>
#include <vector>

#include "bjj/stationary.hpp"

namespace bjj {

/// Left/right localized modes built from the symmetric/antisymmetric pair.
struct ModePair {
    std::vector<double> left;
    std::vector<double> right;
    std::vector<double> ground;   // psi_g (even)
    std::vector<double> excited;  // psi_e (odd), sign chosen positive on the left
    double ground_energy = 0.0;
    double excited_energy = 0.0;
    double ground_chemical_potential = 0.0;
    double interaction = 0.0;  // gN the pair was solved with
    double left_fraction = 0.0;   // int_{x<c} psi_L^2
    double right_fraction = 0.0;  // int_{x>c} psi_R^2
};

/// psi_{L,R} = (psi_g +/- psi_e)/sqrt(2). ModeError unless the inputs are
/// normalized and tagged even/odd, or if their interactions differ.
ModePair make_modes(const StationaryState& ground, const StationaryState& excited, const Grid& grid);

/// Energy scales of the junction and everything derived from them.
/// Integrals are per atom; the `n_*` helpers multiply by N.
struct JunctionParams {
    double atom_number = 1.0;
    double coupling = 0.0;  // g (per atom)
    double e0 = 0.0;
    double k = 0.0;
    double u = 0.0;
    double i2 = 0.0;
    double i3 = 0.0;

    // Diagnostics.
    /// mu measured from the mean well-bottom energy, comparable to V0.
    double chemical_potential = 0.0;
    double barrier_height = 0.0;
    double well_frequency = 0.0;  // omega_x from the well curvature
    double oscillator_length = 0.0;  // a_ho = sqrt(hbar / m omega_x)
    double ground_energy = 0.0;
    double excited_energy = 0.0;
    /// |(2K - 2 N I3) - (E_e - E_g)|.
    double renormalization_mismatch = 0.0;

    /// Tunneling regime: barrier above the chemical potential.
    bool tunneling() const { return barrier_height > chemical_potential; }

    double nu() const { return atom_number * u; }
    double ni2() const { return atom_number * i2; }
    double ni3() const { return atom_number * i3; }
    double two_k() const { return 2.0 * k; }
    /// Lambda = NU / 2K.
    double lambda() const { return nu() / two_k(); }
    double rabi_frequency() const { return two_k(); }
    /// (2/hbar) K sqrt(1 + Lambda); empty past the Lambda = -1 transition.
    std::optional<double> josephson_frequency() const;
    /// (4K/NU) sqrt(Lambda - 1); empty when Lambda <= 1. Not clamped.
    std::optional<double> critical_imbalance() const;
};

/// Quadrature (cell-centred rectangle rule, consistent with the sine-basis
/// inner product) of E0, K, U, I2, I3 from the modes. `coupling` is the
/// per-atom g; U = I2 = I3 = 0 exactly when it is zero. DimensionError on
/// grid mismatch.
JunctionParams junction_integrals(const ModePair& modes, const Potential& potential,
                                  double coupling, double atom_number,
                                  KineticModel kinetic = KineticModel::spectral);

}  // namespace bjj
