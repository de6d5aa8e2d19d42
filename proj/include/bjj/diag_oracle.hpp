#pragma once

#include <cstddef>
#include <vector>

#include "bjj/kinetic.hpp"
#include "bjj/potential.hpp"

namespace bjj {

/// Lowest eigenpairs of the discretized linear Hamiltonian, ascending.
/// Eigenvectors are normalized on the grid (sum psi^2 dx = 1).
struct Spectrum {
    std::vector<double> energies;
    std::vector<std::vector<double>> vectors;
};

/// Direct diagonalization, independent of the imaginary-time path.
///
/// `finite_difference`: the three-point tridiagonal Hamiltonian with
/// Dirichlet walls half a cell outside the end nodes, solved as a
/// tridiagonal problem. `spectral`: the dense matrix of the sine-mode
/// kinetic operator assembled from explicit sine vectors plus diag(V).
/// DimensionError when k exceeds the grid size.
Spectrum diag_oracle(const Potential& potential, std::size_t k,
                     KineticModel model = KineticModel::finite_difference);

}  // namespace bjj
