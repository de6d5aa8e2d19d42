#include "bjj/diag_oracle.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "bjj/error.hpp"
#include "bjj/units.hpp"

namespace bjj {

namespace {

Eigen::MatrixXd sine_basis(std::size_t n) {
    Eigen::MatrixXd u(n, n);
    const double dn = static_cast<double>(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double c = std::sqrt((m + 1 == n ? 1.0 : 2.0) / dn);
        for (std::size_t j = 0; j < n; ++j)
            u(j, m) = c * std::sin(constants::pi * static_cast<double>(m + 1) *
                                   (static_cast<double>(j) + 0.5) / dn);
    }
    return u;
}

}  // namespace

Spectrum diag_oracle(const Potential& potential, std::size_t k, KineticModel model) {
    const Grid& grid = potential.grid();
    const std::size_t n = grid.size();
    if (k == 0 || k > n) throw DimensionError("requested " + std::to_string(k) + " eigenpairs on a grid of " + std::to_string(n));
    const double dx = grid.dx();

    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    if (model == KineticModel::finite_difference) {
        const double off = -0.5 / (dx * dx);
        Eigen::VectorXd diag(n);
        Eigen::VectorXd sub = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n - 1), off);
        for (std::size_t j = 0; j < n; ++j) diag(j) = 1.0 / (dx * dx) + potential[j];
        // Ghost node psi_{-1} = -psi_0 at a wall half a cell away.
        diag(0) += 0.5 / (dx * dx);
        diag(n - 1) += 0.5 / (dx * dx);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        values = solver.eigenvalues();
        vectors = solver.eigenvectors();
    } else {
        const Eigen::MatrixXd u = sine_basis(n);
        Eigen::VectorXd lambda(n);
        const double L = grid.length();
        for (std::size_t m = 0; m < n; ++m) {
            const double km = constants::pi * static_cast<double>(m + 1) / L;
            lambda(m) = 0.5 * km * km;
        }
        Eigen::MatrixXd h = u * lambda.asDiagonal() * u.transpose();
        for (std::size_t j = 0; j < n; ++j) h(j, j) += potential[j];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
        values = solver.eigenvalues();
        vectors = solver.eigenvectors();
    }

    Spectrum out;
    const double scale = 1.0 / std::sqrt(dx);
    for (std::size_t i = 0; i < k; ++i) {
        out.energies.push_back(values(i));
        std::vector<double> v(n);
        // Sign fixed by the first node above 1e-8 of the peak being positive.
        const double peak = vectors.col(i).cwiseAbs().maxCoeff();
        double sign = 1.0;
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(vectors(j, i)) > 1e-8 * peak) {
                sign = vectors(j, i) > 0 ? 1.0 : -1.0;
                break;
            }
        for (std::size_t j = 0; j < n; ++j) v[j] = sign * scale * vectors(j, i);
        out.vectors.push_back(std::move(v));
    }
    return out;
}

}  // namespace bjj
