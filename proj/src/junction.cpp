#include "bjj/junction.hpp"

#include <cmath>

#include "bjj/error.hpp"

namespace bjj {

std::optional<double> JunctionParams::josephson_frequency() const {
    const double l = lambda();
    if (!(l >= -1.0)) return std::nullopt;
    return two_k() * std::sqrt(1.0 + l);
}

std::optional<double> JunctionParams::critical_imbalance() const {
    const double l = lambda();
    if (nu() == 0.0 || !(l > 1.0)) return std::nullopt;
    return 4.0 * k / nu() * std::sqrt(l - 1.0);
}

ModePair make_modes(const StationaryState& ground, const StationaryState& excited, const Grid& grid) {
    if (ground.parity != Parity::even || excited.parity != Parity::odd)
        throw ModeError("modes need an even ground state and an odd excited state");
    if (ground.psi.size() != grid.size() || excited.psi.size() != grid.size())
        throw DimensionError("mode states do not match grid");
    if (ground.interaction != excited.interaction)
        throw ModeError("ground and excited states were solved with different interactions");
    auto norm2 = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return s * grid.dx();
    };
    if (std::abs(norm2(ground.psi) - 1.0) > 1e-8 || std::abs(norm2(excited.psi) - 1.0) > 1e-8)
        throw ModeError("mode inputs are not normalized");

    const std::size_t n = grid.size();
    ModePair m;
    m.ground = ground.psi;
    m.excited = excited.psi;
    double left_sum = 0.0;
    for (std::size_t j = 0; j < n / 2; ++j) left_sum += m.excited[j];
    if (left_sum < 0.0)
        for (double& v : m.excited) v = -v;
    if (m.ground[n / 2] < 0.0)
        for (double& v : m.ground) v = -v;

    const double r = 1.0 / std::sqrt(2.0);
    m.left.resize(n);
    m.right.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        m.left[j] = r * (m.ground[j] + m.excited[j]);
        m.right[j] = r * (m.ground[j] - m.excited[j]);
    }
    const double c = grid.center();
    for (std::size_t j = 0; j < n; ++j) {
        if (grid[j] < c) m.left_fraction += m.left[j] * m.left[j];
        else m.right_fraction += m.right[j] * m.right[j];
    }
    m.left_fraction *= grid.dx();
    m.right_fraction *= grid.dx();
    m.ground_energy = ground.energy;
    m.excited_energy = excited.energy;
    m.ground_chemical_potential = ground.chemical_potential;
    m.interaction = ground.interaction;
    return m;
}

JunctionParams junction_integrals(const ModePair& modes, const Potential& potential,
                                  double coupling, double atom_number, KineticModel kinetic) {
    const Grid& grid = potential.grid();
    const std::size_t n = grid.size();
    if (modes.left.size() != n || modes.right.size() != n)
        throw DimensionError("modes and potential live on different grids");

    KineticOperator kin(grid, kinetic);
    std::vector<double> t_left(n), t_right(n);
    kin.apply(modes.left, t_left);
    kin.apply(modes.right, t_right);

    double e0_l = 0.0, e0_r = 0.0, cross = 0.0, q_l = 0.0, q_r = 0.0, q2 = 0.0, q3_l = 0.0, q3_r = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double l = modes.left[j];
        const double r = modes.right[j];
        const double v = potential[j];
        e0_l += l * t_left[j] + v * l * l;
        e0_r += r * t_right[j] + v * r * r;
        // Symmetrized <L|H0|R>.
        cross += 0.5 * (l * t_right[j] + r * t_left[j]) + v * l * r;
        q_l += l * l * l * l;
        q_r += r * r * r * r;
        q2 += l * l * r * r;
        q3_l += l * l * l * r;
        q3_r += r * r * r * l;
    }
    const double dx = grid.dx();
    JunctionParams p;
    p.atom_number = atom_number;
    p.coupling = coupling;
    p.e0 = 0.5 * (e0_l + e0_r) * dx;
    p.k = -cross * dx;
    p.u = coupling * 0.5 * (q_l + q_r) * dx;
    p.i2 = coupling * q2 * dx;
    p.i3 = coupling * 0.5 * (q3_l + q3_r) * dx;

    p.chemical_potential = modes.ground_chemical_potential -
                           0.5 * (potential.left_minimum_value() + potential.right_minimum_value());
    p.barrier_height = potential.barrier_height();
    p.well_frequency = std::sqrt(std::max(0.0, potential.well_curvature()));
    p.oscillator_length = p.well_frequency > 0.0 ? 1.0 / std::sqrt(p.well_frequency) : 0.0;
    p.ground_energy = modes.ground_energy;
    p.excited_energy = modes.excited_energy;
    p.renormalization_mismatch =
        std::abs((2.0 * p.k - 2.0 * p.ni3()) - (modes.excited_energy - modes.ground_energy));
    return p;
}

}  // namespace bjj
