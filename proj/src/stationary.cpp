#include "bjj/stationary.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "bjj/error.hpp"

namespace bjj {

const char* to_string(Parity p) {
    switch (p) {
        case Parity::even: return "even";
        case Parity::odd: return "odd";
        case Parity::none: return "none";
    }
    return "?";
}

void project_parity(std::span<double> psi, Parity parity) {
    if (parity == Parity::none) return;
    const std::size_t n = psi.size();
    const double sign = parity == Parity::even ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n / 2; ++j) {
        const double s = 0.5 * (psi[j] + sign * psi[n - 1 - j]);
        psi[j] = s;
        psi[n - 1 - j] = sign * s;
    }
}

double normalize(std::span<double> psi, const Grid& grid) {
    double s = 0.0;
    for (double v : psi) s += v * v;
    const double norm = std::sqrt(s * grid.dx());
    const double inv = 1.0 / norm;
    for (double& v : psi) v *= inv;
    return norm;
}

double rms_width(std::span<const double> psi, const Grid& grid) {
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const double d = psi[j] * psi[j];
        m0 += d;
        m1 += d * grid[j];
        m2 += d * grid[j] * grid[j];
    }
    const double mean = m1 / m0;
    return std::sqrt(std::max(0.0, m2 / m0 - mean * mean));
}

namespace {

struct Parts {
    double kinetic = 0.0;
    double potential = 0.0;
    double quartic = 0.0;  // int psi^4
};

Parts energy_parts(std::span<const double> psi, const Potential& pot, KineticOperator& kin,
                   std::vector<double>& scratch) {
    const double dx = pot.grid().dx();
    kin.apply(psi, scratch);
    Parts p;
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const double d = psi[j] * psi[j];
        p.kinetic += psi[j] * scratch[j];
        p.potential += pot[j] * d;
        p.quartic += d * d;
    }
    p.kinetic *= dx;
    p.potential *= dx;
    p.quartic *= dx;
    return p;
}

double energy_of(const Parts& p, double gN) { return p.kinetic + p.potential + 0.5 * gN * p.quartic; }

/// out = (T + V + gN rho) in, with rho the density of `density_of`.
void apply_linearized(std::span<const double> in, std::span<const double> density_of,
                      const Potential& pot, double gN, KineticOperator& kin, std::span<double> out) {
    kin.apply(in, out);
    for (std::size_t j = 0; j < in.size(); ++j)
        out[j] += (pot[j] + gN * density_of[j] * density_of[j]) * in[j];
}

double dot(std::span<const double> a, std::span<const double> b, double dx) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0) * dx;
}

class Descent {
public:
    Descent(const Potential& pot, double gN, Parity parity, const SolverSettings& s)
        : pot_(pot), grid_(pot.grid()), gN_(gN), parity_(parity), settings_(s),
          kin_(grid_, s.kinetic), n_(grid_.size()), psi_(n_), work_(n_), hpsi_(n_), dir_(n_),
          hdir_(n_), trial_(n_), prev_(n_), hprev_(n_) {}

    StationaryState run() {
        initial_guess();
        imaginary_time();
        polish();
        StationaryState out;
        const Parts p = energy_parts(psi_, pot_, kin_, work_);
        out.energy = energy_of(p, gN_);
        out.chemical_potential = out.energy + 0.5 * gN_ * p.quartic;
        out.residual = stationary_residual(psi_, pot_, gN_, kin_);
        out.parity = parity_;
        out.interaction = gN_;
        out.iterations = iterations_;
        out.psi = std::move(psi_);
        return out;
    }

private:
    void initial_guess() {
        // Lowest box mode of the right parity.
        const double L = grid_.length();
        const double harmonic = parity_ == Parity::odd ? 2.0 : 1.0;
        for (std::size_t j = 0; j < n_; ++j)
            psi_[j] = std::sin(harmonic * constants::pi * (grid_[j] - grid_.x_min()) / L);
        project_parity(psi_, parity_);
        normalize(psi_, grid_);
    }

    void guard_collapse() {
        if (gN_ < 0.0 && rms_width(psi_, grid_) < 4.0 * grid_.dx())
            throw CollapseError("attractive state collapsed below 4 dx rms width");
    }

    double energy() { return energy_of(energy_parts(psi_, pot_, kin_, work_), gN_); }

    void imaginary_time() {
        constexpr std::size_t check_every = 10;
        // Loose stop; the polish stage takes the state the rest of the way.
        const double loose = std::max(settings_.energy_tolerance, 1e-9);
        // Soft modes (near-degenerate tilted wells) relax slowly here, so the
        // stage is capped and the polish handles the tail.
        const std::size_t budget = std::min(settings_.max_iterations / 2, std::size_t{20000});
        double dtau = settings_.imaginary_step;
        double e_prev = energy();
        std::vector<double> saved = psi_;
        while (iterations_ < budget) {
            for (std::size_t k = 0; k < check_every; ++k) {
                kin_.propagate_imaginary(psi_, 0.5 * dtau);
                for (std::size_t j = 0; j < n_; ++j)
                    psi_[j] *= std::exp(-(pot_[j] + gN_ * psi_[j] * psi_[j]) * dtau);
                kin_.propagate_imaginary(psi_, 0.5 * dtau);
                project_parity(psi_, parity_);
                normalize(psi_, grid_);
                ++iterations_;
            }
            if (!std::isfinite(psi_[n_ / 2])) throw ConvergenceError("imaginary time diverged", NAN);
            guard_collapse();
            const double e = energy();
            if (e > e_prev + 1e-14 * std::abs(e_prev)) {
                // Overshoot: step back and halve.
                psi_ = saved;
                dtau *= 0.5;
                if (dtau < 1e-12) return;
                continue;
            }
            saved = psi_;
            if (std::abs(e - e_prev) < loose * check_every) return;
            e_prev = e;
        }
    }

    /// Preconditioned steepest descent with a Rayleigh-Ritz step on the
    /// linearized Hamiltonian and an energy backtrack for the nonlinearity.
    void polish() {
        const double dx = grid_.dx();
        const double shift = std::max(1.0, pot_.max_value() - pot_.min_value());
        double e = energy();
        double e_prev = e;
        while (true) {
            apply_linearized(psi_, psi_, pot_, gN_, kin_, hpsi_);
            const double mu = dot(psi_, hpsi_, dx);
            double rr = 0.0;
            for (std::size_t j = 0; j < n_; ++j) {
                dir_[j] = hpsi_[j] - mu * psi_[j];
                rr += dir_[j] * dir_[j];
            }
            const double residual = std::sqrt(rr * dx);
            if (residual < settings_.residual_tolerance &&
                std::abs(e - e_prev) < settings_.energy_tolerance)
                return;
            if (iterations_ >= settings_.max_iterations)
                throw ConvergenceError("stationary solve exhausted max_iterations", residual);
            ++iterations_;

            kin_.precondition(dir_, shift);
            project_parity(dir_, parity_);
            const double overlap = dot(psi_, dir_, dx);
            for (std::size_t j = 0; j < n_; ++j) dir_[j] -= overlap * psi_[j];
            const double dnorm = std::sqrt(dot(dir_, dir_, dx));
            if (!(dnorm > 0.0)) return;
            for (double& v : dir_) v /= dnorm;

            // Lowest Ritz pair of the linearized H in span{psi, dir, prev}, the
            // previous step giving the locally optimal (LOBPCG-like) update.
            std::size_t dim = 2;
            if (have_prev_) {
                double pd = dot(prev_, dir_, dx), pp = dot(prev_, psi_, dx);
                for (std::size_t j = 0; j < n_; ++j) prev_[j] -= pp * psi_[j] + pd * dir_[j];
                const double pn = std::sqrt(dot(prev_, prev_, dx));
                if (pn > 1e-8) {
                    for (double& v : prev_) v /= pn;
                    dim = 3;
                }
            }
            apply_linearized(dir_, psi_, pot_, gN_, kin_, hdir_);
            Eigen::Matrix3d h = Eigen::Matrix3d::Identity();
            h(0, 0) = mu;
            h(0, 1) = h(1, 0) = dot(psi_, hdir_, dx);
            // The quartic term curves the energy by an extra 2 gN psi^2 along
            // directions orthogonal to psi; without it the step overshoots.
            auto curvature = [&](std::span<const double> a, std::span<const double> b) {
                double s = 0.0;
                for (std::size_t j = 0; j < n_; ++j) s += psi_[j] * psi_[j] * a[j] * b[j];
                return 2.0 * gN_ * s * dx;
            };
            h(1, 1) = dot(dir_, hdir_, dx) + curvature(dir_, dir_);
            if (dim == 3) {
                apply_linearized(prev_, psi_, pot_, gN_, kin_, hprev_);
                h(0, 2) = h(2, 0) = dot(psi_, hprev_, dx);
                h(1, 2) = h(2, 1) = dot(dir_, hprev_, dx) + curvature(dir_, prev_);
                h(2, 2) = dot(prev_, hprev_, dx) + curvature(prev_, prev_);
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h.topLeftCorner(dim, dim));
            Eigen::VectorXd v = eig.eigenvectors().col(0);
            if (std::abs(v(0)) < 0.5) {
                // Attractive interactions can make the corrected model
                // indefinite; fall back to the frozen-density pair.
                dim = 2;
                h(1, 1) = dot(dir_, hdir_, dx);
                eig.compute(h.topLeftCorner(2, 2));
                v = eig.eigenvectors().col(0);
                if (std::abs(v(0)) < 1e-3) throw ConvergenceError("Ritz step left the state", residual);
            }
            double s_dir = v(1) / v(0);
            double s_prev = dim == 3 ? v(2) / v(0) : 0.0;

            // Energy differences below this are roundoff, not ascent.
            const double slack = 1e-13 * std::max(1.0, std::abs(e));
            double e_new = e;
            for (int halving = 0; halving < 40; ++halving) {
                for (std::size_t j = 0; j < n_; ++j)
                    trial_[j] = psi_[j] + s_dir * dir_[j] + (dim == 3 ? s_prev * prev_[j] : 0.0);
                normalize(trial_, grid_);
                e_new = energy_of(energy_parts(trial_, pot_, kin_, work_), gN_);
                if (e_new <= e + slack) break;
                s_dir *= 0.5;
                s_prev *= 0.5;
            }
            if (e_new > e + slack) {
                // No descent left at double precision: accept the state as is.
                if (residual < settings_.residual_tolerance) return;
                throw ConvergenceError("descent stalled", residual);
            }
            for (std::size_t j = 0; j < n_; ++j) prev_[j] = trial_[j] - psi_[j];
            have_prev_ = true;
            psi_.swap(trial_);
            project_parity(psi_, parity_);
            e_prev = e;
            e = e_new;
            guard_collapse();
        }
    }

    const Potential& pot_;
    const Grid& grid_;
    double gN_;
    Parity parity_;
    SolverSettings settings_;
    KineticOperator kin_;
    std::size_t n_;
    std::vector<double> psi_, work_, hpsi_, dir_, hdir_, trial_, prev_, hprev_;
    bool have_prev_ = false;
    std::size_t iterations_ = 0;
};

}  // namespace

double energy_functional(std::span<const double> psi, const Potential& potential, double gN,
                         KineticOperator& kinetic) {
    std::vector<double> scratch(psi.size());
    return energy_of(energy_parts(psi, potential, kinetic, scratch), gN);
}

double stationary_residual(std::span<const double> psi, const Potential& potential, double gN,
                           KineticOperator& kinetic) {
    const double dx = potential.grid().dx();
    std::vector<double> h(psi.size());
    apply_linearized(psi, psi, potential, gN, kinetic, h);
    const double mu = dot(psi, h, dx) / dot(psi, psi, dx);
    double rr = 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const double r = h[j] - mu * psi[j];
        rr += r * r;
    }
    return std::sqrt(rr * dx);
}

StationaryState solve_stationary(const Potential& potential, double gN, Parity parity,
                                 const SolverSettings& settings) {
    if (!std::isfinite(gN)) throw ConfigError("interaction", "gN is not finite");
    if (!potential.is_symmetric()) {
        if (parity == Parity::odd)
            throw UnsupportedError("odd-parity state requested on an asymmetric potential");
        parity = Parity::none;
    }
    if (settings.imaginary_step <= 0.0) throw ConfigError("imaginary_step", "must be > 0");
    return Descent(potential, gN, parity, settings).run();
}

}  // namespace bjj
