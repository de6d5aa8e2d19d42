#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "bjj/grid.hpp"

namespace bjj {

/// FFTW's planner is not re-entrant (execution is); every plan creation
/// and destruction in the toolkit holds this lock.
std::mutex& fftw_planner_mutex();

/// Discretization of -1/2 d^2/dx^2 with Dirichlet walls.
/// `spectral` uses the exact sine-mode dispersion k^2/2; `finite_difference`
/// uses the three-point stencil, whose eigenvectors are the same sine modes.
enum class KineticModel { spectral, finite_difference };

/// DST-II / DST-III pair on a cell-centred grid (FFTW RODFT10 / RODFT01).
/// Owns its plans and buffers; one instance per thread of work.
class SineTransform {
public:
    explicit SineTransform(std::size_t n);
    ~SineTransform();
    SineTransform(const SineTransform&) = delete;
    SineTransform& operator=(const SineTransform&) = delete;
    SineTransform(SineTransform&&) noexcept;
    SineTransform& operator=(SineTransform&&) noexcept;

    std::size_t size() const { return n_; }
    /// Sine coefficients, unnormalized: inverse(forward(f)) = 2n f.
    void forward(std::span<const double> in, std::span<double> out);
    void inverse(std::span<const double> in, std::span<double> out);

private:
    struct Plans;
    std::size_t n_;
    std::unique_ptr<Plans> plans_;
};

/// Kinetic energy operator diagonal in the sine basis.
class KineticOperator {
public:
    KineticOperator(const Grid& grid, KineticModel model);

    KineticModel model() const { return model_; }
    std::size_t size() const { return eigenvalues_.size(); }
    /// Eigenvalue of mode m (ascending in m).
    std::span<const double> eigenvalues() const { return eigenvalues_; }

    /// out = T in.
    void apply(std::span<const double> in, std::span<double> out);
    void apply(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);
    /// psi <- exp(-T tau) psi.
    void propagate_imaginary(std::span<double> psi, double tau);
    /// psi <- exp(-i T dt) psi.
    void propagate(std::span<std::complex<double>> psi, double dt);
    /// r <- (T + shift)^-1 r, shift > 0.
    void precondition(std::span<double> r, double shift);

private:
    template <class F>
    void diagonal(std::span<const double> in, std::span<double> out, F&& factor);

    KineticModel model_;
    std::vector<double> eigenvalues_;
    SineTransform dst_;
    std::vector<double> coeff_;
    std::vector<double> coeff_im_;
    std::vector<double> re_;
    std::vector<double> im_;
    double dt_cached_ = 0.0;
    std::vector<std::complex<double>> phase_;
    double tau_cached_ = 0.0;
    std::vector<double> decay_;
};

}  // namespace bjj
