#include "bjj/kinetic.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "bjj/error.hpp"
#include "bjj/units.hpp"

namespace bjj {

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct SineTransform::Plans {
    double* buffer_in = nullptr;
    double* buffer_out = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;

    explicit Plans(std::size_t n) {
        const int size = static_cast<int>(n);
        std::lock_guard lock(fftw_planner_mutex());
        buffer_in = fftw_alloc_real(n);
        buffer_out = fftw_alloc_real(n);
        // FFTW_ESTIMATE picks the same algorithm every run: needed for
        // bit-identical outputs.
        forward = fftw_plan_r2r_1d(size, buffer_in, buffer_out, FFTW_RODFT10, FFTW_ESTIMATE);
        inverse = fftw_plan_r2r_1d(size, buffer_in, buffer_out, FFTW_RODFT01, FFTW_ESTIMATE);
    }
    ~Plans() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(inverse);
        fftw_free(buffer_in);
        fftw_free(buffer_out);
    }
};

SineTransform::SineTransform(std::size_t n) : n_(n), plans_(std::make_unique<Plans>(n)) {}
SineTransform::~SineTransform() = default;
SineTransform::SineTransform(SineTransform&&) noexcept = default;
SineTransform& SineTransform::operator=(SineTransform&&) noexcept = default;

void SineTransform::forward(std::span<const double> in, std::span<double> out) {
    if (in.size() != n_ || out.size() != n_) throw DimensionError("sine transform size mismatch");
    std::copy(in.begin(), in.end(), plans_->buffer_in);
    fftw_execute(plans_->forward);
    std::copy(plans_->buffer_out, plans_->buffer_out + n_, out.begin());
}

void SineTransform::inverse(std::span<const double> in, std::span<double> out) {
    if (in.size() != n_ || out.size() != n_) throw DimensionError("sine transform size mismatch");
    std::copy(in.begin(), in.end(), plans_->buffer_in);
    fftw_execute(plans_->inverse);
    std::copy(plans_->buffer_out, plans_->buffer_out + n_, out.begin());
}

KineticOperator::KineticOperator(const Grid& grid, KineticModel model)
    : model_(model), eigenvalues_(grid.size()), dst_(grid.size()), coeff_(grid.size()), coeff_im_(grid.size()),
      re_(grid.size()), im_(grid.size()) {
    const double L = grid.length();
    const double dx = grid.dx();
    for (std::size_t m = 0; m < eigenvalues_.size(); ++m) {
        const double k = constants::pi * static_cast<double>(m + 1) / L;
        if (model == KineticModel::spectral) {
            eigenvalues_[m] = 0.5 * k * k;
        } else {
            const double s = std::sin(0.5 * k * dx);
            eigenvalues_[m] = 2.0 * s * s / (dx * dx);
        }
    }
}

template <class F>
void KineticOperator::diagonal(std::span<const double> in, std::span<double> out, F&& factor) {
    const double norm = 1.0 / (2.0 * static_cast<double>(size()));
    dst_.forward(in, coeff_);
    for (std::size_t m = 0; m < coeff_.size(); ++m) coeff_[m] *= factor(m) * norm;
    dst_.inverse(coeff_, out);
}

void KineticOperator::apply(std::span<const double> in, std::span<double> out) {
    diagonal(in, out, [this](std::size_t m) { return eigenvalues_[m]; });
}

void KineticOperator::apply(std::span<const std::complex<double>> in,
                            std::span<std::complex<double>> out) {
    const std::size_t n = size();
    if (in.size() != n || out.size() != n) throw DimensionError("kinetic operator size mismatch");
    for (std::size_t j = 0; j < n; ++j) {
        re_[j] = in[j].real();
        im_[j] = in[j].imag();
    }
    apply(re_, re_);
    apply(im_, im_);
    for (std::size_t j = 0; j < n; ++j) out[j] = {re_[j], im_[j]};
}

void KineticOperator::propagate_imaginary(std::span<double> psi, double tau) {
    if (tau != tau_cached_ || decay_.empty()) {
        decay_.resize(size());
        for (std::size_t m = 0; m < size(); ++m) decay_[m] = std::exp(-eigenvalues_[m] * tau);
        tau_cached_ = tau;
    }
    diagonal(psi, psi, [this](std::size_t m) { return decay_[m]; });
}

void KineticOperator::propagate(std::span<std::complex<double>> psi, double dt) {
    const std::size_t n = size();
    if (psi.size() != n) throw DimensionError("kinetic operator size mismatch");
    if (dt != dt_cached_ || phase_.empty()) {
        phase_.resize(n);
        for (std::size_t m = 0; m < n; ++m) phase_[m] = std::polar(1.0, -eigenvalues_[m] * dt);
        dt_cached_ = dt;
    }
    const double norm = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        re_[j] = psi[j].real();
        im_[j] = psi[j].imag();
    }
    std::vector<double>& cr = coeff_;
    dst_.forward(re_, cr);
    std::vector<double>& ci = coeff_im_;
    dst_.forward(im_, ci);
    for (std::size_t m = 0; m < n; ++m) {
        const std::complex<double> c = std::complex<double>(cr[m], ci[m]) * phase_[m] * norm;
        cr[m] = c.real();
        ci[m] = c.imag();
    }
    dst_.inverse(cr, re_);
    dst_.inverse(ci, im_);
    for (std::size_t j = 0; j < n; ++j) psi[j] = {re_[j], im_[j]};
}

void KineticOperator::precondition(std::span<double> r, double shift) {
    diagonal(r, r, [this, shift](std::size_t m) { return 1.0 / (eigenvalues_[m] + shift); });
}

}  // namespace bjj
