#include "bjj/grid.hpp"

#include <bit>
#include <cmath>

#include "bjj/error.hpp"

namespace bjj {

Grid::Grid(double x_min, double x_max, std::size_t n_points) : x_min_(x_min), x_max_(x_max) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max))
        throw GridError("grid requires finite x_min < x_max");
    if (n_points < 64 || !std::has_single_bit(n_points))
        throw GridError("grid size " + std::to_string(n_points) + " is not a power of two >= 64");
    dx_ = (x_max - x_min) / static_cast<double>(n_points);
    const double c = center();
    const double half = 0.5 * static_cast<double>(n_points);
    x_.resize(n_points);
    for (std::size_t j = 0; j < n_points; ++j)
        x_[j] = c + (static_cast<double>(j) + 0.5 - half) * dx_;
}

double Grid::integrate(std::span<const double> f) const {
    if (f.size() != x_.size()) throw DimensionError("integrand does not match grid size");
    double s = 0.0;
    for (double v : f) s += v;
    return s * dx_;
}

Grid build_grid(double x_min, double x_max, std::size_t n_points) {
    return Grid(x_min, x_max, n_points);
}

}  // namespace bjj
