#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bjj {

/// Uniform cell-centred grid on [x_min, x_max].
///
/// Node j sits at the centre of cell j, x_j = c + (j + 1/2 - n/2) dx with
/// c the domain centre. The walls x_min and x_max are half a cell outside
/// the first and last node; Dirichlet data vanish there. Reflection about
/// c maps node j to node n-1-j exactly (the offsets are exact half-integers).
class Grid {
public:
    /// Throws GridError unless x_min < x_max and n is a power of two >= 64.
    Grid(double x_min, double x_max, std::size_t n_points);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    double length() const { return x_max_ - x_min_; }
    double dx() const { return dx_; }
    double center() const { return 0.5 * (x_min_ + x_max_); }
    std::size_t size() const { return x_.size(); }
    std::span<const double> x() const { return x_; }
    double operator[](std::size_t j) const { return x_[j]; }
    std::size_t mirror(std::size_t j) const { return x_.size() - 1 - j; }

    /// Integral of samples by the cell-centred rectangle rule (sum * dx).
    double integrate(std::span<const double> f) const;

    bool operator==(const Grid& other) const {
        return x_min_ == other.x_min_ && x_max_ == other.x_max_ && x_.size() == other.x_.size();
    }

private:
    double x_min_;
    double x_max_;
    double dx_;
    std::vector<double> x_;
};

/// Same as the Grid constructor; named for symmetry with build_potential.
Grid build_grid(double x_min, double x_max, std::size_t n_points);

}  // namespace bjj
