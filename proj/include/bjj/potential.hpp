#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bjj/grid.hpp"
#include "bjj/units.hpp"

namespace bjj {

/// A potential sampled on a grid, with its barrier/well landmarks.
class Potential {
public:
    /// Wraps samples. When `profile` is given, landmarks are refined on the
    /// continuous function; otherwise they are taken from the nodes.
    Potential(Grid grid, std::vector<double> values, double tilt = 0.0,
              std::function<double(double)> profile = {});

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t j) const { return values_[j]; }
    double tilt() const { return tilt_; }
    /// True when the potential was built without a tilt term.
    bool is_symmetric() const { return tilt_ == 0.0; }

    double barrier_position() const { return barrier_position_; }
    /// V(x_b) minus the mean of the two well minima; zero for a single well.
    double barrier_height() const { return barrier_height_; }
    double left_minimum() const { return left_min_; }
    double right_minimum() const { return right_min_; }
    double left_minimum_value() const { return left_min_value_; }
    double right_minimum_value() const { return right_min_value_; }
    /// Curvature V'' at the left well minimum (finite difference on the profile).
    double well_curvature() const { return well_curvature_; }
    double max_value() const;
    double min_value() const;

    /// Evaluates the continuous profile; falls back to linear interpolation.
    double at(double x) const;

private:
    void locate_landmarks();

    Grid grid_;
    std::vector<double> values_;
    double tilt_;
    std::function<double(double)> profile_;
    double barrier_position_ = 0.0;
    double barrier_height_ = 0.0;
    double left_min_ = 0.0;
    double right_min_ = 0.0;
    double left_min_value_ = 0.0;
    double right_min_value_ = 0.0;
    double well_curvature_ = 0.0;
};

/// V_P sin^2(2 pi x / lambda_P) + V_S sin^2(2 pi x / lambda_S + pi/2) + eps x,
/// i.e. one primary period of the bichromatic lattice. The grid must span
/// exactly [-lambda_P/4, +lambda_P/4]; otherwise DomainError.
Potential build_potential(const TrapConfig& cfg, const Grid& grid);

/// The same potential with a different tilt (used by the loading protocol).
Potential with_tilt(const TrapConfig& cfg, const Grid& grid, double tilt);

/// 1/2 omega^2 (x - c)^2 on the grid; test potential with known spectrum.
Potential harmonic_potential(const Grid& grid, double omega);

}  // namespace bjj
