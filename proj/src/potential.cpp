#include "bjj/potential.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <cstdint>
#include <limits>

#include "bjj/error.hpp"

namespace bjj {

Potential::Potential(Grid grid, std::vector<double> values, double tilt,
                     std::function<double(double)> profile)
    : grid_(std::move(grid)), values_(std::move(values)), tilt_(tilt), profile_(std::move(profile)) {
    if (values_.size() != grid_.size()) throw DimensionError("potential samples do not match grid");
    locate_landmarks();
}

double Potential::max_value() const { return *std::max_element(values_.begin(), values_.end()); }
double Potential::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

double Potential::at(double x) const {
    if (profile_) return profile_(x);
    const auto xs = grid_.x();
    if (x <= xs.front()) return values_.front();
    if (x >= xs.back()) return values_.back();
    const auto j = static_cast<std::size_t>((x - xs.front()) / grid_.dx());
    const std::size_t k = std::min(j, xs.size() - 2);
    const double t = (x - xs[k]) / grid_.dx();
    return (1.0 - t) * values_[k] + t * values_[k + 1];
}

void Potential::locate_landmarks() {
    const auto xs = grid_.x();
    const std::size_t n = xs.size();
    const double c = grid_.center();
    const double quarter = 0.25 * grid_.length();

    // Barrier: the largest interior local maximum in the central half.
    std::size_t jb = n;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        if (std::abs(xs[j] - c) > quarter) continue;
        if (values_[j] >= values_[j - 1] && values_[j] >= values_[j + 1] &&
            (jb == n || values_[j] > values_[jb]))
            jb = j;
    }

    auto argmin = [&](std::size_t lo, std::size_t hi) {
        std::size_t best = lo;
        for (std::size_t j = lo; j < hi; ++j)
            if (values_[j] < values_[best]) best = j;
        return best;
    };

    constexpr int bits = std::numeric_limits<double>::digits / 2;
    auto refine_min = [&](std::size_t j) {
        if (!profile_ || j == 0 || j + 1 >= n) return std::pair{xs[j], values_[j]};
        auto r = boost::math::tools::brent_find_minima(profile_, xs[j - 1], xs[j + 1], bits);
        return std::pair{r.first, r.second};
    };
    auto refine_max = [&](std::size_t j) {
        if (!profile_ || j == 0 || j + 1 >= n) return std::pair{xs[j], values_[j]};
        auto neg = [this](double x) { return -profile_(x); };
        auto r = boost::math::tools::brent_find_minima(neg, xs[j - 1], xs[j + 1], bits);
        return std::pair{r.first, -r.second};
    };

    if (jb == n) {
        // Single well: no barrier.
        const auto jm = argmin(0, n);
        const auto [xm, vm] = refine_min(jm);
        barrier_position_ = c;
        barrier_height_ = 0.0;
        left_min_ = right_min_ = xm;
        left_min_value_ = right_min_value_ = vm;
    } else {
        const auto [xb, vb] = refine_max(jb);
        const auto [xl, vl] = refine_min(argmin(0, jb));
        const auto [xr, vr] = refine_min(argmin(jb + 1, n));
        barrier_position_ = xb;
        left_min_ = xl;
        right_min_ = xr;
        left_min_value_ = vl;
        right_min_value_ = vr;
        barrier_height_ = std::max(0.0, vb - 0.5 * (vl + vr));
    }

    const double h = profile_ ? 1e-3 : grid_.dx();
    well_curvature_ = (at(left_min_ + h) - 2.0 * at(left_min_) + at(left_min_ - h)) / (h * h);
}

namespace {

void check_single_period(const TrapConfig& cfg, const Grid& grid) {
    const double half = 0.5 * cfg.primary_period;  // lambda_P / 4
    const double tol = 1e-12 * half;
    if (std::abs(grid.x_min() + half) > tol || std::abs(grid.x_max() - half) > tol)
        throw DomainError("grid must span exactly one primary period [-lambda_P/4, +lambda_P/4]");
}

}  // namespace

Potential with_tilt(const TrapConfig& cfg, const Grid& grid, double tilt) {
    cfg.validate();
    check_single_period(cfg, grid);
    // primary_period is lambda_P/2, so 2 pi x / lambda_P = pi x / primary_period.
    const double kp = constants::pi / cfg.primary_period;
    const double ks = constants::pi / cfg.secondary_period;
    const double vp = cfg.primary_depth;
    const double vs = cfg.secondary_depth;
    // Even part evaluated at |x| so untilted samples are mirror-exact.
    auto even = [=](double x) {
        const double a = std::abs(x);
        const double p = std::sin(kp * a);
        const double s = std::sin(ks * a + 0.5 * constants::pi);
        return vp * p * p + vs * s * s;
    };
    auto profile = [=](double x) { return even(x) + tilt * x; };
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) v[j] = profile(grid[j]);
    return Potential(grid, std::move(v), tilt, profile);
}

Potential build_potential(const TrapConfig& cfg, const Grid& grid) {
    return with_tilt(cfg, grid, cfg.tilt);
}

Potential harmonic_potential(const Grid& grid, double omega) {
    const double c = grid.center();
    auto profile = [=](double x) { return 0.5 * omega * omega * (x - c) * (x - c); };
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        // |x - c| keeps the samples mirror-exact.
        const double d = std::abs(grid[j] - c);
        v[j] = 0.5 * omega * omega * d * d;
    }
    return Potential(grid, std::move(v), 0.0, profile);
}

}  // namespace bjj
