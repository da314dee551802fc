#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace csonbr {

/// Densities below this value are treated as this value inside logarithms.
inline constexpr double kDensityFloor = 1e-300;

/// log(sum(exp(v))) without overflow or premature underflow. -inf for empty input.
double log_sum_exp(std::span<const double> values);

/// Univariate Gaussian kernel density estimator.
class Kde1 {
public:
    Kde1(std::vector<double> points, double bandwidth);

    double density(double y) const;
    double log_density(double y) const;

    std::span<const double> points() const noexcept { return points_; }
    double bandwidth() const noexcept { return h_; }

private:
    std::vector<double> points_;
    double h_;
};

/// Bivariate product-kernel Gaussian density estimator over (x, y) pairs.
class Kde2 {
public:
    Kde2(std::vector<double> xs, std::vector<double> ys, double hx, double hy);

    double density(double x, double y) const;
    double log_density(double x, double y) const;

    std::span<const double> xs() const noexcept { return xs_; }
    std::span<const double> ys() const noexcept { return ys_; }
    double bandwidth_x() const noexcept { return hx_; }
    double bandwidth_y() const noexcept { return hy_; }

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
    double hx_;
    double hy_;
};

/// Strictly increasing list of positive candidate bandwidths.
class BandwidthGrid {
public:
    explicit BandwidthGrid(std::vector<double> values);

    /// `count` geometrically spaced values from lo_factor * h_S to
    /// hi_factor * h_S, where h_S = 1.06 * sigma * N^(-1/5) is Silverman's
    /// rule and sigma (sample stddev) is floored at 1e-6.
    static BandwidthGrid around_silverman(std::span<const double> points, std::size_t count = 20,
                                          double lo_factor = 0.1, double hi_factor = 10.0);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<double> values_;
};

double silverman_bandwidth(std::span<const double> points);

/// Leave-one-out cross-entropy -sum_i log f_{-i}(y_i) of a univariate KDE.
/// Each log density is floored at log(kDensityFloor). Needs >= 2 points.
double loo_cross_entropy1(std::span<const double> points, double h);

/// Same objective for the bivariate product-kernel KDE.
double loo_cross_entropy2(std::span<const double> xs, std::span<const double> ys, double hx, double hy);

struct BandwidthChoice1 {
    double h;
    double score;
};

struct BandwidthChoice2 {
    double hx;
    double hy;
    double score;
};

/// Grid member minimizing loo_cross_entropy1; ties go to the smaller value.
BandwidthChoice1 select_bandwidth1(std::span<const double> points, const BandwidthGrid& grid);

/// Exhaustive scan over grid_x x grid_y; ties go lexicographically to the
/// smaller (hx, hy).
BandwidthChoice2 select_bandwidth2(std::span<const double> xs, std::span<const double> ys, const BandwidthGrid& grid_x,
                                   const BandwidthGrid& grid_y);

}  // namespace csonbr
