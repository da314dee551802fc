#pragma once

#include "csonbr/tabular.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace csonbr {

/// Synthetic 2D "peak" regression problem: (x, y) uniform on a disk,
/// target z = amplitude * exp(-(x^2 + y^2) / 2), no observation noise.
struct PeakConfig {
    double amplitude = 25.0;
    double radius = 3.0;
    std::size_t samples = 100;
    std::uint64_t seed = 0;
    double grid_lo = -3.0;
    double grid_hi = 3.0;
    std::size_t grid_resolution = 121;  // points per axis, endpoints included

    void validate() const;
};

/// Ground-truth surface value at (x, y).
double peak_height(const PeakConfig& cfg, double x, double y);

/// Schema (x, y numeric features; z numeric target) and `cfg.samples` rows.
/// Points use polar sampling with radius R * sqrt(u), which is area-uniform.
Dataset generate_peak(const PeakConfig& cfg);

struct GridCell {
    double x;
    double y;
    double z;
};

/// Predicts a full dataset row (x, y, z) where z is ignored.
using RowPredictor = std::function<double(std::span<const double>)>;

/// Predictions on a resolution x resolution grid over [lo, hi]^2, row-major
/// with y as the outer index.
std::vector<GridCell> contour_grid(const RowPredictor& predictor, const PeakConfig& cfg);

/// CSV with header "x,y,z".
std::string contour_csv(std::span<const GridCell> grid);
void write_contour_csv(std::span<const GridCell> grid, const std::filesystem::path& path);

}  // namespace csonbr
