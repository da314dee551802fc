#include "csonbr/peak.hpp"

#include "csonbr/rng.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace csonbr {

void PeakConfig::validate() const {
    if (!(amplitude > 0.0)) throw std::invalid_argument("peak amplitude must be positive");
    if (!(radius > 0.0)) throw std::invalid_argument("peak radius must be positive");
    if (grid_resolution < 2) throw std::invalid_argument("grid resolution must be at least 2");
    if (!(grid_lo < grid_hi)) throw std::invalid_argument("grid extent is empty");
}

double peak_height(const PeakConfig& cfg, double x, double y) {
    return cfg.amplitude * std::exp(-0.5 * (x * x + y * y));
}

Dataset generate_peak(const PeakConfig& cfg) {
    cfg.validate();
    Schema schema{{"x", AttributeKind::Numeric, {}, false},
                  {"y", AttributeKind::Numeric, {}, false},
                  {"z", AttributeKind::Numeric, {}, true}};
    Rng rng(cfg.seed);
    std::vector<double> cells;
    cells.reserve(cfg.samples * 3);
    for (std::size_t i = 0; i < cfg.samples; ++i) {
        const double angle = 2.0 * std::numbers::pi * rng.uniform();
        const double r = cfg.radius * std::sqrt(rng.uniform());
        const double x = r * std::cos(angle);
        const double y = r * std::sin(angle);
        cells.push_back(x);
        cells.push_back(y);
        cells.push_back(peak_height(cfg, x, y));
    }
    return Dataset(std::move(schema), std::move(cells));
}

std::vector<GridCell> contour_grid(const RowPredictor& predictor, const PeakConfig& cfg) {
    cfg.validate();
    const std::size_t res = cfg.grid_resolution;
    const double step = (cfg.grid_hi - cfg.grid_lo) / static_cast<double>(res - 1);
    auto coord = [&](std::size_t i) { return i + 1 == res ? cfg.grid_hi : cfg.grid_lo + step * static_cast<double>(i); };
    std::vector<GridCell> grid;
    grid.reserve(res * res);
    double row[3] = {0.0, 0.0, 0.0};
    for (std::size_t iy = 0; iy < res; ++iy) {
        for (std::size_t ix = 0; ix < res; ++ix) {
            row[0] = coord(ix);
            row[1] = coord(iy);
            grid.push_back({row[0], row[1], predictor(row)});
        }
    }
    return grid;
}

std::string contour_csv(std::span<const GridCell> grid) {
    std::string out = "x,y,z\n";
    char buf[96];
    for (const auto& c : grid) {
        const double values[3] = {c.x, c.y, c.z};
        for (int i = 0; i < 3; ++i) {
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, values[i]);
            out.append(buf, ptr);
            out.push_back(i == 2 ? '\n' : ',');
        }
    }
    return out;
}

void write_contour_csv(std::span<const GridCell> grid, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << contour_csv(grid);
}

}  // namespace csonbr
