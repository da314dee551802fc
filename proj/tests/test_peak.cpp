#include "csonbr/peak.hpp"

#include <doctest.h>

#include <cmath>

using namespace csonbr;

TEST_CASE("peak height") {
    const PeakConfig cfg;
    CHECK(peak_height(cfg, 0.0, 0.0) == 25.0);
    const double r = std::sqrt(2.0 * std::log(2.0));
    CHECK(peak_height(cfg, r, 0.0) == doctest::Approx(12.5).epsilon(1e-14));
    CHECK(peak_height(cfg, r / std::sqrt(2.0), r / std::sqrt(2.0)) == doctest::Approx(12.5).epsilon(1e-14));
}

TEST_CASE("generated points lie on the disk with exact heights") {
    PeakConfig cfg;
    cfg.samples = 1000;
    cfg.seed = 3;
    const Dataset ds = generate_peak(cfg);
    REQUIRE(ds.rows() == 1000);
    REQUIRE(ds.cols() == 3);
    CHECK(ds.target() == 2);
    CHECK(ds.schema()[0].kind == AttributeKind::Numeric);
    CHECK(ds.schema()[1].kind == AttributeKind::Numeric);
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        const double x = ds.at(r, 0), y = ds.at(r, 1);
        CHECK(x * x + y * y <= 9.0 + 1e-12);
        CHECK(ds.at(r, 2) == 25.0 * std::exp(-0.5 * (x * x + y * y)));
    }
    CHECK(generate_peak(cfg) == ds);
}

TEST_CASE("samples are area-uniform") {
    PeakConfig cfg;
    cfg.samples = 100000;
    cfg.seed = 11;
    const Dataset ds = generate_peak(cfg);
    double mx = 0.0, my = 0.0;
    std::size_t inner = 0;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        const double x = ds.at(r, 0), y = ds.at(r, 1);
        mx += x;
        my += y;
        if (x * x + y * y <= 2.25) ++inner;  // radius 1.5 holds a quarter of the area
    }
    CHECK(std::abs(mx / 1e5) < 0.02);
    CHECK(std::abs(my / 1e5) < 0.02);
    CHECK(static_cast<double>(inner) / 1e5 == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("config validation") {
    PeakConfig cfg;
    cfg.amplitude = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.radius = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.grid_resolution = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("contour grid layout") {
    PeakConfig cfg;
    cfg.grid_resolution = 2;
    const auto corners = contour_grid([](std::span<const double>) { return 7.0; }, cfg);
    REQUIRE(corners.size() == 4);
    CHECK(corners[0].x == -3.0);
    CHECK(corners[0].y == -3.0);
    CHECK(corners[1].x == 3.0);
    CHECK(corners[1].y == -3.0);
    CHECK(corners[3].x == 3.0);
    CHECK(corners[3].y == 3.0);
    for (const auto& c : corners) CHECK(c.z == 7.0);

    const PeakConfig full;
    const auto truth = contour_grid([&](std::span<const double> row) { return peak_height(full, row[0], row[1]); }, full);
    REQUIRE(truth.size() == 121 * 121);
    const auto& centre = truth[60 * 121 + 60];
    CHECK(std::abs(centre.x) < 1e-12);
    CHECK(std::abs(centre.y) < 1e-12);
    CHECK(centre.z == doctest::Approx(25.0).epsilon(1e-12));
    for (std::size_t i = 1; i < 121; ++i) CHECK(truth[i].x - truth[i - 1].x == doctest::Approx(6.0 / 120.0).epsilon(1e-12));
    CHECK(truth[121].y - truth[0].y == doctest::Approx(6.0 / 120.0).epsilon(1e-12));
    CHECK(truth.back().x == 3.0);
    CHECK(truth.back().y == 3.0);
}

TEST_CASE("contour csv") {
    const std::vector<GridCell> grid{{-3.0, -3.0, 0.5}, {3.0, -3.0, 1.0}};
    CHECK(contour_csv(grid) == "x,y,z\n-3,-3,0.5\n3,-3,1\n");
}
