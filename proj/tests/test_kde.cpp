#include "csonbr/kde.hpp"
#include "csonbr/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

using namespace csonbr;

namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// Direct double-sum oracles, kept independent of the library code.
double oracle_density1(const std::vector<double>& p, double h, double y) {
    double s = 0.0;
    for (double v : p) s += normal_pdf((y - v) / h) / h;
    return s / static_cast<double>(p.size());
}

double oracle_density2(const std::vector<double>& xs, const std::vector<double>& ys, double hx, double hy, double x,
                       double y) {
    double s = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) s += normal_pdf((x - xs[j]) / hx) / hx * normal_pdf((y - ys[j]) / hy) / hy;
    return s / static_cast<double>(xs.size());
}

double oracle_loo1(const std::vector<double>& p, double h) {
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j)
            if (j != i) s += normal_pdf((p[i] - p[j]) / h) / h;
        total -= std::log(std::max(s / static_cast<double>(p.size() - 1), kDensityFloor));
    }
    return total;
}

double oracle_loo2(const std::vector<double>& xs, const std::vector<double>& ys, double hx, double hy) {
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < xs.size(); ++j)
            if (j != i) s += normal_pdf((xs[i] - xs[j]) / hx) / hx * normal_pdf((ys[i] - ys[j]) / hy) / hy;
        total -= std::log(std::max(s / static_cast<double>(xs.size() - 1), kDensityFloor));
    }
    return total;
}

std::vector<double> random_points(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

}  // namespace

TEST_CASE("density1 hand values") {
    CHECK(Kde1({0.0}, 1.0).density(0.0) == doctest::Approx(0.3989423).epsilon(1e-7));
    CHECK(Kde1({0.0}, 1.0).density(1.0) == doctest::Approx(0.2419707).epsilon(1e-7));
    CHECK(Kde1({0.0, 2.0}, 1.0).density(1.0) == doctest::Approx(0.2419707).epsilon(1e-7));
    CHECK(Kde1({0.0}, 1.0).log_density(1.0) == doctest::Approx(std::log(0.24197072451914337)));
}

TEST_CASE("density2 hand values, symmetry and brute force") {
    const Kde2 k({0.0}, {0.0}, 1.0, 1.0);
    CHECK(k.density(0.0, 0.0) == doctest::Approx(0.1591549).epsilon(1e-7));
    CHECK(k.density(0.7, -1.3) == k.density(-0.7, 1.3));

    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        const auto xs = random_points(rng, 2, -2, 2);
        const auto ys = random_points(rng, 2, -2, 2);
        const double hx = rng.uniform(0.1, 2), hy = rng.uniform(0.1, 2);
        const double x = rng.uniform(-3, 3), y = rng.uniform(-3, 3);
        const Kde2 kk(xs, ys, hx, hy);
        const double want = oracle_density2(xs, ys, hx, hy, x, y);
        CHECK(kk.density(x, y) == doctest::Approx(want).epsilon(1e-12));
        CHECK(kk.log_density(x, y) == doctest::Approx(std::log(want)).epsilon(1e-12));
    }
}

TEST_CASE("log density agrees with log(density) above the floor and stays finite below it") {
    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        const auto p = random_points(rng, 1 + rng.below(10), -5, 5);
        const double h = rng.uniform(0.05, 3);
        const Kde1 k(p, h);
        const double y = rng.uniform(-10, 10);
        const double d = k.density(y);
        CHECK(d >= 0.0);
        CHECK(d == doctest::Approx(oracle_density1(p, h, y)).epsilon(1e-12));
        if (d > kDensityFloor) CHECK(k.log_density(y) == doctest::Approx(std::log(d)).epsilon(1e-10));
    }
    const Kde1 far({0.0}, 0.01);
    CHECK(std::isfinite(far.log_density(100.0)));
    CHECK(far.log_density(100.0) < std::log(kDensityFloor));
}

TEST_CASE("density1 integrates to one") {
    Rng rng(17);
    for (int t = 0; t < 20; ++t) {
        const auto p = random_points(rng, 1 + rng.below(50), -5, 5);
        const double h = rng.uniform(0.05, 2);
        const Kde1 k(p, h);
        const double lo = *std::min_element(p.begin(), p.end()) - 8 * h;
        const double hi = *std::max_element(p.begin(), p.end()) + 8 * h;
        const int m = 10000;
        const double step = (hi - lo) / m;
        double s = 0.5 * (k.density(lo) + k.density(hi));
        for (int i = 1; i < m; ++i) s += k.density(lo + i * step);
        CHECK(std::abs(s * step - 1.0) < 1e-3);
    }
}

TEST_CASE("loo cross entropy hand values") {
    CHECK(loo_cross_entropy1(std::vector<double>{0.0, 1.0}, 1.0) == doctest::Approx(2.8379).epsilon(1e-4));
    CHECK(loo_cross_entropy1(std::vector<double>{0.0, 0.0}, 1.0) == doctest::Approx(1.8379).epsilon(1e-4));
    CHECK(std::isfinite(loo_cross_entropy1(std::vector<double>{0.0, 1000.0}, 0.01)));
    CHECK_THROWS_AS(loo_cross_entropy1(std::vector<double>{1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("loo cross entropy matches brute force") {
    Rng rng(23);
    for (int t = 0; t < 50; ++t) {
        const auto xs = random_points(rng, 2 + rng.below(12), -3, 3);
        const auto ys = random_points(rng, xs.size(), -3, 3);
        const double hx = rng.uniform(0.02, 2), hy = rng.uniform(0.02, 2);
        CHECK(loo_cross_entropy1(xs, hx) == doctest::Approx(oracle_loo1(xs, hx)).epsilon(1e-10));
        CHECK(loo_cross_entropy2(xs, ys, hx, hy) == doctest::Approx(oracle_loo2(xs, ys, hx, hy)).epsilon(1e-10));
    }
}

TEST_CASE("bandwidth grid validation and default layout") {
    CHECK_THROWS_AS(BandwidthGrid({}), std::invalid_argument);
    CHECK_THROWS_AS(BandwidthGrid({1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(BandwidthGrid({0.0, 1.0}), std::invalid_argument);
    const std::vector<double> p{0.0, 1.0, 2.0, 3.0, 4.0};
    const auto g = BandwidthGrid::around_silverman(p);
    REQUIRE(g.size() == 20);
    const double hs = silverman_bandwidth(p);
    CHECK(hs == doctest::Approx(1.06 * std::sqrt(2.5) * std::pow(5.0, -0.2)));
    CHECK(g.values().front() == doctest::Approx(0.1 * hs));
    CHECK(g.values().back() == doctest::Approx(10.0 * hs));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.values()[i] / g.values()[i - 1] == doctest::Approx(std::pow(100.0, 1.0 / 19)));
    CHECK(silverman_bandwidth(std::vector<double>{2.0, 2.0, 2.0}) > 0.0);
}

TEST_CASE("select_bandwidth1 matches exhaustive scan") {
    Rng rng(29);
    for (int t = 0; t < 50; ++t) {
        const auto p = random_points(rng, 10, -2, 2);
        const auto grid = BandwidthGrid::around_silverman(p);
        double best_h = 0.0, best = std::numeric_limits<double>::infinity();
        for (double h : grid.values()) {
            const double s = oracle_loo1(p, h);
            if (s < best) best = s, best_h = h;
        }
        const auto choice = select_bandwidth1(p, grid);
        CHECK(choice.h == best_h);
        CHECK(choice.score == loo_cross_entropy1(p, choice.h));
        CHECK(std::find(grid.values().begin(), grid.values().end(), choice.h) != grid.values().end());
    }
    CHECK(select_bandwidth1(std::vector<double>{0.0, 1.0}, BandwidthGrid({0.5})).h == 0.5);
}

TEST_CASE("select_bandwidth1 ties go to the smaller bandwidth") {
    // Points so far apart that every grid member hits the density floor.
    const std::vector<double> p{0.0, 1e6};
    const auto choice = select_bandwidth1(p, BandwidthGrid({0.001, 0.01, 0.1}));
    CHECK(choice.h == 0.001);
}

TEST_CASE("select_bandwidth1 near Silverman on normal data") {
    Rng rng(31);
    std::vector<double> p(200);
    for (auto& v : p) {
        const double u1 = rng.uniform(), u2 = rng.uniform();
        v = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    const double h = select_bandwidth1(p, BandwidthGrid::around_silverman(p)).h;
    const double hs = silverman_bandwidth(p);
    CHECK(h > hs / 3.0);
    CHECK(h < hs * 3.0);
}

TEST_CASE("select_bandwidth2 matches exhaustive double loop") {
    Rng rng(37);
    for (int t = 0; t < 30; ++t) {
        const auto xs = random_points(rng, 8, -2, 2);
        const auto ys = random_points(rng, 8, -2, 2);
        const auto gx = BandwidthGrid::around_silverman(xs, 7);
        const auto gy = BandwidthGrid::around_silverman(ys, 6);
        double bx = 0, by = 0, best = std::numeric_limits<double>::infinity();
        for (double hx : gx.values())
            for (double hy : gy.values()) {
                const double s = oracle_loo2(xs, ys, hx, hy);
                if (s < best) best = s, bx = hx, by = hy;
            }
        const auto c = select_bandwidth2(xs, ys, gx, gy);
        CHECK(c.hx == bx);
        CHECK(c.hy == by);
        CHECK(c.score == loo_cross_entropy2(xs, ys, c.hx, c.hy));
    }
    const auto one = select_bandwidth2(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 1.0}, BandwidthGrid({0.3}),
                                       BandwidthGrid({0.7}));
    CHECK(one.hx == 0.3);
    CHECK(one.hy == 0.7);
}

TEST_CASE("select_bandwidth2 with a singleton x grid reduces to select_bandwidth1 on y when x is constant") {
    Rng rng(41);
    for (int t = 0; t < 20; ++t) {
        const std::vector<double> xs(10, 1.5);
        const auto ys = random_points(rng, 10, -2, 2);
        const auto gy = BandwidthGrid::around_silverman(ys);
        const auto c2 = select_bandwidth2(xs, ys, BandwidthGrid({0.4}), gy);
        CHECK(c2.hy == select_bandwidth1(ys, gy).h);
    }
}
