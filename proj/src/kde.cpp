#include "csonbr/kde.hpp"

#include "csonbr/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace csonbr {

namespace {

const double kLogFloor = std::log(kDensityFloor);
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// Below this, a shifted-free kernel sum is recomputed in log space.
constexpr double kLinearSumFloor = 1e-280;

// Squared differences for all pairs i < j, flattened row by row.
std::vector<double> pair_sq_diffs(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<double> out;
    out.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out.push_back((v[i] - v[j]) * (v[i] - v[j]));
    return out;
}

std::vector<double> pair_kernels(std::span<const double> sq, double h) {
    const double c = -0.5 / (h * h);
    std::vector<double> out(sq.size());
    for (std::size_t k = 0; k < sq.size(); ++k) out[k] = std::exp(c * sq[k]);
    return out;
}

std::size_t pair_index(std::size_t n, std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

// Exact log of the leave-one-out kernel sum for point i.
double exact_loo_log_sum(std::size_t n, std::size_t i, std::span<const double> sqx, double hx,
                         std::span<const double> sqy, double hy) {
    std::vector<double> terms;
    terms.reserve(n - 1);
    const double cx = -0.5 / (hx * hx);
    const double cy = sqy.empty() ? 0.0 : -0.5 / (hy * hy);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const std::size_t k = pair_index(n, i, j);
        terms.push_back(cx * sqx[k] + (sqy.empty() ? 0.0 : cy * sqy[k]));
    }
    return log_sum_exp(terms);
}

// -sum_i max(log f_{-i}, log floor) from precomputed pair kernels. ky/sqy are
// empty in the univariate case; log_norm is log((n - 1) * normalizer).
double loo_score(std::size_t n, std::span<const double> kx, std::span<const double> ky, std::span<const double> sqx,
                 std::span<const double> sqy, double hx, double hy, double log_norm) {
    std::vector<double> sums(n, 0.0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++k) {
            const double v = ky.empty() ? kx[k] : kx[k] * ky[k];
            sums[i] += v;
            sums[j] += v;
        }
    }
    double score = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double log_sum =
            sums[i] > kLinearSumFloor ? std::log(sums[i]) : exact_loo_log_sum(n, i, sqx, hx, sqy, hy);
        score -= std::max(log_sum - log_norm, kLogFloor);
    }
    return score;
}

double log_norm1(std::size_t count, double h) { return std::log(static_cast<double>(count) * h) + kLogSqrt2Pi; }

double log_norm2(std::size_t count, double hx, double hy) {
    return std::log(static_cast<double>(count) * hx * hy) + 2.0 * kLogSqrt2Pi;
}

void require_positive(double h, const char* what) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

void require_loo_points(std::size_t n) {
    if (n < 2) throw std::invalid_argument("leave-one-out cross-entropy needs at least two points");
}

}  // namespace

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double v : values) s += std::exp(v - m);
    return m + std::log(s);
}

Kde1::Kde1(std::vector<double> points, double bandwidth) : points_(std::move(points)), h_(bandwidth) {
    if (points_.empty()) throw std::invalid_argument("Kde1 needs at least one point");
    require_positive(h_, "bandwidth");
}

double Kde1::density(double y) const {
    const double c = -0.5 / (h_ * h_);
    double s = 0.0;
    for (double p : points_) s += std::exp(c * (y - p) * (y - p));
    return s / (static_cast<double>(points_.size()) * h_ * std::sqrt(2.0 * std::numbers::pi));
}

double Kde1::log_density(double y) const {
    const double c = -0.5 / (h_ * h_);
    std::vector<double> terms(points_.size());
    for (std::size_t j = 0; j < points_.size(); ++j) terms[j] = c * (y - points_[j]) * (y - points_[j]);
    return log_sum_exp(terms) - log_norm1(points_.size(), h_);
}

Kde2::Kde2(std::vector<double> xs, std::vector<double> ys, double hx, double hy)
    : xs_(std::move(xs)), ys_(std::move(ys)), hx_(hx), hy_(hy) {
    if (xs_.empty() || xs_.size() != ys_.size()) throw std::invalid_argument("Kde2 needs equally many x and y points");
    require_positive(hx_, "x bandwidth");
    require_positive(hy_, "y bandwidth");
}

double Kde2::density(double x, double y) const {
    const double cx = -0.5 / (hx_ * hx_);
    const double cy = -0.5 / (hy_ * hy_);
    double s = 0.0;
    for (std::size_t j = 0; j < xs_.size(); ++j)
        s += std::exp(cx * (x - xs_[j]) * (x - xs_[j])) * std::exp(cy * (y - ys_[j]) * (y - ys_[j]));
    return s / (static_cast<double>(xs_.size()) * hx_ * hy_ * 2.0 * std::numbers::pi);
}

double Kde2::log_density(double x, double y) const {
    const double cx = -0.5 / (hx_ * hx_);
    const double cy = -0.5 / (hy_ * hy_);
    std::vector<double> terms(xs_.size());
    for (std::size_t j = 0; j < xs_.size(); ++j)
        terms[j] = cx * (x - xs_[j]) * (x - xs_[j]) + cy * (y - ys_[j]) * (y - ys_[j]);
    return log_sum_exp(terms) - log_norm2(xs_.size(), hx_, hy_);
}

BandwidthGrid::BandwidthGrid(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("bandwidth grid is empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        require_positive(values_[i], "grid bandwidth");
        if (i > 0 && !(values_[i] > values_[i - 1]))
            throw std::invalid_argument("bandwidth grid must be strictly increasing");
    }
}

double silverman_bandwidth(std::span<const double> points) {
    const double sigma = std::max(sample_stddev(points), 1e-6);
    return 1.06 * sigma * std::pow(static_cast<double>(points.size()), -0.2);
}

BandwidthGrid BandwidthGrid::around_silverman(std::span<const double> points, std::size_t count, double lo_factor,
                                              double hi_factor) {
    if (points.empty()) throw std::invalid_argument("cannot build a bandwidth grid without points");
    if (count == 0) throw std::invalid_argument("bandwidth grid needs at least one value");
    const double hs = silverman_bandwidth(points);
    std::vector<double> values(count);
    if (count == 1) {
        values[0] = hs;
    } else {
        const double lo = lo_factor * hs;
        const double ratio = hi_factor / lo_factor;
        for (std::size_t k = 0; k < count; ++k)
            values[k] = lo * std::pow(ratio, static_cast<double>(k) / static_cast<double>(count - 1));
    }
    return BandwidthGrid(std::move(values));
}

double loo_cross_entropy1(std::span<const double> points, double h) {
    require_loo_points(points.size());
    require_positive(h, "bandwidth");
    const auto sq = pair_sq_diffs(points);
    const auto k = pair_kernels(sq, h);
    return loo_score(points.size(), k, {}, sq, {}, h, 1.0, log_norm1(points.size() - 1, h));
}

double loo_cross_entropy2(std::span<const double> xs, std::span<const double> ys, double hx, double hy) {
    if (xs.size() != ys.size()) throw std::invalid_argument("x and y point counts differ");
    require_loo_points(xs.size());
    require_positive(hx, "x bandwidth");
    require_positive(hy, "y bandwidth");
    const auto sqx = pair_sq_diffs(xs);
    const auto sqy = pair_sq_diffs(ys);
    const auto kx = pair_kernels(sqx, hx);
    const auto ky = pair_kernels(sqy, hy);
    return loo_score(xs.size(), kx, ky, sqx, sqy, hx, hy, log_norm2(xs.size() - 1, hx, hy));
}

BandwidthChoice1 select_bandwidth1(std::span<const double> points, const BandwidthGrid& grid) {
    require_loo_points(points.size());
    const std::size_t n = points.size();
    const auto sq = pair_sq_diffs(points);
    BandwidthChoice1 best{0.0, std::numeric_limits<double>::infinity()};
    for (double h : grid.values()) {
        const auto k = pair_kernels(sq, h);
        const double score = loo_score(n, k, {}, sq, {}, h, 1.0, log_norm1(n - 1, h));
        if (score < best.score || best.h == 0.0) best = {h, score};
    }
    return best;
}

BandwidthChoice2 select_bandwidth2(std::span<const double> xs, std::span<const double> ys, const BandwidthGrid& grid_x,
                                   const BandwidthGrid& grid_y) {
    if (xs.size() != ys.size()) throw std::invalid_argument("x and y point counts differ");
    require_loo_points(xs.size());
    const std::size_t n = xs.size();
    const auto sqx = pair_sq_diffs(xs);
    const auto sqy = pair_sq_diffs(ys);

    // Cache the y kernels across the outer loop unless that would be large.
    constexpr std::size_t kCacheLimit = 1u << 22;
    const bool cache_y = sqy.size() * grid_y.size() <= kCacheLimit;
    std::vector<std::vector<double>> ky_cache;
    if (cache_y)
        for (double hy : grid_y.values()) ky_cache.push_back(pair_kernels(sqy, hy));

    BandwidthChoice2 best{0.0, 0.0, std::numeric_limits<double>::infinity()};
    for (double hx : grid_x.values()) {
        const auto kx = pair_kernels(sqx, hx);
        for (std::size_t g = 0; g < grid_y.size(); ++g) {
            const double hy = grid_y.values()[g];
            std::vector<double> ky_fresh;
            if (!cache_y) ky_fresh = pair_kernels(sqy, hy);
            const std::span<const double> ky = cache_y ? ky_cache[g] : ky_fresh;
            const double score = loo_score(n, kx, ky, sqx, sqy, hx, hy, log_norm2(n - 1, hx, hy));
            if (score < best.score || best.hx == 0.0) best = {hx, hy, score};
        }
    }
    return best;
}

}  // namespace csonbr
