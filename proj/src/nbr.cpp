#include "csonbr/nbr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace csonbr {

namespace {

const double kLogFloor = std::log(kDensityFloor);
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
constexpr double kLinearSumFloor = 1e-280;

// log sum_j exp(c * (q - p_j)^2) for c < 0, without allocating.
double gaussian_log_sum(std::span<const double> points, double q, double c) {
    double min_sq = std::numeric_limits<double>::infinity();
    for (double p : points) min_sq = std::min(min_sq, (q - p) * (q - p));
    double s = 0.0;
    for (double p : points) s += std::exp(c * ((q - p) * (q - p) - min_sq));
    return c * min_sq + std::log(s);
}

double kde_log_density(std::span<const double> points, double h, double q) {
    return gaussian_log_sum(points, q, -0.5 / (h * h)) - std::log(static_cast<double>(points.size()) * h) - kLogSqrt2Pi;
}

// Shifted kernels exp(c * ((q - p_j)^2 - min_sq)) into `out`; returns the shift c * min_sq.
double shifted_kernels(std::span<const double> points, double q, double c, std::span<double> out) {
    double min_sq = std::numeric_limits<double>::infinity();
    for (double p : points) min_sq = std::min(min_sq, (q - p) * (q - p));
    for (std::size_t j = 0; j < points.size(); ++j) {
        const double d = q - points[j];
        out[j] = std::exp(c * (d * d - min_sq));
    }
    return c * min_sq;
}

std::vector<double> grid_points(double lo, double hi, std::size_t g) {
    std::vector<double> out(g);
    for (std::size_t i = 0; i < g; ++i)
        out[i] = i + 1 == g ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(g - 1);
    return out;
}

std::size_t argmax_first(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

BandwidthGrid axis_grid(std::span<const double> values, double fallback) {
    if (values.size() < 2 || sample_stddev(values) == 0.0) return BandwidthGrid({fallback});
    return BandwidthGrid::around_silverman(values);
}

double univariate_bandwidth(std::span<const double> values, double fallback) {
    if (values.size() < 2 || sample_stddev(values) == 0.0) return fallback;
    return select_bandwidth1(values, BandwidthGrid::around_silverman(values)).h;
}

}  // namespace

void ModeSearchConfig::validate() const {
    if (grid_points < 3) throw std::invalid_argument("mode search needs at least 3 grid points per level");
    if (levels < 1) throw std::invalid_argument("mode search needs at least one level");
    if (!(range_expansion >= 0.0)) throw std::invalid_argument("range expansion must be non-negative");
}

double mode_search_resolution(double width, const ModeSearchConfig& cfg) {
    const double g = static_cast<double>(cfg.grid_points - 1);
    return width * std::pow(2.0 / g, static_cast<double>(cfg.levels - 1)) / g;
}

NbrModel train(const Dataset& ds, const NbrTrainOptions& options) {
    if (ds.rows() == 0) throw std::invalid_argument("cannot train on an empty dataset");
    for (double v : ds.cells())
        if (Dataset::is_missing(v)) throw std::invalid_argument("training data contains missing values; impute first");

    NbrModel m;
    m.schema_ = ds.schema();
    m.target_ = ds.target();
    const std::size_t n = ds.rows();
    const std::size_t d = ds.cols();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ra = ds.row(a);
        const auto rb = ds.row(b);
        return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    });

    m.ys_.resize(n);
    for (std::size_t r = 0; r < n; ++r) m.ys_[r] = ds.at(order[r], m.target_);
    const auto [lo, hi] = std::minmax_element(m.ys_.begin(), m.ys_.end());
    m.y_min_ = *lo;
    m.y_max_ = *hi;
    const double reference = std::abs(options.reference_target_range.value_or(m.y_max_ - m.y_min_));
    m.fallback_h_ = std::max(1e-3, 1e-3 * reference);
    m.target_h_ = univariate_bandwidth(m.ys_, m.fallback_h_);

    for (std::size_t c = 0; c < d; ++c) {
        if (c == m.target_) continue;
        const auto& attr = m.schema_[c];
        if (!attr.categorical()) {
            std::vector<double> xs(n);
            for (std::size_t r = 0; r < n; ++r) xs[r] = ds.at(order[r], c);
            double hx = m.fallback_h_;
            double hy = m.fallback_h_;
            if (n >= 2) {
                const auto choice = select_bandwidth2(xs, m.ys_, axis_grid(xs, m.fallback_h_), axis_grid(m.ys_, m.fallback_h_));
                hx = choice.hx;
                hy = choice.hy;
            }
            m.continuous_.push_back({c, std::move(xs), hx, hy});
            continue;
        }

        const std::size_t k = attr.category_count();
        if (k == 0) throw std::invalid_argument("attribute '" + attr.name + "' has no categories");
        NbrModel::CategoricalAttribute cat{c, std::vector<NbrModel::CategoryDensity>(k), std::vector<double>(k)};
        for (std::size_t r = 0; r < n; ++r) {
            const auto v = static_cast<std::size_t>(ds.at(order[r], c));
            cat.categories[v].ys.push_back(m.ys_[r]);
        }
        for (std::size_t v = 0; v < k; ++v) {
            auto& dens = cat.categories[v];
            const double count = static_cast<double>(dens.ys.size());
            cat.log_prior[v] = std::log((count + 1.0) / (static_cast<double>(n) + static_cast<double>(k)));
            dens.h = dens.ys.empty() ? m.target_h_ : univariate_bandwidth(dens.ys, m.fallback_h_);
        }
        m.categorical_.push_back(std::move(cat));
    }
    return m;
}

std::pair<double, double> NbrModel::search_range(const ModeSearchConfig& cfg) const {
    const double width = y_max_ - y_min_;
    if (width > 0.0) return {y_min_ - cfg.range_expansion * width, y_max_ + cfg.range_expansion * width};
    return {y_min_ - fallback_h_, y_max_ + fallback_h_};
}

double NbrModel::log_target_density(double y) const { return kde_log_density(ys_, target_h_, y); }

std::vector<double> NbrModel::category_probabilities(std::size_t attribute, double y) const {
    const auto& cat = categorical_.at(attribute);
    std::vector<double> l(cat.categories.size());
    for (std::size_t v = 0; v < l.size(); ++v) {
        const auto& dens = cat.categories[v];
        l[v] = kde_log_density(dens.ys.empty() ? std::span<const double>(ys_) : dens.ys, dens.h, y) + cat.log_prior[v];
    }
    const double total = log_sum_exp(l);
    for (double& v : l) v = std::exp(v - total);
    return l;
}

namespace {

// log q for a continuous attribute from shifted x kernels (a_shift) and shifted y kernels (b_shift).
double continuous_log_q(const NbrModel::ContinuousAttribute& attr, std::span<const double> ys,
                        std::span<const double> ax, double a_shift, std::span<const double> by, double b_shift,
                        double log_marginal, double log_hx, double x, double y) {
    double joint = 0.0;
    for (std::size_t j = 0; j < ax.size(); ++j) joint += ax[j] * by[j];
    double log_joint;
    if (joint > kLinearSumFloor) {
        log_joint = std::log(joint) + a_shift + b_shift;
    } else {
        const double cx = -0.5 / (attr.hx * attr.hx);
        const double cy = -0.5 / (attr.hy * attr.hy);
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const double dx = x - attr.xs[j];
            const double dy = y - ys[j];
            m = std::max(m, cx * dx * dx + cy * dy * dy);
        }
        double s = 0.0;
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const double dx = x - attr.xs[j];
            const double dy = y - ys[j];
            s += std::exp(cx * dx * dx + cy * dy * dy - m);
        }
        log_joint = m + std::log(s);
    }
    const double log_q = log_joint - log_marginal - log_hx - kLogSqrt2Pi;
    return std::max(log_q, kLogFloor);
}

double categorical_log_q(const NbrModel::CategoricalAttribute& cat, std::span<const double> ys, double target_h,
                         std::size_t value, double y) {
    const std::size_t k = cat.categories.size();
    double l_value = 0.0;
    double m = -std::numeric_limits<double>::infinity();
    // Two passes keep this allocation-free; k is small.
    for (std::size_t v = 0; v < k; ++v) {
        const auto& dens = cat.categories[v];
        const double l = kde_log_density(dens.ys.empty() ? ys : std::span<const double>(dens.ys),
                                         dens.ys.empty() ? target_h : dens.h, y) +
                         cat.log_prior[v];
        if (v == value) l_value = l;
        m = std::max(m, l);
    }
    double s = 0.0;
    for (std::size_t v = 0; v < k; ++v) {
        const auto& dens = cat.categories[v];
        const double l = kde_log_density(dens.ys.empty() ? ys : std::span<const double>(dens.ys),
                                         dens.ys.empty() ? target_h : dens.h, y) +
                         cat.log_prior[v];
        s += std::exp(l - m);
    }
    return std::max(l_value - (m + std::log(s)), kLogFloor);
}

std::size_t category_of(const NbrModel::CategoricalAttribute& cat, double raw) {
    if (!(raw >= 0.0) || raw >= static_cast<double>(cat.categories.size()) || raw != std::floor(raw))
        throw std::out_of_range("category index out of range");
    return static_cast<std::size_t>(raw);
}

}  // namespace

double NbrModel::log_posterior_unnorm(std::span<const double> row, double y) const {
    if (row.size() != schema_.size()) throw std::invalid_argument("row width does not match the model schema");
    double total = log_target_density(y);
    std::vector<double> ax(ys_.size());
    std::vector<double> by(ys_.size());
    for (const auto& attr : continuous_) {
        const double x = row[attr.column];
        const double a_shift = shifted_kernels(attr.xs, x, -0.5 / (attr.hx * attr.hx), ax);
        const double b_shift = shifted_kernels(ys_, y, -0.5 / (attr.hy * attr.hy), by);
        const double marg = std::accumulate(by.begin(), by.end(), 0.0);
        total += continuous_log_q(attr, ys_, ax, a_shift, by, b_shift, std::log(marg) + b_shift, std::log(attr.hx), x, y);
    }
    for (const auto& cat : categorical_)
        total += categorical_log_q(cat, ys_, target_h_, category_of(cat, row[cat.column]), y);
    return total;
}

NbrPredictor::NbrPredictor(const NbrModel& model, const ModeSearchConfig& cfg) : model_(&model), cfg_(cfg) {
    cfg_.validate();
    std::tie(lo_, hi_) = model.search_range(cfg_);
    resolution_ = mode_search_resolution(hi_ - lo_, cfg_);
    grid_ = grid_points(lo_, hi_, cfg_.grid_points);

    const auto ys = model.targets();
    const std::size_t g = grid_.size();
    const std::size_t n = ys.size();
    target_c_ = -0.5 / (model.target_bandwidth() * model.target_bandwidth());
    target_log_norm_ = std::log(static_cast<double>(n) * model.target_bandwidth());
    for (const auto& attr : model.continuous()) {
        y_c_.push_back(-0.5 / (attr.hy * attr.hy));
        log_hx_.push_back(std::log(attr.hx));
    }
    level1_base_.resize(g);
    for (std::size_t k = 0; k < g; ++k) level1_base_[k] = model.log_target_density(grid_[k]);

    for (const auto& attr : model.continuous()) {
        auto& kernels = level1_y_kernels_.emplace_back(g * n);
        auto& shifts = level1_y_max_.emplace_back(g);
        auto& margs = level1_log_marg_.emplace_back(g);
        for (std::size_t k = 0; k < g; ++k) {
            std::span<double> by(kernels.data() + k * n, n);
            shifts[k] = shifted_kernels(ys, grid_[k], -0.5 / (attr.hy * attr.hy), by);
            margs[k] = std::log(std::accumulate(by.begin(), by.end(), 0.0)) + shifts[k];
        }
    }
    for (const auto& cat : model.categorical()) {
        auto& per_value = level1_cat_.emplace_back(cat.categories.size(), std::vector<double>(g));
        for (std::size_t v = 0; v < cat.categories.size(); ++v)
            for (std::size_t k = 0; k < g; ++k)
                per_value[v][k] = categorical_log_q(cat, ys, model.target_bandwidth(), v, grid_[k]);
    }
}

double NbrPredictor::evaluate(std::span<const double> row, const std::vector<std::vector<double>>& x_kernels,
                              const std::vector<double>& x_shift, std::span<double> by, double y) const {
    const auto ys = model_->targets();
    double total = gaussian_log_sum(ys, y, target_c_) - target_log_norm_ - kLogSqrt2Pi;
    for (std::size_t a = 0; a < model_->continuous().size(); ++a) {
        const auto& attr = model_->continuous()[a];
        const double b_shift = shifted_kernels(ys, y, y_c_[a], by);
        const double marg = std::accumulate(by.begin(), by.end(), 0.0);
        total += continuous_log_q(attr, ys, x_kernels[a], x_shift[a], by, b_shift, std::log(marg) + b_shift, log_hx_[a],
                                  row[attr.column], y);
    }
    for (const auto& cat : model_->categorical())
        total += categorical_log_q(cat, ys, model_->target_bandwidth(), category_of(cat, row[cat.column]), y);
    return total;
}

double NbrPredictor::predict(std::span<const double> row) const {
    const auto& model = *model_;
    if (row.size() != model.schema().size()) throw std::invalid_argument("row width does not match the model schema");
    const auto ys = model.targets();
    const std::size_t n = ys.size();
    const std::size_t g = grid_.size();

    std::vector<std::vector<double>> x_kernels(model.continuous().size(), std::vector<double>(n));
    std::vector<double> x_shift(model.continuous().size());
    for (std::size_t a = 0; a < model.continuous().size(); ++a) {
        const auto& attr = model.continuous()[a];
        x_shift[a] = shifted_kernels(attr.xs, row[attr.column], -0.5 / (attr.hx * attr.hx), x_kernels[a]);
    }
    std::vector<std::size_t> values;
    for (const auto& cat : model.categorical()) values.push_back(category_of(cat, row[cat.column]));

    // Level 1 on the shared grid.
    std::vector<double> scores(g);
    for (std::size_t k = 0; k < g; ++k) {
        double total = level1_base_[k];
        for (std::size_t a = 0; a < model.continuous().size(); ++a) {
            const auto& attr = model.continuous()[a];
            const std::span<const double> by(level1_y_kernels_[a].data() + k * n, n);
            total += continuous_log_q(attr, ys, x_kernels[a], x_shift[a], by, level1_y_max_[a][k],
                                      level1_log_marg_[a][k], log_hx_[a], row[attr.column], grid_[k]);
        }
        for (std::size_t c = 0; c < values.size(); ++c) total += level1_cat_[c][values[c]][k];
        scores[k] = total;
    }
    std::size_t best = argmax_first(scores);
    std::vector<double> grid = grid_;
    std::vector<double> by(n);

    // The new grid's endpoints are old grid points, so their scores carry over.
    for (std::size_t level = 1; level < cfg_.levels; ++level) {
        const std::size_t lo_idx = best == 0 ? 0 : best - 1;
        const std::size_t hi_idx = best + 1 == g ? g - 1 : best + 1;
        const double lo_score = scores[lo_idx];
        const double hi_score = scores[hi_idx];
        grid = grid_points(grid[lo_idx], grid[hi_idx], g);
        scores.front() = lo_score;
        scores.back() = hi_score;
        for (std::size_t k = 1; k + 1 < g; ++k) scores[k] = evaluate(row, x_kernels, x_shift, by, grid[k]);
        best = argmax_first(scores);
    }
    return grid[best];
}

double predict(const NbrModel& model, std::span<const double> row, const ModeSearchConfig& cfg) {
    return NbrPredictor(model, cfg).predict(row);
}

double rmse(const NbrModel& model, const Dataset& ds, const ModeSearchConfig& cfg) {
    if (ds.rows() == 0) throw std::invalid_argument("cannot compute RMSE on an empty dataset");
    if (ds.schema() != model.schema()) throw std::invalid_argument("dataset schema does not match the model");
    const NbrPredictor predictor(model, cfg);
    double ss = 0.0;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        const double e = predictor.predict(ds.row(r)) - ds.at(r, ds.target());
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(ds.rows()));
}

}  // namespace csonbr
