#pragma once

#include "csonbr/kde.hpp"
#include "csonbr/tabular.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace csonbr {

/// Recursive grid search settings for locating the posterior mode.
struct ModeSearchConfig {
    std::size_t grid_points = 11;  // G, points per level
    std::size_t levels = 6;        // L
    double range_expansion = 0.1;  // rho, fraction of the target range added on each side

    void validate() const;
};

struct NbrTrainOptions {
    /// Value range of the real training target. Sets the fallback bandwidth
    /// max(1e-3, 1e-3 * range) used for degenerate (constant or single-point)
    /// samples; defaults to the range of the data being trained on.
    std::optional<double> reference_target_range;
};

/// Naive Bayes for regression over a tabular schema.
///
/// Continuous attributes use a bivariate KDE over (x_i, y) with jointly
/// selected bandwidths; the conditional density is the ratio of that joint
/// to a univariate KDE over y with the same y bandwidth. Categorical
/// attributes use one KDE over y per category plus Laplace-smoothed priors,
/// inverted with Bayes' rule. Training rows are put into a canonical order
/// first, so the model does not depend on row order.
class NbrModel {
public:
    struct ContinuousAttribute {
        std::size_t column;
        std::vector<double> xs;  // aligned with NbrModel::targets()
        double hx;
        double hy;
    };

    struct CategoryDensity {
        std::vector<double> ys;  // empty: category unseen, falls back to the target marginal
        double h;
    };

    struct CategoricalAttribute {
        std::size_t column;
        std::vector<CategoryDensity> categories;
        std::vector<double> log_prior;
    };

    const Schema& schema() const noexcept { return schema_; }
    std::size_t target_column() const noexcept { return target_; }
    std::span<const double> targets() const noexcept { return ys_; }
    double target_bandwidth() const noexcept { return target_h_; }
    double fallback_bandwidth() const noexcept { return fallback_h_; }
    const std::vector<ContinuousAttribute>& continuous() const noexcept { return continuous_; }
    const std::vector<CategoricalAttribute>& categorical() const noexcept { return categorical_; }

    /// Interval scanned by the mode search: the training target range widened
    /// by rho on each side, or +/- fallback bandwidth when the range is zero.
    std::pair<double, double> search_range(const ModeSearchConfig& cfg) const;

    /// log f(y) + sum_i log q_i(x_i | y), without the normalizing integral.
    /// `row` holds one value per schema column; the target cell is ignored.
    double log_posterior_unnorm(std::span<const double> row, double y) const;

    /// P(X_i = v | Y = y) for every category v of the given categorical attribute.
    std::vector<double> category_probabilities(std::size_t attribute, double y) const;

    double log_target_density(double y) const;

    friend NbrModel train(const Dataset& ds, const NbrTrainOptions& options);

private:
    Schema schema_;
    std::size_t target_ = 0;
    std::vector<double> ys_;
    double target_h_ = 1.0;
    double fallback_h_ = 1e-3;
    double y_min_ = 0.0;
    double y_max_ = 0.0;
    std::vector<ContinuousAttribute> continuous_;
    std::vector<CategoricalAttribute> categorical_;
};

NbrModel train(const Dataset& ds, const NbrTrainOptions& options = {});

/// Batch predictor bound to one model and search configuration. The first
/// search level is shared by every row, so it is precomputed once.
class NbrPredictor {
public:
    NbrPredictor(const NbrModel& model, const ModeSearchConfig& cfg);

    double predict(std::span<const double> row) const;

    /// Spacing of the final search level.
    double resolution() const noexcept { return resolution_; }

private:
    double evaluate(std::span<const double> row, const std::vector<std::vector<double>>& x_kernels,
                    const std::vector<double>& x_shift, std::span<double> by, double y) const;

    const NbrModel* model_;
    ModeSearchConfig cfg_;
    double lo_ = 0.0;
    double hi_ = 0.0;
    double resolution_ = 0.0;
    std::vector<double> grid_;
    double target_c_ = 0.0;         // -1 / (2 h^2) of the target KDE
    double target_log_norm_ = 0.0;  // log(N h) of the target KDE
    std::vector<double> y_c_;       // per continuous attr: -1 / (2 hy^2)
    std::vector<double> log_hx_;    // per continuous attr
    std::vector<double> level1_base_;                     // per grid point: log target density
    std::vector<std::vector<double>> level1_y_kernels_;   // per continuous attr: G x N shifted kernels
    std::vector<std::vector<double>> level1_y_max_;       // per continuous attr: per grid point shift
    std::vector<std::vector<double>> level1_log_marg_;    // per continuous attr: per grid point log marginal
    std::vector<std::vector<std::vector<double>>> level1_cat_;  // per categorical attr: per category: per grid point log q
};

/// Posterior mode by recursive grid search. Ties go to the smaller y.
double predict(const NbrModel& model, std::span<const double> row, const ModeSearchConfig& cfg = {});

/// Root mean squared error of the model's predictions on ds.
double rmse(const NbrModel& model, const Dataset& ds, const ModeSearchConfig& cfg = {});

/// Spacing of the last level of the recursive grid search over a range of the given width.
double mode_search_resolution(double width, const ModeSearchConfig& cfg);

}  // namespace csonbr
