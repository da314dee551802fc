#pragma once

#include "csonbr/tabular.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace csonbr {

/// Least-squares linear model. Categorical attributes are one-hot encoded
/// with the last category dropped; the intercept is not penalized.
class LinearModel {
public:
    struct Encoding {
        std::size_t column;
        std::size_t first;  // index of the first encoded feature
        std::size_t width;  // 1 for numeric, k - 1 for categorical
    };

    double predict(std::span<const double> row) const;

    std::span<const double> coefficients() const noexcept { return coefficients_; }
    double intercept() const noexcept { return intercept_; }
    const std::vector<Encoding>& encoding() const noexcept { return encoding_; }
    const Schema& schema() const noexcept { return schema_; }

    /// Label used in reports; this is plain OLS, not M5' attribute selection.
    static constexpr const char* method_label = "OLS (not M5')";

    friend LinearModel fit_ols(const Dataset& ds, double ridge);

private:
    Schema schema_;
    std::vector<Encoding> encoding_;
    std::vector<double> coefficients_;
    double intercept_ = 0.0;
};

/// Minimizes sum (y - X b - b0)^2 + ridge * |b|^2 via the normal equations.
LinearModel fit_ols(const Dataset& ds, double ridge = 1e-8);

double lr_rmse(const LinearModel& model, const Dataset& ds);

/// Encoded feature vector (without the intercept column) for one row.
std::vector<double> encode_features(const LinearModel& model, std::span<const double> row);

}  // namespace csonbr
