#include "csonbr/linreg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace csonbr {

std::vector<double> encode_features(const LinearModel& model, std::span<const double> row) {
    std::vector<double> out(model.coefficients().size(), 0.0);
    for (const auto& enc : model.encoding()) {
        const double v = row[enc.column];
        if (!model.schema()[enc.column].categorical()) {
            out[enc.first] = v;
        } else {
            const auto idx = static_cast<std::size_t>(v);
            if (idx < enc.width) out[enc.first + idx] = 1.0;
        }
    }
    return out;
}

double LinearModel::predict(std::span<const double> row) const {
    if (row.size() != schema_.size()) throw std::invalid_argument("row width does not match the model schema");
    const auto x = encode_features(*this, row);
    double y = intercept_;
    for (std::size_t i = 0; i < x.size(); ++i) y += coefficients_[i] * x[i];
    return y;
}

LinearModel fit_ols(const Dataset& ds, double ridge) {
    if (!(ridge >= 0.0)) throw std::invalid_argument("ridge must be non-negative");
    if (ds.rows() == 0) throw std::invalid_argument("cannot fit on an empty dataset");

    LinearModel m;
    m.schema_ = ds.schema();
    std::size_t width = 0;
    for (std::size_t c = 0; c < ds.cols(); ++c) {
        if (c == ds.target()) continue;
        const auto& attr = ds.schema()[c];
        const std::size_t w = attr.categorical() ? attr.category_count() - 1 : 1;
        m.encoding_.push_back({c, width, w});
        width += w;
    }
    m.coefficients_.assign(width, 0.0);

    // Design matrix with a trailing intercept column.
    const auto n = static_cast<Eigen::Index>(ds.rows());
    const auto p = static_cast<Eigen::Index>(width + 1);
    Eigen::MatrixXd x(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto row = ds.row(static_cast<std::size_t>(r));
        const auto features = encode_features(m, row);
        for (std::size_t i = 0; i < width; ++i) x(r, static_cast<Eigen::Index>(i)) = features[i];
        x(r, p - 1) = 1.0;
        y(r) = row[ds.target()];
    }

    Eigen::MatrixXd gram = x.transpose() * x;
    for (Eigen::Index i = 0; i + 1 < p; ++i) gram(i, i) += ridge;
    const Eigen::VectorXd rhs = x.transpose() * y;
    Eigen::VectorXd beta = gram.ldlt().solve(rhs);
    if (!beta.allFinite()) beta = gram.completeOrthogonalDecomposition().solve(rhs);

    for (std::size_t i = 0; i < width; ++i) m.coefficients_[i] = beta(static_cast<Eigen::Index>(i));
    m.intercept_ = beta(p - 1);
    return m;
}

double lr_rmse(const LinearModel& model, const Dataset& ds) {
    if (ds.rows() == 0) throw std::invalid_argument("cannot compute RMSE on an empty dataset");
    double ss = 0.0;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        const double e = model.predict(ds.row(r)) - ds.at(r, ds.target());
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(ds.rows()));
}

}  // namespace csonbr
