#include "csonbr/surrogate.hpp"

#include "csonbr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace csonbr {

SurrogateCodec::SurrogateCodec(Schema schema, std::size_t rows) : schema_(std::move(schema)), rows_(rows) {
    validate_schema(schema_);
    if (rows_ == 0) throw std::invalid_argument("surrogate dataset needs at least one row");
}

Dataset SurrogateCodec::decode(std::span<const double> particle) const {
    if (particle.size() != dimension())
        throw std::invalid_argument("particle has dimension " + std::to_string(particle.size()) + ", expected " +
                                    std::to_string(dimension()));
    const std::size_t d = schema_.size();
    std::vector<double> cells(particle.begin(), particle.end());
    for (std::size_t a = 0; a < d; ++a) {
        if (!schema_[a].categorical()) continue;
        const double top = static_cast<double>(schema_[a].category_count() - 1);
        for (std::size_t r = 0; r < rows_; ++r) {
            double& v = cells[r * d + a];
            v = std::isnan(v) ? 0.0 : std::floor(std::clamp(v, 0.0, top) + 0.5);
        }
    }
    return Dataset(schema_, std::move(cells));
}

std::vector<double> SurrogateCodec::encode(const Dataset& ds) const {
    if (ds.schema() != schema_ || ds.rows() != rows_) throw std::invalid_argument("dataset does not match the codec");
    return std::vector<double>(ds.cells().begin(), ds.cells().end());
}

Bounds SurrogateCodec::init_bounds(const Dataset& train) const {
    if (train.schema() != schema_) throw std::invalid_argument("training data does not match the codec schema");
    const auto column_stats = stats(train);
    Bounds per_attribute(schema_.size());
    for (std::size_t a = 0; a < schema_.size(); ++a) {
        if (schema_[a].categorical())
            per_attribute[a] = {0.0, static_cast<double>(schema_[a].category_count() - 1)};
        else
            per_attribute[a] = {column_stats[a].min, column_stats[a].max};
    }
    Bounds out;
    out.reserve(dimension());
    for (std::size_t r = 0; r < rows_; ++r) out.insert(out.end(), per_attribute.begin(), per_attribute.end());
    return out;
}

SurrogateFitness::SurrogateFitness(SurrogateCodec codec, Dataset train, ModeSearchConfig mode,
                                   std::optional<std::size_t> subsample, std::uint64_t subsample_seed)
    : codec_(std::move(codec)), scoring_(std::move(train)), mode_(mode) {
    mode_.validate();
    if (scoring_.rows() == 0) throw std::invalid_argument("fitness needs non-empty training data");
    if (scoring_.schema() != codec_.schema()) throw std::invalid_argument("training data does not match the codec");
    const auto column_stats = stats(scoring_);
    const auto& t = column_stats[scoring_.target()];
    train_options_.reference_target_range = t.max - t.min;

    if (subsample && *subsample < scoring_.rows()) {
        if (*subsample == 0) throw std::invalid_argument("fitness subsample must be positive");
        std::vector<std::size_t> order(scoring_.rows());
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(subsample_seed);
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        order.resize(*subsample);
        scoring_ = scoring_.select_rows(order);
    }
}

NbrModel SurrogateFitness::model_for(std::span<const double> particle) const {
    return train(codec_.decode(particle), train_options_);
}

double SurrogateFitness::operator()(std::span<const double> particle) const {
    const std::size_t d = codec_.schema().size();
    for (std::size_t i = 0; i < particle.size(); ++i)
        if (!std::isfinite(particle[i]) && !codec_.schema()[i % d].categorical())
            return std::numeric_limits<double>::infinity();
    return rmse(model_for(particle), scoring_, mode_);
}

void PipelineConfig::validate() const {
    if (rows == 0) throw std::invalid_argument("surrogate size n must be >= 1");
    if (repeats == 0) throw std::invalid_argument("repeat count must be >= 1");
    mode.validate();
}

EvolveResult evolve(const Dataset& train_data, const PipelineConfig& cfg) {
    cfg.validate();
    if (train_data.rows() == 0) throw std::invalid_argument("training data is empty");
    SurrogateCodec codec(train_data.schema(), cfg.rows);
    const Bounds bounds = codec.init_bounds(train_data);
    const SurrogateFitness fitness(codec, train_data, cfg.mode, cfg.fitness_subsample, cfg.seed);
    const FitnessFn fn = [&fitness](std::span<const double> x) { return fitness(x); };

    OptResult opt = std::visit(
        [&](auto optimizer) {
            optimizer.bounds = bounds;
            optimizer.seed = cfg.seed;
            if constexpr (std::is_same_v<decltype(optimizer), CsoConfig>)
                return cso_minimize(fn, optimizer);
            else
                return spso_minimize(fn, optimizer);
        },
        cfg.optimizer);

    Dataset surrogate = codec.decode(opt.best_position);
    NbrModel model = fitness.model_for(opt.best_position);
    return {std::move(surrogate), std::move(model), std::move(opt)};
}

}  // namespace csonbr
