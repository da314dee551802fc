#pragma once

#include "csonbr/nbr.hpp"
#include "csonbr/swarm.hpp"
#include "csonbr/tabular.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace csonbr {

/// Maps flat particles of length d * n to n-row datasets and back.
///
/// Layout is row-major: attribute a of surrogate row r sits at r * d + a.
/// Numeric cells are copied verbatim (no clamping to the real data range);
/// categorical cells are clamped to [0, k - 1] and rounded half-up.
class SurrogateCodec {
public:
    SurrogateCodec(Schema schema, std::size_t rows);

    const Schema& schema() const noexcept { return schema_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t dimension() const noexcept { return rows_ * schema_.size(); }

    Dataset decode(std::span<const double> particle) const;
    std::vector<double> encode(const Dataset& ds) const;

    /// Initialization box: (min, max) of each numeric attribute in `train`,
    /// (0, k - 1) for categorical attributes, repeated for every surrogate row.
    Bounds init_bounds(const Dataset& train) const;

private:
    Schema schema_;
    std::size_t rows_;
};

/// Fitness of a particle: RMSE, on the real training data, of an NBR model
/// trained on the decoded surrogate. Returns +inf for particles with
/// non-finite numeric cells so the function stays total.
class SurrogateFitness {
public:
    /// With `subsample`, only a fixed seeded subset of that many training rows
    /// is used for scoring.
    SurrogateFitness(SurrogateCodec codec, Dataset train, ModeSearchConfig mode,
                     std::optional<std::size_t> subsample = std::nullopt, std::uint64_t subsample_seed = 0);

    double operator()(std::span<const double> particle) const;

    NbrModel model_for(std::span<const double> particle) const;
    const SurrogateCodec& codec() const noexcept { return codec_; }
    const Dataset& scoring_data() const noexcept { return scoring_; }

private:
    SurrogateCodec codec_;
    Dataset scoring_;
    ModeSearchConfig mode_;
    NbrTrainOptions train_options_;
};

struct PipelineConfig {
    /// Optimizer settings; bounds and seed are filled in by evolve().
    std::variant<CsoConfig, SpsoConfig> optimizer = CsoConfig{};
    std::size_t rows = 10;  // n, surrogate dataset size
    ModeSearchConfig mode;
    std::size_t repeats = 10;
    std::uint64_t seed = 0;
    std::optional<std::size_t> fitness_subsample;

    void validate() const;
};

struct EvolveResult {
    Dataset surrogate;
    NbrModel model;
    OptResult optimization;
};

/// Optimizes a surrogate dataset for `train` with a single optimizer run
/// seeded by cfg.seed.
EvolveResult evolve(const Dataset& train, const PipelineConfig& cfg);

}  // namespace csonbr
