#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace csonbr {

/// Fitness to minimize. Must be pure and safe to call concurrently.
using FitnessFn = std::function<double(std::span<const double>)>;

/// Called after initialization (iteration 0) and after every iteration with
/// the current best fitness.
using IterationCallback = std::function<void(std::size_t iteration, double best_fitness)>;

using Bounds = std::vector<std::pair<double, double>>;

struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    std::optional<double> fitness;  // cached value of the last evaluation of `position`
};

struct CsoConfig {
    std::size_t swarm_size = 100;  // must be even
    std::size_t iterations = 1000;
    double phi = 0.1;
    std::uint64_t seed = 0;
    Bounds bounds;                 // one (lo, hi) per dimension, for initialization only
    std::size_t threads = 1;       // 0 = hardware concurrency
    IterationCallback on_iteration;
    /// Receives the swarm mean each time it is computed (never when phi == 0).
    std::function<void(std::span<const double>)> on_mean;

    void validate() const;
};

struct SpsoConfig {
    std::size_t swarm_size = 50;
    std::size_t iterations = 1000;
    double inertia = 0.6;
    double cognitive = 1.7;
    double social = 1.7;
    std::uint64_t seed = 0;
    Bounds bounds;
    std::size_t threads = 1;
    IterationCallback on_iteration;

    void validate() const;
};

struct OptResult {
    std::vector<double> best_position;
    double best_fitness = 0.0;
    std::vector<double> trace;  // trace[0]: initial swarm; trace[t]: after iteration t
    std::size_t evaluations = 0;
};

/// Competitive swarm optimizer.
///
/// Each iteration pairs all particles at random. The fitter particle of a
/// pair (the first one on ties) passes through unchanged; the loser moves via
///   v <- r1 * v + r2 * (x_winner - x) + phi * r3 * (x_mean - x),  x <- x + v
/// with fresh uniform [0, 1] vectors r1, r2, r3 per competition. The pairing
/// and all random vectors of an iteration are drawn on the calling thread
/// before any fitness evaluation, so results do not depend on `threads`.
/// Positions are never clamped after initialization.
OptResult cso_minimize(const FitnessFn& fitness, const CsoConfig& cfg);

/// Velocity and position update of one losing particle, in place. With
/// phi == 0 the mean term is skipped and `mean`/`r3` are not read.
void cso_update_loser(std::span<double> position, std::span<double> velocity, std::span<const double> winner,
                      std::span<const double> mean, std::span<const double> r1, std::span<const double> r2,
                      std::span<const double> r3, double phi);

/// Standard (global-best) PSO with personal bests, synchronous updates and
/// zero initial velocities. No velocity or position clamping.
OptResult spso_minimize(const FitnessFn& fitness, const SpsoConfig& cfg);

}  // namespace csonbr
