#include "csonbr/swarm.hpp"

#include "csonbr/parallel.hpp"
#include "csonbr/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace csonbr {

namespace {

void validate_bounds(const Bounds& bounds) {
    if (bounds.empty()) throw std::invalid_argument("search space must have at least one dimension");
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        const auto [lo, hi] = bounds[i];
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi)
            throw std::invalid_argument("invalid bounds for dimension " + std::to_string(i));
    }
}

std::vector<Particle> initial_swarm(std::size_t size, const Bounds& bounds, Rng& rng) {
    std::vector<Particle> swarm(size);
    for (auto& p : swarm) {
        p.position.resize(bounds.size());
        p.velocity.assign(bounds.size(), 0.0);
        for (std::size_t d = 0; d < bounds.size(); ++d) p.position[d] = rng.uniform(bounds[d].first, bounds[d].second);
    }
    return swarm;
}

double checked(double f) { return std::isnan(f) ? std::numeric_limits<double>::infinity() : f; }

// Evaluates every particle without a cached fitness.
std::size_t evaluate_pending(std::vector<Particle>& swarm, const FitnessFn& fitness, std::size_t threads) {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < swarm.size(); ++i)
        if (!swarm[i].fitness) pending.push_back(i);
    parallel_for(pending.size(), threads, [&](std::size_t k) {
        auto& p = swarm[pending[k]];
        p.fitness = checked(fitness(p.position));
    });
    return pending.size();
}

std::size_t best_of(const std::vector<Particle>& swarm) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < swarm.size(); ++i)
        if (*swarm[i].fitness < *swarm[best].fitness) best = i;
    return best;
}

}  // namespace

void CsoConfig::validate() const {
    if (swarm_size < 2 || swarm_size % 2 != 0) throw std::invalid_argument("CSO swarm size must be even and >= 2");
    if (!(phi >= 0.0) || !std::isfinite(phi)) throw std::invalid_argument("CSO phi must be non-negative");
    validate_bounds(bounds);
}

void SpsoConfig::validate() const {
    if (swarm_size < 2) throw std::invalid_argument("SPSO swarm size must be >= 2");
    if (!std::isfinite(inertia) || !std::isfinite(cognitive) || !std::isfinite(social))
        throw std::invalid_argument("SPSO coefficients must be finite");
    validate_bounds(bounds);
}

void cso_update_loser(std::span<double> position, std::span<double> velocity, std::span<const double> winner,
                      std::span<const double> mean, std::span<const double> r1, std::span<const double> r2,
                      std::span<const double> r3, double phi) {
    for (std::size_t d = 0; d < position.size(); ++d) {
        const double x = position[d];
        double v = r1[d] * velocity[d] + r2[d] * (winner[d] - x);
        if (phi > 0.0) v += phi * r3[d] * (mean[d] - x);
        velocity[d] = v;
        position[d] = x + v;
    }
}

OptResult cso_minimize(const FitnessFn& fitness, const CsoConfig& cfg) {
    cfg.validate();
    const std::size_t s = cfg.swarm_size;
    const std::size_t dim = cfg.bounds.size();
    Rng rng(cfg.seed);

    auto swarm = initial_swarm(s, cfg.bounds, rng);
    OptResult result;
    result.evaluations = evaluate_pending(swarm, fitness, cfg.threads);
    result.trace.reserve(cfg.iterations + 1);
    result.trace.push_back(*swarm[best_of(swarm)].fitness);
    if (cfg.on_iteration) cfg.on_iteration(0, result.trace.back());

    std::vector<std::size_t> order(s);
    std::vector<double> mean(dim);
    std::vector<double> r1(dim), r2(dim), r3(dim);
    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
        if (cfg.phi > 0.0) {
            std::fill(mean.begin(), mean.end(), 0.0);
            for (const auto& p : swarm)
                for (std::size_t d = 0; d < dim; ++d) mean[d] += p.position[d];
            for (double& m : mean) m /= static_cast<double>(s);
            if (cfg.on_mean) cfg.on_mean(mean);
        }

        for (std::size_t i = 0; i < s; ++i) order[i] = i;
        for (std::size_t i = s; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

        for (std::size_t pair = 0; pair < s / 2; ++pair) {
            auto& first = swarm[order[2 * pair]];
            auto& second = swarm[order[2 * pair + 1]];
            const bool first_wins = *first.fitness <= *second.fitness;
            const Particle& winner = first_wins ? first : second;
            Particle& loser = first_wins ? second : first;

            for (auto& r : r1) r = rng.uniform();
            for (auto& r : r2) r = rng.uniform();
            if (cfg.phi > 0.0)
                for (auto& r : r3) r = rng.uniform();

            cso_update_loser(loser.position, loser.velocity, winner.position, mean, r1, r2, r3, cfg.phi);
            loser.fitness.reset();
        }

        result.evaluations += evaluate_pending(swarm, fitness, cfg.threads);
        result.trace.push_back(*swarm[best_of(swarm)].fitness);
        if (cfg.on_iteration) cfg.on_iteration(t, result.trace.back());
    }

    const auto& best = swarm[best_of(swarm)];
    result.best_position = best.position;
    result.best_fitness = *best.fitness;
    return result;
}

OptResult spso_minimize(const FitnessFn& fitness, const SpsoConfig& cfg) {
    cfg.validate();
    const std::size_t s = cfg.swarm_size;
    const std::size_t dim = cfg.bounds.size();
    Rng rng(cfg.seed);

    auto swarm = initial_swarm(s, cfg.bounds, rng);
    OptResult result;
    result.evaluations = evaluate_pending(swarm, fitness, cfg.threads);
    std::vector<Particle> personal = swarm;
    std::size_t global = best_of(personal);
    result.trace.reserve(cfg.iterations + 1);
    result.trace.push_back(*personal[global].fitness);
    if (cfg.on_iteration) cfg.on_iteration(0, result.trace.back());

    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
        const std::vector<double> gbest = personal[global].position;
        for (std::size_t i = 0; i < s; ++i) {
            auto& p = swarm[i];
            const auto& pbest = personal[i].position;
            for (std::size_t d = 0; d < dim; ++d) {
                const double u1 = rng.uniform();
                const double u2 = rng.uniform();
                const double x = p.position[d];
                const double v = cfg.inertia * p.velocity[d] + cfg.cognitive * u1 * (pbest[d] - x) +
                                 cfg.social * u2 * (gbest[d] - x);
                p.velocity[d] = v;
                p.position[d] = x + v;
            }
            p.fitness.reset();
        }
        result.evaluations += evaluate_pending(swarm, fitness, cfg.threads);
        for (std::size_t i = 0; i < s; ++i) {
            if (*swarm[i].fitness < *personal[i].fitness) {
                personal[i].position = swarm[i].position;
                personal[i].fitness = swarm[i].fitness;
            }
        }
        global = best_of(personal);
        result.trace.push_back(*personal[global].fitness);
        if (cfg.on_iteration) cfg.on_iteration(t, result.trace.back());
    }

    result.best_position = personal[global].position;
    result.best_fitness = *personal[global].fitness;
    return result;
}

}  // namespace csonbr
