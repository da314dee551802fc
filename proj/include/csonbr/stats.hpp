#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace csonbr {

/// Regularized incomplete beta function I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// CDF of Student's t distribution with `df` degrees of freedom.
double student_t_cdf(double t, double df);

struct TTestResult {
    double t = 0.0;
    double p = 0.0;
    double df = 0.0;
    bool degenerate = false;  // zero sample variance; p is 0 or 1 by the sign of mean - mu0
};

/// One-sample t-test of H1: mean < mu0. Small p means the samples are
/// significantly below mu0. Needs at least two samples.
TTestResult t_test_one_sample_less(std::span<const double> samples, double mu0);

/// Same test with the opposite alternative (H1: mean > mu0).
TTestResult t_test_one_sample_greater(std::span<const double> samples, double mu0);

struct RunConfigEcho {
    std::optional<double> phi;  // absent for optimizers without phi
    std::size_t n = 0;
    std::size_t swarm_size = 0;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
};

struct RunReport {
    std::string dataset;
    std::string algorithm;
    RunConfigEcho config;
    std::vector<double> samples;  // per-repeat test RMSE
    double mean = 0.0;
    double stddev = 0.0;  // sample (n - 1) stddev, 0 for a single sample
    double best = 0.0;
    double baseline = 0.0;  // NBR test RMSE on the same split
    std::optional<double> lr_rmse;
    std::optional<double> p_value;  // H1: mean < baseline; absent for fewer than 2 samples
    bool p_degenerate = false;
    std::vector<double> wall_seconds;
    std::vector<std::size_t> evaluations;
};

RunReport aggregate(std::span<const double> samples, double baseline, const RunConfigEcho& config);

}  // namespace csonbr
