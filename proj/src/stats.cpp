#include "csonbr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace csonbr {

namespace {

// Continued fraction for I_x(a, b) (modified Lentz), valid for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIterations = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    return h;
}

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(std::span<const double> v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta needs a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete beta needs 0 <= x <= 1");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
    if (std::isnan(t)) return t;
    if (t == 0.0) return 0.5;
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    // Lower tail mass beyond |t|, evaluated on whichever side of the beta argument is accurate.
    const double t2 = t * t;
    const double tail = t2 < df ? 0.5 * (1.0 - incomplete_beta(0.5, 0.5 * df, t2 / (df + t2)))
                                : 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t2));
    return t > 0.0 ? 1.0 - tail : tail;
}

TTestResult t_test_one_sample_less(std::span<const double> samples, double mu0) {
    if (samples.size() < 2) throw std::invalid_argument("t-test needs at least two samples");
    const double mean = mean_of(samples);
    const double sd = stddev_of(samples, mean);
    TTestResult r;
    r.df = static_cast<double>(samples.size() - 1);
    if (sd == 0.0) {
        r.degenerate = true;
        r.t = mean < mu0 ? -std::numeric_limits<double>::infinity()
                         : (mean > mu0 ? std::numeric_limits<double>::infinity() : 0.0);
        r.p = mean < mu0 ? 0.0 : 1.0;
        return r;
    }
    r.t = (mean - mu0) / (sd / std::sqrt(static_cast<double>(samples.size())));
    r.p = student_t_cdf(r.t, r.df);
    return r;
}

TTestResult t_test_one_sample_greater(std::span<const double> samples, double mu0) {
    TTestResult r = t_test_one_sample_less(samples, mu0);
    if (r.degenerate) {
        const double mean = mean_of(samples);
        r.p = mean > mu0 ? 0.0 : 1.0;
    } else {
        r.p = student_t_cdf(-r.t, r.df);
    }
    return r;
}

RunReport aggregate(std::span<const double> samples, double baseline, const RunConfigEcho& config) {
    if (samples.empty()) throw std::invalid_argument("cannot aggregate an empty sample");
    RunReport r;
    r.config = config;
    r.samples.assign(samples.begin(), samples.end());
    r.mean = mean_of(samples);
    r.stddev = stddev_of(samples, r.mean);
    r.best = *std::min_element(samples.begin(), samples.end());
    r.baseline = baseline;
    if (samples.size() >= 2) {
        const auto test = t_test_one_sample_less(samples, baseline);
        r.p_value = test.p;
        r.p_degenerate = test.degenerate;
    }
    return r;
}

}  // namespace csonbr
