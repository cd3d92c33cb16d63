#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace fracftle::stats {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Inverse standard normal CDF (Acklam's rational approximation, |rel err| < 1.2e-9).
double inverse_normal_cdf(double p);

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials, double confidence);

/// Two-sample Kolmogorov-Smirnov statistic sup|F1 - F2|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Large-sample two-sample KS critical value at level alpha.
double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha);

double mean(const std::vector<double>& xs);
/// Unbiased sample variance.
double variance(const std::vector<double>& xs);
double median(std::vector<double> xs);

/// Least-squares slope of y against x.
double linear_slope(const std::vector<double>& x, const std::vector<double>& y);
/// Least-squares slope of log(y) against log(x); requires positive data.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fracftle::stats
