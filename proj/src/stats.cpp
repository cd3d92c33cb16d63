#include "fracftle/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fracftle::stats {

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("inverse_normal_cdf: p must lie in (0,1)");
    }
    // Acklam's algorithm.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double q, r, x;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        q = p - 0.5;
        r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    return x;
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double confidence) {
    if (trials == 0) throw std::invalid_argument("wilson_interval: trials must be >= 1");
    if (successes > trials) {
        throw std::invalid_argument("wilson_interval: successes exceed trials");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("wilson_interval: confidence must lie in (0,1)");
    }
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z = inverse_normal_cdf(0.5 * (1.0 + confidence));
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    Interval iv;
    iv.lo = std::max(0.0, center - half);
    iv.hi = std::min(1.0, center + half);
    return iv;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("ks_two_sample: empty sample");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
    }
    return d;
}

double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha) {
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    return c * std::sqrt((nn + mm) / (nn * mm));
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance: need >= 2 samples");
    const double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return acc / static_cast<double>(xs.size() - 1);
}

double median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median: empty sample");
    const std::size_t mid = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
    double hi = xs[mid];
    if (xs.size() % 2 == 1) return hi;
    std::nth_element(xs.begin(), xs.begin() + mid - 1, xs.end());
    return 0.5 * (hi + xs[mid - 1]);
}

double linear_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("linear_slope: need >= 2 matching points");
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_slope: degenerate abscissae");
    return sxy / sxx;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw std::invalid_argument("loglog_slope: data must be positive");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return linear_slope(lx, ly);
}

}  // namespace fracftle::stats
