#include "coclab/stats.hpp"

#include <cmath>

#include "coclab/kernels.hpp"

namespace coclab {

mean_var_result mean_var(std::span<const double> xs) {
    mean_var_result r;
    r.count = xs.size();
    if (xs.empty())
        return r;
    r.mean = kernels::sum(xs) / static_cast<double>(xs.size());
    if (xs.size() < 2)
        return r;
    double acc = 0.0;
    for (double x : xs) {
        const double dx = x - r.mean;
        acc += dx * dx;
    }
    r.var = acc / static_cast<double>(xs.size() - 1);
    return r;
}

double stderr_of_mean(std::span<const double> xs) {
    if (xs.size() < 2)
        return 0.0;
    const auto mv = mean_var(xs);
    return std::sqrt(mv.var / static_cast<double>(xs.size()));
}

double wilson_upper(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0)
        return 1.0;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = p + z2 / (2.0 * n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return std::fmin(1.0, (center + half) / denom);
}

double wilson_lower(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0)
        return 0.0;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = p + z2 / (2.0 * n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return std::fmax(0.0, (center - half) / denom);
}

line_fit fit_line(std::span<const double> x, std::span<const double> y) {
    line_fit f;
    const std::size_t n = x.size();
    if (n < 2)
        return f;
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0)
        return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

double ks_distance_sorted(std::span<const double> sorted_samples,
                          std::span<const double> cdf_at_samples) {
    const std::size_t n = sorted_samples.size();
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        const double c = cdf_at_samples[i];
        d = std::fmax(d, std::fmax(std::fabs(c - lo), std::fabs(c - hi)));
    }
    return d;
}

} // namespace coclab
