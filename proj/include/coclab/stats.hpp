#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace coclab {

struct mean_var_result {
    double mean = 0.0;
    double var = 0.0; // unbiased sample variance
    std::size_t count = 0;
};

mean_var_result mean_var(std::span<const double> xs);

/// Standard error of the mean, sd/sqrt(n).
double stderr_of_mean(std::span<const double> xs);

/// Wilson score interval bounds for a binomial proportion (z ~ quantile).
double wilson_upper(std::size_t successes, std::size_t trials, double z);
double wilson_lower(std::size_t successes, std::size_t trials, double z);

struct line_fit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares y = slope x + intercept.
line_fit fit_line(std::span<const double> x, std::span<const double> y);

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and a
/// cdf given by its values at the sorted sample points.
double ks_distance_sorted(std::span<const double> sorted_samples,
                          std::span<const double> cdf_at_samples);

} // namespace coclab
