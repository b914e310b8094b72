#pragma once

// Small sample summaries used by the fitting and sampler diagnostics.

#include <functional>
#include <span>
#include <vector>

namespace invms {

/// Type-7 (linear interpolation) empirical quantile. Throws StateError on
/// empty input.
double empirical_quantile(std::span<const double> data, double p);
/// Same, on data already sorted ascending.
double empirical_quantile_sorted(std::span<const double> sorted, double p);

double mean(std::span<const double> data);
/// Sample standard deviation (n - 1 denominator).
double sample_sd(std::span<const double> data);

/// Average ranks (1-based), ties sharing the mean rank.
std::vector<double> ranks(std::span<const double> data);
double pearson_correlation(std::span<const double> a, std::span<const double> b);
double spearman_correlation(std::span<const double> a, std::span<const double> b);

/// Anderson-Darling A^2 against a fully specified continuous CDF.
double anderson_darling(std::span<const double> data,
                        const std::function<double(double)>& cdf);
/// Upper 1% point of A^2 for a fully specified null.
inline constexpr double kAndersonDarlingCritical1pct = 3.857;

/// Kolmogorov-Smirnov D_n against a continuous CDF.
double kolmogorov_smirnov(std::span<const double> data,
                          const std::function<double(double)>& cdf);

}  // namespace invms
