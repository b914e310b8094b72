#include "invms/sample_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "invms/error.hpp"

namespace invms {

double empirical_quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw StateError("empirical_quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("empirical_quantile: p outside [0,1]");
  const double h = (double(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - double(lo)) * (sorted[hi] - sorted[lo]);
}

double empirical_quantile(std::span<const double> data, double p) {
  std::vector<double> s(data.begin(), data.end());
  std::sort(s.begin(), s.end());
  return empirical_quantile_sorted(s, p);
}

double mean(std::span<const double> data) {
  if (data.empty()) throw StateError("mean: empty sample");
  return std::accumulate(data.begin(), data.end(), 0.0) / double(data.size());
}

double sample_sd(std::span<const double> data) {
  if (data.size() < 2) throw StateError("sample_sd: need at least two values");
  const double m = mean(data);
  double ss = 0.0;
  for (double v : data) ss += (v - m) * (v - m);
  return std::sqrt(ss / double(data.size() - 1));
}

std::vector<double> ranks(std::span<const double> data) {
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return data[a] < data[b]; });
  std::vector<double> r(data.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && data[idx[j + 1]] == data[idx[i]]) ++j;
    const double avg = 0.5 * double(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw DomainError("pearson_correlation: need two equal-length samples, n >= 2");
  const double ma = mean(a), mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  return pearson_correlation(ra, rb);
}

double anderson_darling(std::span<const double> data,
                        const std::function<double(double)>& cdf) {
  if (data.empty()) throw StateError("anderson_darling: empty sample");
  std::vector<double> u(data.size());
  std::transform(data.begin(), data.end(), u.begin(), cdf);
  std::sort(u.begin(), u.end());
  const double n = double(u.size());
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double lo = std::clamp(u[i], 1e-300, 1.0 - 1e-16);
    const double hi = std::clamp(u[u.size() - 1 - i], 1e-300, 1.0 - 1e-16);
    s += (2.0 * double(i) + 1.0) * (std::log(lo) + std::log1p(-hi));
  }
  return -n - s / n;
}

double kolmogorov_smirnov(std::span<const double> data,
                          const std::function<double(double)>& cdf) {
  if (data.empty()) throw StateError("kolmogorov_smirnov: empty sample");
  std::vector<double> s(data.begin(), data.end());
  std::sort(s.begin(), s.end());
  const double n = double(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, f - double(i) / n, double(i + 1) / n - f});
  }
  return d;
}

}  // namespace invms
