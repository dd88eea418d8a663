#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iterator>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace cuttree::stats {

struct TwoSided {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov tail P(K > lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_tail(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// p-value of a KS distance d with effective sample size ne, using the
/// small-sample correction of Stephens.
inline double ks_p_value(double d, double ne) {
  const double r = std::sqrt(ne);
  return kolmogorov_tail((r + 0.12 + 0.11 / r) * d);
}

/// One-sample KS distance between a sample and a continuous CDF.
inline TwoSided ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_test: empty sample");
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, ks_p_value(d, n)};
}

/// Two-sample KS distance.
inline TwoSided ks_test(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_test: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

/// Wasserstein-1 distance between two empirical laws on the line.
inline double wasserstein1(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein1: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<double> grid;
  grid.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(grid));
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  double w = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    while (i < a.size() && a[i] <= grid[g]) ++i;
    while (j < b.size() && b[j] <= grid[g]) ++j;
    w += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) *
         (grid[g + 1] - grid[g]);
  }
  return w;
}

/// Wasserstein-1 distance between an empirical law and a finite discrete law
/// given as (value, weight) pairs with weights summing to one.
inline double wasserstein1_discrete(std::vector<double> sample,
                                    std::vector<std::pair<double, double>> atoms) {
  if (sample.empty() || atoms.empty()) throw std::invalid_argument("wasserstein1: empty input");
  std::sort(sample.begin(), sample.end());
  std::sort(atoms.begin(), atoms.end());
  std::vector<double> grid(sample);
  for (const auto& at : atoms) grid.push_back(at.first);
  std::sort(grid.begin(), grid.end());
  const auto n = static_cast<double>(sample.size());
  std::size_t i = 0;
  std::size_t a = 0;
  double mass = 0.0;
  double w = 0.0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    while (i < sample.size() && sample[i] <= grid[g]) ++i;
    while (a < atoms.size() && atoms[a].first <= grid[g]) mass += atoms[a++].second;
    w += std::abs(static_cast<double>(i) / n - mass) * (grid[g + 1] - grid[g]);
  }
  return w;
}

/// Energy distance 2E|X-Y| - E|X-X'| - E|Y-Y'| between two samples of
/// equal-length vectors (Euclidean norm; within-sample terms as U-statistics).
inline double energy_distance(std::span<const std::vector<double>> x,
                              std::span<const std::vector<double>> y) {
  if (x.size() < 2 || y.size() < 2) throw std::invalid_argument("energy_distance: need 2+ points");
  auto norm = [](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += (u[k] - v[k]) * (u[k] - v[k]);
    return std::sqrt(s);
  };
  auto within = [&](std::span<const std::vector<double>> z) {
    double s = 0.0;
    for (std::size_t a = 0; a < z.size(); ++a) {
      for (std::size_t b = a + 1; b < z.size(); ++b) s += norm(z[a], z[b]);
    }
    const auto m = static_cast<double>(z.size());
    return 2.0 * s / (m * (m - 1.0));
  };
  double cross = 0.0;
  for (const auto& u : x) {
    for (const auto& v : y) cross += norm(u, v);
  }
  cross /= static_cast<double>(x.size()) * static_cast<double>(y.size());
  return std::max(0.0, 2.0 * cross - within(x) - within(y));
}

/// Pearson chi-square goodness of fit of counts against probabilities.
inline TwoSided chi_square_test(std::span<const std::uint64_t> counts,
                                std::span<const double> probs) {
  if (counts.size() != probs.size() || counts.size() < 2) {
    throw std::invalid_argument("chi_square_test: need matching cell lists of size >= 2");
  }
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  double stat = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double e = total * probs[k];
    stat += (static_cast<double>(counts[k]) - e) * (static_cast<double>(counts[k]) - e) / e;
  }
  const boost::math::chi_squared dist(static_cast<double>(counts.size() - 1));
  return {stat, boost::math::cdf(boost::math::complement(dist, stat))};
}

inline double mean(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Standard error of the mean.
inline double standard_error(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

/// Empirical quantile (type 7, linear interpolation).
inline double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Pearson correlation.
inline double correlation(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  return sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

/// CDF of the r-th smallest of j i.i.d. draws with common CDF value F.
inline double order_statistic_cdf(double F, unsigned r, unsigned j) {
  if (r < 1 || r > j) throw std::invalid_argument("order_statistic_cdf: need 1 <= r <= j");
  if (F <= 0.0) return 0.0;
  if (F >= 1.0) return 1.0;
  return boost::math::ibeta(static_cast<double>(r), static_cast<double>(j - r + 1), F);
}

inline double beta_cdf(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

}  // namespace cuttree::stats
