#pragma once

// Limit packages of the tree families: the distance scale ell(n), the law of
// zeta (always a finite mixture of atoms here), its Laplace transform lambda,
// the running integral Lambda, and the limit measure mu on [0, a) with CDF
// 1 - lambda(Lambda^{-1}(x)).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cuttree/family.hpp"
#include "cuttree/rng.hpp"

namespace cuttree {

struct ZetaAtom {
  double weight;
  double value;
};

class LimitModel {
 public:
  LimitModel(std::string id, double ell_coefficient, std::vector<ZetaAtom> atoms)
      : id_(std::move(id)), ell_coefficient_(ell_coefficient), atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw std::invalid_argument("LimitModel: no atoms");
    double total = 0.0;
    for (const auto& at : atoms_) {
      if (!(at.weight > 0.0) || !(at.value > 0.0)) {
        throw std::invalid_argument("LimitModel: atoms need positive weight and value");
      }
      total += at.weight;
    }
    for (auto& at : atoms_) at.weight /= total;
    for (const auto& at : atoms_) a_ += at.weight / at.value;
    constant_ = atoms_.size() == 1;
    if (!constant_) {
      quantile_grid_.resize(kGrid);
      for (std::size_t k = 0; k < kGrid; ++k) {
        quantile_grid_[k] = mu_quantile((static_cast<double>(k) + 0.5) / kGrid);
      }
      cdf_table_.resize(kTable + 1);
      for (std::size_t k = 0; k <= kTable; ++k) {
        cdf_table_[k] = mu_cdf(a_ * static_cast<double>(k) / kTable);
      }
    }
  }

  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] const std::vector<ZetaAtom>& atoms() const noexcept { return atoms_; }
  [[nodiscard]] bool zeta_constant() const noexcept { return constant_; }

  /// Distance scale ell(n) = c ln n.
  [[nodiscard]] double ell(std::size_t n) const {
    return ell_coefficient_ * std::log(static_cast<double>(n));
  }
  [[nodiscard]] double ell_coefficient() const noexcept { return ell_coefficient_; }

  [[nodiscard]] double sample_zeta(Stream& rng) const {
    if (constant_) return atoms_.front().value;
    double u = rng.uniform();
    for (const auto& at : atoms_) {
      if (u < at.weight) return at.value;
      u -= at.weight;
    }
    return atoms_.back().value;
  }

  /// lambda(t) = E[exp(-t zeta)].
  [[nodiscard]] double lambda(double t) const {
    double s = 0.0;
    for (const auto& at : atoms_) s += at.weight * std::exp(-t * at.value);
    return s;
  }

  /// Lambda(t) = integral of lambda over [0, t].
  [[nodiscard]] double Lambda(double t) const {
    if (std::isinf(t)) return a_;
    double s = 0.0;
    for (const auto& at : atoms_) s += at.weight * (-std::expm1(-t * at.value)) / at.value;
    return s;
  }

  /// a = Lambda(infinity) = E[1/zeta].
  [[nodiscard]] double a() const noexcept { return a_; }

  /// Inverse of Lambda on [0, a); +infinity at or beyond a.
  [[nodiscard]] double Lambda_inv(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= a_) return std::numeric_limits<double>::infinity();
    if (constant_) {
      const double c = atoms_.front().value;
      return -std::log1p(-c * x) / c;
    }
    double lo = 0.0;
    double hi = 1.0;
    while (Lambda(hi) < x) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (Lambda(mid) < x ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  /// Inverse of lambda on (0, 1].
  [[nodiscard]] double lambda_inv(double y) const {
    if (y >= 1.0) return 0.0;
    if (y <= 0.0) return std::numeric_limits<double>::infinity();
    if (constant_) return -std::log(y) / atoms_.front().value;
    double lo = 0.0;
    double hi = 1.0;
    while (lambda(hi) > y) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (lambda(mid) > y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  [[nodiscard]] double mu_cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= a_) return 1.0;
    if (constant_) return atoms_.front().value * x;
    return std::clamp(1.0 - lambda(Lambda_inv(x)), 0.0, 1.0);
  }

  [[nodiscard]] double mu_quantile(double p) const {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return a_;
    if (constant_) return p / atoms_.front().value;
    return Lambda(lambda_inv(1.0 - p));
  }

  /// Draw from mu as Lambda(E / zeta): P(E/zeta > t) = lambda(t).
  [[nodiscard]] double sample_mu(Stream& rng) const {
    const double e = rng.exponential();
    const double z = sample_zeta(rng);
    return Lambda(e / z);
  }

  /// CDF of |U - U'| for U, U' i.i.d. mu.
  [[nodiscard]] double abs_diff_cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= a_) return 1.0;
    if (constant_) {
      const double c = atoms_.front().value;
      return 2.0 * c * x - c * c * x * x;
    }
    double s = 0.0;
    for (double q : quantile_grid_) s += tabulated_cdf(q + x) - tabulated_cdf(q - x);
    return std::clamp(s / kGrid, 0.0, 1.0);
  }

  /// E[1 / (zeta_1 + zeta_2)].
  [[nodiscard]] double mean_inverse_pair_sum() const {
    double s = 0.0;
    for (const auto& x : atoms_) {
      for (const auto& y : atoms_) s += x.weight * y.weight / (x.value + y.value);
    }
    return s;
  }

 private:
  static constexpr std::size_t kGrid = 4096;
  static constexpr std::size_t kTable = 1 << 16;

  // mu_cdf by linear interpolation on a uniform grid of [0, a].
  [[nodiscard]] double tabulated_cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= a_) return 1.0;
    const double pos = x / a_ * kTable;
    const auto k = std::min(static_cast<std::size_t>(pos), kTable - 1);
    const double w = pos - static_cast<double>(k);
    return cdf_table_[k] + w * (cdf_table_[k + 1] - cdf_table_[k]);
  }

  std::string id_;
  double ell_coefficient_;
  std::vector<ZetaAtom> atoms_;
  double a_ = 0.0;
  bool constant_ = true;
  std::vector<double> quantile_grid_;
  std::vector<double> cdf_table_;
};


/// E[max(U_1..U_j)] for U_i i.i.d. mu: the integral of 1 - F^j over [0, a].
inline double expected_max(const LimitModel& m, unsigned j) {
  if (m.zeta_constant()) return m.a() * j / (j + 1.0);
  constexpr int kSteps = 20000;
  const double h = m.a() / kSteps;
  double s = 0.0;
  for (int k = 0; k < kSteps; ++k) s += 1.0 - std::pow(m.mu_cdf((k + 0.5) * h), j);
  return s * h;
}

/// Merged trees with explicit block weights.
inline LimitModel merged_model(const std::vector<unsigned>& ds, const std::vector<double>& weights,
                               std::string id) {
  if (ds.empty() || ds.size() != weights.size()) {
    throw std::invalid_argument("merged_model: need one weight per degree");
  }
  std::vector<ZetaAtom> atoms;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    atoms.push_back({weights[i], 1.0 / std::log(static_cast<double>(ds[i]))});
  }
  return {std::move(id), 1.0, std::move(atoms)};
}

inline LimitModel limit_model(const FamilySpec& f) {
  switch (f.kind) {
    case FamilyKind::urt: return {f.tag(), 1.0, {{1.0, 1.0}}};
    case FamilyKind::bst: return {f.tag(), 2.0, {{1.0, 1.0}}};
    case FamilyKind::bary: {
      if (f.b < 2) throw std::invalid_argument("limit_model: bary needs b >= 2");
      const double b = f.b;
      return {f.tag(), b / (b - 1.0), {{1.0, 1.0}}};
    }
    case FamilyKind::scale_free: {
      if (!(f.alpha > -1.0)) throw std::invalid_argument("limit_model: need alpha > -1");
      return {f.tag(), (1.0 + f.alpha) / (2.0 + f.alpha), {{1.0, 1.0}}};
    }
    case FamilyKind::merged:
      return merged_model(f.ds, std::vector<double>(f.ds.size(), 1.0), f.tag());
    case FamilyKind::regular:
    case FamilyKind::cayley: break;
  }
  throw std::invalid_argument("limit_model: no limit package for family " + f.tag());
}

}  // namespace cuttree
