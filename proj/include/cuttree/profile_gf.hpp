#pragma once

// Expected distance profiles of the scale-free tree with alpha = 0.
//
// Index convention: T_n has n edges and vertices 1..n+1 (T_1 is the edge
// {1,2}); vertex i appears at step i-1. Z^i(n,k) counts vertices at distance
// k from i in T_n and G_n^i(z) = sum_k Z^i(n,k+1) z^k.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "cuttree/format.hpp"
#include "cuttree/generators.hpp"
#include "cuttree/rng.hpp"
#include "cuttree/rooted_tree.hpp"

namespace cuttree {

namespace detail {

/// Double-double style accumulator for long products and sums: hi + lo.
struct Compensated {
  double hi = 0.0;
  double lo = 0.0;

  static Compensated of(double x) { return {x, 0.0}; }

  void mul(double x) {
    const double p = hi * x;
    const double e = std::fma(hi, x, -p);
    lo = lo * x + e;
    hi = p;
  }
  void add(double x) {
    const double s = hi + x;
    const double bb = s - hi;
    const double e = (hi - (s - bb)) + (x - bb);
    hi = s;
    lo += e;
  }
  [[nodiscard]] double value() const { return hi + lo; }
};

inline void check_index(std::size_t i, std::size_t n, const char* who) {
  if (n < 1 || i < 1 || i > n + 1) {
    throw std::out_of_range(std::string(who) + ": need n >= 1 and 1 <= i <= n+1");
  }
}

}  // namespace detail

/// E[Z^i(n,1)], the expected degree of vertex i in T_n:
/// prod_{j=max(1,i-1)}^{n-1} (2j+1)/(2j).
inline double expected_degree(std::size_t i, std::size_t n) {
  detail::check_index(i, n, "expected_degree");
  auto p = detail::Compensated::of(1.0);
  for (std::size_t j = std::max<std::size_t>(1, i - 1); j + 1 <= n; ++j) {
    p.mul((2.0 * j + 1.0) / (2.0 * j));
  }
  return p.value();
}

/// Tables of E[G_n^i(z)], E[G_n^i(z) Z^i(n,1)] and E[Z^i(n,1)] for
/// 1 <= n <= n_max, 1 <= i <= n+1, filled in increasing n in O(n_max^2).
class GFTable {
 public:
  GFTable(double z, std::size_t n_max) : z_(z), n_max_(n_max) {
    if (!(z >= 0.0 && z < 1.0)) throw std::invalid_argument("GFTable: need z in [0,1)");
    if (n_max < 1) throw std::invalid_argument("GFTable: need n_max >= 1");
    const std::size_t cells = offset(n_max + 1);
    g_.resize(cells);
    gz_.resize(cells);
    deg_.resize(cells);

    std::vector<detail::Compensated> g(n_max + 2), gz(n_max + 2), deg(n_max + 2);
    // T_1: both vertices have one neighbour.
    for (std::size_t i = 1; i <= 2; ++i) {
      g[i] = gz[i] = deg[i] = detail::Compensated::of(1.0);
    }
    store(1, g, gz, deg);
    for (std::size_t n = 1; n < n_max; ++n) {
      const double dn = 2.0 * static_cast<double>(n);
      const double fg = (dn + 1.0 + z) / dn;
      const double fgz = (dn + 2.0 + z) / dn;
      const double fdeg = (dn + 1.0) / dn;
      // Vertex n+2 arrives at step n+1: G = 1 + z * E[G_n^{v}] averaged
      // over the degree-biased parent v.
      auto fresh = detail::Compensated::of(0.0);
      for (std::size_t j = 1; j <= n + 1; ++j) fresh.add(gz[j].value());
      const double seed = 1.0 + z / dn * fresh.value();
      for (std::size_t i = 1; i <= n + 1; ++i) {
        const double d = deg[i].value();
        g[i].mul(fg);
        gz[i].mul(fgz);
        gz[i].add(d / dn);
        deg[i].mul(fdeg);
      }
      g[n + 2] = gz[n + 2] = detail::Compensated::of(seed);
      deg[n + 2] = detail::Compensated::of(1.0);
      store(n + 1, g, gz, deg);
    }
  }

  [[nodiscard]] double z() const noexcept { return z_; }
  [[nodiscard]] std::size_t n_max() const noexcept { return n_max_; }

  /// E[G_n^i(z)]; zero before vertex i exists (n <= i-2).
  [[nodiscard]] double G(std::size_t i, std::size_t n) const {
    if (i >= 2 && n + 2 <= i) return 0.0;
    check(i, n);
    return g_[offset(n) + i - 1];
  }
  /// E[G_n^i(z) Z^i(n,1)].
  [[nodiscard]] double GZ(std::size_t i, std::size_t n) const {
    if (i >= 2 && n + 2 <= i) return 0.0;
    check(i, n);
    return gz_[offset(n) + i - 1];
  }
  /// E[Z^i(n,1)].
  [[nodiscard]] double Z(std::size_t i, std::size_t n) const {
    if (i >= 2 && n + 2 <= i) return 0.0;
    check(i, n);
    return deg_[offset(n) + i - 1];
  }

  /// E[G_{i-1}^i(z)] recomputed from the closed form of the joint moments:
  /// 1 + z/(2(i-2)) * sum_{j=1}^{i-1} E[G_{i-2}^j Z^j(i-2,1)], i >= 3.
  [[nodiscard]] double seed_from_joint_moments(std::size_t i) const {
    if (i < 3 || i > n_max_ + 1) throw std::out_of_range("seed_from_joint_moments: need 3 <= i <= n_max+1");
    auto s = detail::Compensated::of(0.0);
    for (std::size_t j = 1; j <= i - 1; ++j) s.add(joint_moment_closed_form(j, i - 2));
    return 1.0 + z_ / (2.0 * static_cast<double>(i - 2)) * s.value();
  }

  /// E[G_n^i Z^i(n,1)] by the explicit sum
  ///   P(s, n) E[G_s^i] + sum_{k=s}^{n-1} P(k+1, n) E[Z^i(k,1)] / (2k),
  /// with s = max(1, i-1) and P(a, n) = prod_{j=a}^{n-1} (2j+2+z)/(2j).
  [[nodiscard]] double joint_moment_closed_form(std::size_t i, std::size_t n) const {
    check(i, n);
    const std::size_t s = std::max<std::size_t>(1, i - 1);
    auto total = detail::Compensated::of(0.0);
    auto tail = detail::Compensated::of(1.0);  // P(k+1, n), built from k = n-1 down
    for (std::size_t k = n - 1; k >= s && k >= 1; --k) {
      total.add(tail.value() * Z(i, k) / (2.0 * static_cast<double>(k)));
      tail.mul((2.0 * k + 2.0 + z_) / (2.0 * k));
    }
    total.add(tail.value() * G(i, s));
    return total.value();
  }

  void write_csv(std::ostream& os) const {
    os << "i,n,z,E_G,E_GZ,E_Z\n";
    for (std::size_t n = 1; n <= n_max_; ++n) {
      for (std::size_t i = 1; i <= n + 1; ++i) {
        os << i << ',' << n << ',' << format_double(z_) << ',' << format_double(G(i, n)) << ','
           << format_double(GZ(i, n)) << ',' << format_double(Z(i, n)) << '\n';
      }
    }
  }

 private:
  // Row n holds i = 1..n+1 and starts after rows 1..n-1.
  static std::size_t offset(std::size_t n) { return (n - 1) * (n + 2) / 2; }

  void check(std::size_t i, std::size_t n) const {
    if (n < 1 || n > n_max_ || i < 1 || i > n + 1) {
      throw std::out_of_range("GFTable: (i=" + std::to_string(i) + ", n=" + std::to_string(n) +
                              ") outside the table");
    }
  }

  void store(std::size_t n, const std::vector<detail::Compensated>& g,
             const std::vector<detail::Compensated>& gz,
             const std::vector<detail::Compensated>& deg) {
    const std::size_t base = offset(n);
    for (std::size_t i = 1; i <= n + 1; ++i) {
      g_[base + i - 1] = g[i].value();
      gz_[base + i - 1] = gz[i].value();
      deg_[base + i - 1] = deg[i].value();
    }
  }

  double z_;
  std::size_t n_max_;
  std::vector<double> g_, gz_, deg_;
};

/// E[G_n^i(z)] for z in (0,1).
inline double expected_gf(std::size_t i, std::size_t n, double z) {
  if (!(z > 0.0 && z < 1.0)) throw std::invalid_argument("expected_gf: need z in (0,1)");
  detail::check_index(i, n, "expected_gf");
  return GFTable(z, n).G(i, n);
}

// The functions A_n^1, A_n^2, A_n^3 of the z0 condition, n >= 4.
inline double profile_A1(std::size_t n, double z) {
  const double m = static_cast<double>(n) - 3.0;
  return (std::exp((2.0 + z) / 2.0) + std::exp((1.0 + z) / 2.0) / 2.0 * (3.0 + z) / (1.0 + z)) *
         std::pow(m, -0.5);
}
inline double profile_A2(std::size_t n, double z) {
  const double m = static_cast<double>(n) - 3.0;
  return (std::exp((2.0 + z) / 2.0) + 0.5 * std::pow(m, -(3.0 + z) / 2.0)) / m;
}
inline double profile_A3(std::size_t n, double z) {
  const double m = static_cast<double>(n) - 3.0;
  return 2.0 * std::exp((2.0 + z) / 2.0) + std::exp(0.5) * std::pow(m, -(4.0 + z) / 2.0) +
         std::exp((3.0 + z) / 2.0) * (3.0 + z) / (1.0 + z);
}

/// Left side of the z0 condition: 3^{-(1+z)/2} + (z/2)(A_4^1 + A_4^2 + A_4^3 + 1/2).
inline double z0_condition(double z) {
  return std::pow(3.0, -(1.0 + z) / 2.0) +
         z / 2.0 * (profile_A1(4, z) + profile_A2(4, z) + profile_A3(4, z) + 0.5);
}

/// Largest z in (0,1) with z0_condition(z) <= 1, by bisection to 1e-9.
inline double find_z0() {
  double lo = 0.0;  // feasible: the condition is 3^{-1/2} at 0
  double hi = 1.0;
  if (z0_condition(hi) <= 1.0) return hi;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (z0_condition(mid) <= 1.0 ? lo : hi) = mid;
  }
  return lo;
}

struct BoundReport {
  std::string bound;
  double z0 = 0.0;
  std::size_t n_max = 0;
  std::size_t checked = 0;
  double worst_ratio = 0.0;  ///< max of lhs / rhs
  std::size_t worst_i = 0;
  std::size_t worst_n = 0;
  bool pass = true;
};

/// E[G_{i-1}^i(z0)] <= (i-1)^{(1+z0)/2} for 2 <= i <= n_max+1, and
/// E[G_n^i(z0)] <= e^{(1+z0)/2} n^{(1+z0)/2} for all 1 <= i <= n+1 <= n_max+1.
inline std::vector<BoundReport> verify_bounds(double z0, std::size_t n_max) {
  const GFTable t(z0, n_max);
  const double e = (1.0 + z0) / 2.0;
  BoundReport seed{"seed", z0, n_max};
  for (std::size_t i = 2; i <= n_max + 1; ++i) {
    const double ratio = t.G(i, i - 1) / std::pow(static_cast<double>(i - 1), e);
    ++seed.checked;
    if (ratio > seed.worst_ratio) seed = {seed.bound, z0, n_max, seed.checked, ratio, i, i - 1};
  }
  seed.pass = seed.worst_ratio <= 1.0;
  BoundReport all{"profile", z0, n_max};
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double rhs = std::exp(e) * std::pow(static_cast<double>(n), e);
    for (std::size_t i = 1; i <= n + 1; ++i) {
      const double ratio = t.G(i, n) / rhs;
      ++all.checked;
      if (ratio > all.worst_ratio) all = {all.bound, z0, n_max, all.checked, ratio, i, n};
    }
  }
  all.pass = all.worst_ratio <= 1.0;
  return {seed, all};
}

/// G_n^i(z) of one tree: sum over u != i of z^{d(i,u) - 1}.
inline double profile_gf(const RootedTree& t, const ChildIndex& children, Vertex i, double z) {
  std::vector<std::uint32_t> dist(t.size() + 1, UINT32_MAX);
  std::vector<Vertex> queue{i};
  dist[i] = 0;
  double g = 0.0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex v = queue[head];
    if (v != i) g += std::pow(z, static_cast<double>(dist[v] - 1));
    auto visit = [&](Vertex w) {
      if (dist[w] == UINT32_MAX) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    };
    if (v != 1) visit(t.parent(v));
    for (Vertex w : children.of(v)) visit(w);
  }
  return g;
}

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t replicas = 0;
};

struct ProfileQuery {
  std::size_t i = 1;
  double z = 0.5;
};

/// Monte Carlo estimates of E[G_n^i(z)] for several (i, z) over the same
/// scale-free trees (alpha = 0) with n edges; replica r uses rng.split(r).
inline std::vector<MeanEstimate> mc_profile_many(std::size_t n,
                                                 const std::vector<ProfileQuery>& queries,
                                                 std::size_t replicas, const Stream& rng) {
  if (replicas < 2) throw std::invalid_argument("mc_profile: need at least 2 replicas");
  for (const auto& q : queries) {
    detail::check_index(q.i, n, "mc_profile");
    if (!(q.z > 0.0 && q.z < 1.0)) throw std::invalid_argument("mc_profile: need z in (0,1)");
  }
  std::vector<double> sum(queries.size(), 0.0);
  std::vector<double> sumsq(queries.size(), 0.0);
  for (std::size_t r = 0; r < replicas; ++r) {
    Stream s = rng.split(r);
    const RootedTree t = gen_scale_free(n + 1, 0.0, s);
    const ChildIndex children(t);
    for (std::size_t q = 0; q < queries.size(); ++q) {
      const double g = profile_gf(t, children, static_cast<Vertex>(queries[q].i), queries[q].z);
      sum[q] += g;
      sumsq[q] += g * g;
    }
  }
  const double k = static_cast<double>(replicas);
  std::vector<MeanEstimate> out;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const double mean = sum[q] / k;
    const double var = std::max(0.0, (sumsq[q] - k * mean * mean) / (k - 1.0));
    out.push_back({mean, std::sqrt(var / k), replicas});
  }
  return out;
}

inline MeanEstimate mc_profile(std::size_t i, std::size_t n, double z, std::size_t replicas,
                               const Stream& rng) {
  return mc_profile_many(n, {{i, z}}, replicas, rng).front();
}

}  // namespace cuttree
