#pragma once

// Observables of one destruction run: the root component's size X(t) and
// absorbed-cut count R(t), disconnection times Gamma_u, cut counts Y_u at
// disconnection and the residual cuts N^(u) needed afterwards to isolate u.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cuttree/cut_tree.hpp"
#include "cuttree/format.hpp"
#include "cuttree/limit_model.hpp"
#include "cuttree/rooted_tree.hpp"
#include "cuttree/schedule.hpp"

namespace cuttree {

/// One jump of the root component: at `time` it loses a subtree and now has
/// `size` vertices and has absorbed `cuts` cuts.
struct RootJump {
  double time;
  std::uint32_t size;
  std::uint32_t cuts;
};

struct DestructionTrace {
  std::size_t n = 1;
  double clock_mean = 0.0;          ///< 0 when times are ranks
  std::vector<double> gamma;        ///< Gamma_u, +inf for the root
  std::vector<std::uint32_t> Y;     ///< root-component cuts up to Gamma_u
  std::vector<std::uint32_t> Nres;  ///< remaining cuts to isolate u
  std::vector<std::uint32_t> depth; ///< cut-tree leaf depth
  std::vector<RootJump> jumps;      ///< sorted by time

  /// X(t), right-continuous.
  [[nodiscard]] std::uint32_t X(double t) const {
    const auto it = std::upper_bound(jumps.begin(), jumps.end(), t,
                                     [](double x, const RootJump& j) { return x < j.time; });
    return it == jumps.begin() ? static_cast<std::uint32_t>(n) : std::prev(it)->size;
  }

  /// R(t), right-continuous.
  [[nodiscard]] std::uint32_t R(double t) const {
    const auto it = std::upper_bound(jumps.begin(), jumps.end(), t,
                                     [](double x, const RootJump& j) { return x < j.time; });
    return it == jumps.begin() ? 0U : std::prev(it)->cuts;
  }

  /// R(infinity): cuts needed to isolate the root.
  [[nodiscard]] std::uint32_t root_cuts() const {
    return jumps.empty() ? 0U : jumps.back().cuts;
  }
};

/// Runs the destruction in O(n): Gamma_u is the minimum removal time on the
/// root path of u, and edge v is cut inside the root component exactly when
/// it goes before every edge above it.
inline DestructionTrace run_destruction(const RootedTree& t, const CutSchedule& s,
                                        const CutTree& ct) {
  const std::size_t n = t.size();
  if (s.vertex_count() != n || ct.leaf_count() != n) {
    throw std::invalid_argument("run_destruction: schedule does not fit tree");
  }
  DestructionTrace tr;
  tr.n = n;
  tr.clock_mean = s.clock_mean();
  tr.gamma.assign(n + 1, std::numeric_limits<double>::infinity());
  tr.Y.assign(n + 1, 0);
  tr.Nres.assign(n + 1, 0);
  tr.depth.assign(n + 1, 0);

  // first[u]: earliest edge on the root path of u (by rank, so ties follow
  // the schedule's own tie break).
  std::vector<Vertex> first(n + 1, kNoVertex);
  std::vector<std::uint32_t> detached(n + 1, 0);
  std::vector<std::uint8_t> root_jump(n + 1, 0);  // indexed by rank
  for (Vertex v = 2; v <= n; ++v) {
    const Vertex p = t.parent(v);
    const Vertex fp = first[p];
    if (fp == kNoVertex || s.rank(v) < s.rank(fp)) {
      first[v] = v;
      root_jump[s.rank(v)] = 1;
    } else {
      first[v] = fp;
    }
    ++detached[first[v]];
    tr.gamma[v] = s.time(first[v]);
  }

  std::vector<std::uint32_t> jump_index(n + 1, 0);  // by rank
  std::uint32_t cuts = 0;
  auto size = static_cast<std::uint32_t>(n);
  for (std::uint32_t r = 1; r < n; ++r) {
    if (!root_jump[r]) continue;
    const Vertex e = s.edge_at(r);
    jump_index[r] = ++cuts;
    size -= detached[e];
    tr.jumps.push_back({s.time(e), size, cuts});
  }

  for (Vertex u = 1; u <= n; ++u) {
    tr.depth[u] = ct.leaf_depth(u);
    tr.Y[u] = u == 1 ? tr.depth[u] : jump_index[s.rank(first[u])];
    tr.Nres[u] = tr.depth[u] - tr.Y[u];
  }
  return tr;
}

inline DestructionTrace run_destruction(const RootedTree& t, const CutSchedule& s) {
  return run_destruction(t, s, CutTree(t, s));
}

/// Cut counts for a set of targets, obtained by merging the components back
/// in reverse order while tracking how many targets each holds.
struct IsolationCounts {
  std::uint64_t Z = 0;             ///< cuts in components holding a target
  std::vector<std::uint64_t> W;    ///< W[k-2] for k = 2..j
};

inline IsolationCounts multi_isolation(const RootedTree& t, const CutSchedule& s,
                                       std::span<const Vertex> targets) {
  const std::size_t n = t.size();
  if (targets.empty()) throw std::invalid_argument("multi_isolation: empty target list");
  if (s.vertex_count() != n) throw std::invalid_argument("multi_isolation: schedule does not fit tree");
  std::vector<std::uint32_t> held(n + 1, 0);
  std::size_t j = 0;
  for (Vertex u : targets) {
    if (u < 1 || u > n) throw std::out_of_range("multi_isolation: target out of range");
    if (held[u] == 0) ++j;
    held[u] = 1;
  }

  detail::DisjointSets dsu(n);
  std::vector<std::uint8_t> shared(n, 0);    // by rank: block held >= 2 targets
  std::vector<std::uint8_t> splitting(n, 0); // by rank: both sides held targets
  IsolationCounts out;
  for (auto r = static_cast<std::uint32_t>(n - 1); r >= 1; --r) {
    const Vertex v = s.edge_at(r);
    const Vertex a = dsu.find(t.parent(v));
    const Vertex b = dsu.find(v);
    const std::uint32_t ha = held[a];
    const std::uint32_t hb = held[b];
    if (ha + hb >= 1) ++out.Z;
    if (ha + hb >= 2) shared[r] = 1;
    if (ha >= 1 && hb >= 1) splitting[r] = 1;
    held[dsu.unite(a, b)] = ha + hb;
  }
  std::uint64_t count = 0;
  for (std::uint32_t r = 1; r < n && out.W.size() + 1 < j; ++r) {
    count += shared[r];
    if (splitting[r]) out.W.push_back(count);
  }
  return out;
}

namespace detail {

inline void require_clock(const DestructionTrace& tr) {
  if (!(tr.clock_mean > 0)) {
    throw std::invalid_argument("deviation: the run needs an exponential-clock schedule");
  }
}

}  // namespace detail

/// sup over t of |X(t)/n - lambda(t)|. Between jumps X is constant and lambda
/// monotone, so the supremum is attained at jump times (either one-sided
/// limit); a uniform grid of `grid` points on [0, t_max] is added, t_max
/// covering the last jump and lambda down to 1e-3.
inline double root_cluster_deviation(const DestructionTrace& tr, const LimitModel& m,
                                     std::size_t grid = 1000) {
  detail::require_clock(tr);
  const double n = static_cast<double>(tr.n);
  double sup = 0.0;
  double prev = 1.0;
  for (const auto& j : tr.jumps) {
    const double lam = m.lambda(j.time);
    sup = std::max({sup, std::abs(prev - lam), std::abs(j.size / n - lam)});
    prev = j.size / n;
  }
  double t_max = m.lambda_inv(1e-3);
  if (!tr.jumps.empty()) t_max = std::max(t_max, tr.jumps.back().time);
  for (std::size_t g = 0; g <= grid; ++g) {
    const double t = t_max * static_cast<double>(g) / static_cast<double>(grid);
    sup = std::max(sup, std::abs(tr.X(t) / n - m.lambda(t)));
  }
  return sup;
}

/// sup over t <= T of |(ell/n) R(t) - Lambda(t)|, T = Lambda^{-1}(0.99 a).
inline double root_cuts_deviation(const DestructionTrace& tr, const LimitModel& m, double ell,
                                  std::size_t grid = 1000) {
  detail::require_clock(tr);
  const double f = ell / static_cast<double>(tr.n);
  const double T = m.Lambda_inv(0.99 * m.a());
  double sup = 0.0;
  double prev = 0.0;
  for (const auto& j : tr.jumps) {
    if (j.time > T) break;
    const double big = m.Lambda(j.time);
    sup = std::max({sup, std::abs(prev - big), std::abs(f * j.cuts - big)});
    prev = f * j.cuts;
  }
  sup = std::max(sup, std::abs(prev - m.Lambda(T)));
  for (std::size_t g = 0; g <= grid; ++g) {
    const double t = T * static_cast<double>(g) / static_cast<double>(grid);
    sup = std::max(sup, std::abs(f * tr.R(t) - m.Lambda(t)));
  }
  return sup;
}

inline void write_vertex_csv(std::ostream& os, const DestructionTrace& tr) {
  os << "vertex,Gamma,Y,Nres,depth\n";
  for (std::size_t u = 1; u <= tr.n; ++u) {
    os << u << ',' << format_double(tr.gamma[u]) << ',' << tr.Y[u] << ',' << tr.Nres[u] << ','
       << tr.depth[u] << '\n';
  }
}

inline void write_jump_csv(std::ostream& os, const DestructionTrace& tr) {
  os << "time,X,R\n";
  os << "0," << tr.n << ",0\n";
  for (const auto& j : tr.jumps) os << format_double(j.time) << ',' << j.size << ',' << j.cuts << '\n';
}

}  // namespace cuttree
