#pragma once

// Removal data for the edges of a tree. Edge v is the edge (parent(v), v).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "cuttree/rng.hpp"
#include "cuttree/rooted_tree.hpp"

namespace cuttree {

class CutSchedule {
 public:
  CutSchedule() = default;

  /// Edge count n-1 of the scheduled tree.
  [[nodiscard]] std::size_t edge_count() const noexcept { return order_.size(); }
  [[nodiscard]] std::size_t vertex_count() const noexcept { return order_.size() + 1; }

  /// Removal time of edge v (v in 2..n).
  [[nodiscard]] double time(Vertex v) const noexcept { return times_[v]; }
  /// Position of edge v in the removal order, 1-based.
  [[nodiscard]] std::uint32_t rank(Vertex v) const noexcept { return rank_[v]; }
  /// Edge removed at step r (1-based).
  [[nodiscard]] Vertex edge_at(std::uint32_t r) const noexcept { return order_[r - 1]; }

  [[nodiscard]] std::span<const double> times() const noexcept { return times_; }
  [[nodiscard]] std::span<const std::uint32_t> ranks() const noexcept { return rank_; }
  [[nodiscard]] std::span<const Vertex> order() const noexcept { return order_; }

  /// True for exponential-clock schedules; permutation schedules use time = rank.
  [[nodiscard]] bool has_clock() const noexcept { return clock_; }
  /// Mean of the exponential clocks (ell(n)); 0 for permutation schedules.
  [[nodiscard]] double clock_mean() const noexcept { return mean_; }

  /// Removal in the given order; `order` lists every edge 2..n exactly once.
  static CutSchedule from_order(std::size_t n, std::span<const Vertex> order) {
    if (n < 1 || order.size() != n - 1) {
      throw std::invalid_argument("CutSchedule: order must list all n-1 edges");
    }
    CutSchedule s;
    s.order_.assign(order.begin(), order.end());
    s.rank_.assign(n + 1, 0);
    s.times_.assign(n + 1, 0.0);
    for (std::size_t r = 0; r < order.size(); ++r) {
      const Vertex v = order[r];
      if (v < 2 || v > n || s.rank_[v] != 0) {
        throw std::invalid_argument("CutSchedule: order is not a permutation of the edges 2..n");
      }
      s.rank_[v] = static_cast<std::uint32_t>(r + 1);
      s.times_[v] = static_cast<double>(r + 1);
    }
    return s;
  }

  /// Removal at the given times (indexed by edge, entries 0 and 1 ignored).
  /// Ties are broken by edge id.
  static CutSchedule from_times(std::size_t n, std::span<const double> times, double mean = 0.0) {
    if (n < 1 || times.size() != n + 1) {
      throw std::invalid_argument("CutSchedule: need one time per edge");
    }
    std::vector<Vertex> order(n - 1);
    std::iota(order.begin(), order.end(), Vertex{2});
    for (Vertex v : order) {
      if (!(times[v] >= 0.0) || !std::isfinite(times[v])) {
        throw std::invalid_argument("CutSchedule: times must be finite and nonnegative");
      }
    }
    std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
      return times[a] < times[b] || (times[a] == times[b] && a < b);
    });
    CutSchedule s = from_order(n, order);
    s.times_.assign(times.begin(), times.end());
    s.times_[0] = s.times_[1] = 0.0;
    s.clock_ = true;
    s.mean_ = mean;
    return s;
  }

 private:
  friend CutSchedule sample_schedule(const RootedTree&, double, Stream&);

  std::vector<double> times_;
  std::vector<std::uint32_t> rank_;
  std::vector<Vertex> order_;
  bool clock_ = false;
  double mean_ = 0.0;
};

/// Uniform random removal order.
inline CutSchedule sample_order(const RootedTree& t, Stream& rng) {
  std::vector<Vertex> order(t.edge_count());
  std::iota(order.begin(), order.end(), Vertex{2});
  rng.shuffle(std::span<Vertex>(order));
  return CutSchedule::from_order(t.size(), order);
}

/// I.i.d. exponential clocks with mean `ell` on every edge.
///
/// Drawn in O(n) without sorting: the order is a uniform permutation and the
/// sorted times are the exponential order statistics, generated by their
/// spacing representation E_(k) - E_(k-1) = ell * E_k / (n - k).
inline CutSchedule sample_schedule(const RootedTree& t, double ell, Stream& rng) {
  if (t.size() < 2) throw std::invalid_argument("sample_schedule: tree has no edges");
  if (!(ell > 0.0)) throw std::invalid_argument("sample_schedule: need ell > 0");
  CutSchedule s = sample_order(t, rng);
  const std::size_t m = t.edge_count();
  double clock = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    clock += ell * rng.exponential() / static_cast<double>(m - k);
    s.times_[s.order_[k]] = clock;
  }
  s.clock_ = true;
  s.mean_ = ell;
  return s;
}

}  // namespace cuttree
