#pragma once

// Random (and deterministic) tree families, all returned in canonical
// labeling: root 1, parent(v) < v, labels in creation (or BFS) order.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cuttree/rng.hpp"
#include "cuttree/rooted_tree.hpp"

namespace cuttree {

namespace detail {

inline void require_size(std::size_t n, std::size_t min_n, const char* who) {
  if (n < min_n) {
    throw std::invalid_argument(std::string(who) + ": need n >= " + std::to_string(min_n));
  }
  if (n >= std::numeric_limits<Vertex>::max() / 2) {
    throw std::invalid_argument(std::string(who) + ": n too large");
  }
}

}  // namespace detail

/// Uniform random recursive tree: vertex k+1 picks a uniform parent in 1..k.
inline RootedTree gen_urt(std::size_t n, Stream& rng) {
  detail::require_size(n, 1, "gen_urt");
  std::vector<Vertex> parent(n + 1, kNoVertex);
  for (std::size_t k = 1; k < n; ++k) parent[k + 1] = static_cast<Vertex>(1 + rng.below(k));
  return {std::move(parent), "urt"};
}

/// Binary search tree of the keys inserted in the given order, relabeled so
/// that the i-th inserted key becomes vertex i. `insertion` must be a
/// permutation of {1..n}.
///
/// The BST of an insertion sequence is the Cartesian tree of the keys with
/// insertion time as heap priority, built here in one left-to-right sweep.
inline RootedTree bst_from_insertion_order(std::span<const Vertex> insertion) {
  const std::size_t n = insertion.size();
  detail::require_size(n, 1, "bst_from_insertion_order");
  std::vector<Vertex> pos(n + 1, kNoVertex);
  for (std::size_t i = 0; i < n; ++i) {
    const Vertex key = insertion[i];
    if (key < 1 || key > n || pos[key] != kNoVertex) {
      throw std::invalid_argument("bst_from_insertion_order: not a permutation of 1..n");
    }
    pos[key] = static_cast<Vertex>(i + 1);
  }
  std::vector<Vertex> parent_key(n + 1, kNoVertex);
  std::vector<Vertex> stack;
  stack.reserve(64);
  for (Vertex key = 1; key <= n; ++key) {
    Vertex last = kNoVertex;
    while (!stack.empty() && pos[stack.back()] > pos[key]) {
      last = stack.back();
      stack.pop_back();
    }
    if (last != kNoVertex) parent_key[last] = key;
    if (!stack.empty()) parent_key[key] = stack.back();
    stack.push_back(key);
  }
  std::vector<Vertex> parent(n + 1, kNoVertex);
  for (Vertex key = 1; key <= n; ++key) {
    if (parent_key[key] != kNoVertex) parent[pos[key]] = pos[parent_key[key]];
  }
  return {std::move(parent), "bst"};
}

/// Binary search tree built from a uniform random permutation of {1..n}.
inline RootedTree gen_bst(std::size_t n, Stream& rng) {
  detail::require_size(n, 1, "gen_bst");
  std::vector<Vertex> keys(n);
  std::iota(keys.begin(), keys.end(), Vertex{1});
  rng.shuffle(std::span<Vertex>(keys));
  return bst_from_insertion_order(keys);
}

/// b-ary recursive tree, external-slot model: every vertex owns b child slots
/// and each newcomer fills a uniformly chosen free slot.
inline RootedTree gen_bary(std::size_t n, unsigned b, Stream& rng) {
  detail::require_size(n, 1, "gen_bary");
  if (b < 2) throw std::invalid_argument("gen_bary: need b >= 2");
  std::vector<Vertex> parent(n + 1, kNoVertex);
  std::vector<Vertex> slots(b, Vertex{1});
  slots.reserve(n * (b - 1) + 1);
  for (std::size_t k = 2; k <= n; ++k) {
    const auto idx = rng.below(slots.size());
    parent[k] = slots[idx];
    slots[idx] = slots.back();
    slots.pop_back();
    slots.insert(slots.end(), b, static_cast<Vertex>(k));
  }
  return {std::move(parent), "bary" + std::to_string(b)};
}

/// Scale-free (preferential attachment) tree on n vertices: starting from the
/// edge {1,2}, each newcomer attaches to i with probability proportional to
/// deg(i) + alpha.
///
/// Sampling splits deg(i) + alpha = (deg(i) - 1) + (1 + alpha), both terms
/// nonnegative for alpha > -1: the first is drawn from a list holding every
/// vertex deg(i) - 1 times, the second is uniform.
inline RootedTree gen_scale_free(std::size_t n, double alpha, Stream& rng) {
  detail::require_size(n, 2, "gen_scale_free");
  if (!(alpha > -1.0)) throw std::invalid_argument("gen_scale_free: need alpha > -1");
  std::vector<Vertex> parent(n + 1, kNoVertex);
  parent[2] = 1;
  std::vector<Vertex> extra;  // vertex i appears deg(i) - 1 times
  extra.reserve(n);
  for (std::size_t k = 3; k <= n; ++k) {
    const std::size_t existing = k - 1;
    const auto extra_weight = static_cast<double>(extra.size());
    const double total = extra_weight + static_cast<double>(existing) * (1.0 + alpha);
    Vertex target;
    if (rng.uniform() * total < extra_weight) {
      target = extra[rng.below(extra.size())];
    } else {
      target = static_cast<Vertex>(1 + rng.below(existing));
    }
    parent[k] = target;
    extra.push_back(target);
  }
  return {std::move(parent), "scale_free"};
}

/// Attachment law of the next scale-free step given the current tree:
/// entry i (1-based) is (deg(i) + alpha) / (2(n-1) + alpha n).
inline std::vector<double> scale_free_attachment_law(const RootedTree& t, double alpha) {
  const std::size_t n = t.size();
  std::vector<double> p(n + 1, 0.0);
  for (Vertex v = 2; v <= n; ++v) {
    p[v] += 1.0;
    p[t.parent(v)] += 1.0;
  }
  const double total = 2.0 * static_cast<double>(n - 1) + alpha * static_cast<double>(n);
  for (Vertex v = 1; v <= n; ++v) p[v] = (p[v] + alpha) / total;
  return p;
}

/// Number of vertices of the complete d-ary tree of height h.
inline std::size_t regular_size(unsigned d, unsigned h) {
  std::size_t size = 1;
  std::size_t level = 1;
  for (unsigned j = 1; j <= h; ++j) {
    level *= d;
    size += level;
    if (size >= std::numeric_limits<Vertex>::max() / 2) {
      throw std::invalid_argument("regular_size: tree too large");
    }
  }
  return size;
}

/// Complete d-ary tree of height h in breadth-first labeling: d^j vertices at
/// depth j for j = 0..h.
inline RootedTree gen_regular(unsigned d, unsigned h) {
  if (d < 2 || h < 1) throw std::invalid_argument("gen_regular: need d >= 2, h >= 1");
  const std::size_t n = regular_size(d, h);
  std::vector<Vertex> parent(n + 1, kNoVertex);
  for (std::size_t v = 2; v <= n; ++v) parent[v] = static_cast<Vertex>((v - 2) / d + 1);
  return {std::move(parent), "regular"};
}

/// Shape of a merge of complete d_i-ary trees at a common root.
struct MergedLayout {
  std::vector<unsigned> ds;
  std::vector<unsigned> heights;
  std::vector<std::size_t> sizes;  ///< each including its own root
  std::vector<Vertex> first;       ///< first merged label of block i
  std::size_t n = 1;

  /// Block index of a non-root vertex.
  [[nodiscard]] std::size_t block_of(Vertex v) const {
    std::size_t i = 0;
    while (i + 1 < first.size() && v >= first[i + 1]) ++i;
    return i;
  }

  /// Fraction of all n vertices lying in block i (root excluded from blocks).
  [[nodiscard]] double block_fraction(std::size_t i) const {
    return static_cast<double>(sizes[i] - 1) / static_cast<double>(n);
  }
};

/// Heights h_i = max(1, round(m / ln d_i)).
inline MergedLayout merged_layout(std::span<const unsigned> ds, double m) {
  if (ds.empty()) throw std::invalid_argument("gen_merged: empty degree list");
  if (!(m > 0.0)) throw std::invalid_argument("gen_merged: need m > 0");
  MergedLayout layout;
  layout.ds.assign(ds.begin(), ds.end());
  Vertex next = 2;
  for (unsigned d : ds) {
    if (d < 2) throw std::invalid_argument("gen_merged: every degree must be >= 2");
    const auto h = static_cast<unsigned>(std::max(1L, std::lround(m / std::log(double(d)))));
    layout.heights.push_back(h);
    layout.sizes.push_back(regular_size(d, h));
    layout.first.push_back(next);
    next = static_cast<Vertex>(next + layout.sizes.back() - 1);
    layout.n += layout.sizes.back() - 1;
  }
  return layout;
}

/// The r complete trees glued at vertex 1; block i keeps its breadth-first
/// order and occupies a contiguous label range.
inline RootedTree gen_merged(const MergedLayout& layout) {
  std::vector<Vertex> parent(layout.n + 1, kNoVertex);
  for (std::size_t i = 0; i < layout.ds.size(); ++i) {
    const unsigned d = layout.ds[i];
    const Vertex base = layout.first[i];
    for (std::size_t w = 2; w <= layout.sizes[i]; ++w) {
      const std::size_t p = (w - 2) / d + 1;
      parent[base + w - 2] = p == 1 ? Vertex{1} : static_cast<Vertex>(base + p - 2);
    }
  }
  return {std::move(parent), "merged"};
}

inline RootedTree gen_merged(std::span<const unsigned> ds, double m) {
  return gen_merged(merged_layout(ds, m));
}

/// Uniform labeled tree on n vertices (uniform Pruefer code), rooted at 1 and
/// relabeled breadth-first.
inline RootedTree gen_cayley(std::size_t n, Stream& rng) {
  detail::require_size(n, 1, "gen_cayley");
  if (n <= 2) {
    std::vector<Vertex> parent(n + 1, kNoVertex);
    if (n == 2) parent[2] = 1;
    return {std::move(parent), "cayley"};
  }
  std::vector<Vertex> code(n - 2);
  for (auto& c : code) c = static_cast<Vertex>(1 + rng.below(n));
  std::vector<std::uint32_t> degree(n + 1, 1);
  for (Vertex c : code) ++degree[c];

  // Linear-time decoding.
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(n - 1);
  Vertex ptr = 1;
  while (degree[ptr] != 1) ++ptr;
  Vertex leaf = ptr;
  for (Vertex c : code) {
    edges.emplace_back(leaf, c);
    if (--degree[c] == 1 && c < ptr) {
      leaf = c;
    } else {
      ++ptr;
      while (degree[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  edges.emplace_back(leaf, static_cast<Vertex>(n));
  return canonicalize(n, edges, "cayley").tree;
}

}  // namespace cuttree
