#pragma once

// Cut(T_n): the genealogy of the blocks created by removing the edges of T_n
// in schedule order. Node ids: leaves 1..n are the singletons {v}; internal
// nodes n+1..2n-1 are blocks, node n+k being the block split by the cut of
// rank n-k (so the root, the block [n], is node 2n-1 and is split first).

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cuttree/rng.hpp"
#include "cuttree/rooted_tree.hpp"
#include "cuttree/schedule.hpp"

namespace cuttree {

using Node = std::uint32_t;

namespace detail {

/// Union-find with path halving and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : up_(n + 1), size_(n + 1, 1) {
    std::iota(up_.begin(), up_.end(), Vertex{0});
  }

  Vertex find(Vertex x) noexcept {
    while (up_[x] != x) {
      up_[x] = up_[up_[x]];
      x = up_[x];
    }
    return x;
  }

  /// Merges the sets of two roots; returns the surviving root.
  Vertex unite(Vertex a, Vertex b) noexcept {
    if (size_[a] < size_[b]) std::swap(a, b);
    up_[b] = a;
    size_[a] += size_[b];
    return a;
  }

  [[nodiscard]] std::uint32_t size(Vertex root) const noexcept { return size_[root]; }

 private:
  std::vector<Vertex> up_;
  std::vector<std::uint32_t> size_;
};

}  // namespace detail

/// Square symmetric distance matrix; row and column 0 belong to the root.
struct DistanceMatrix {
  std::size_t dim = 0;
  std::vector<double> entries;
  std::vector<Vertex> points;  ///< sampled leaves, points[0] = kNoVertex for the root

  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return entries[i * dim + j]; }
};

class CutTree {
 public:
  CutTree(const RootedTree& t, const CutSchedule& s)
      : n_(t.size()),
        parent_(2 * n_, 0),
        left_(n_, 0),
        right_(n_, 0),
        cut_edge_(n_, kNoVertex),
        depth_(2 * n_, 0),
        min_label_(2 * n_, kNoVertex),
        node_of_edge_(n_ + 1, 0),
        tree_parent_(t.parents().begin(), t.parents().end()),
        tree_depth_(depths(t)),
        edge_rank_(n_ + 1, 0) {
    if (s.vertex_count() != n_) throw std::invalid_argument("CutTree: schedule does not fit tree");
    for (Vertex v = 1; v <= n_; ++v) min_label_[v] = v;

    detail::DisjointSets dsu(n_);
    std::vector<Node> block(n_ + 1);
    std::iota(block.begin(), block.end(), Node{0});
    Node next = static_cast<Node>(n_ + 1);
    for (auto r = static_cast<std::uint32_t>(n_ - 1); r >= 1; --r) {
      const Vertex v = s.edge_at(r);
      const Vertex a = dsu.find(t.parent(v));
      const Vertex b = dsu.find(v);
      const Node id = next++;
      const Node ca = block[a];
      const Node cb = block[b];
      left_[id - n_] = ca;
      right_[id - n_] = cb;
      parent_[ca] = id;
      parent_[cb] = id;
      cut_edge_[id - n_] = v;
      min_label_[id] = std::min(min_label_[ca], min_label_[cb]);
      node_of_edge_[v] = id;
      edge_rank_[v] = r;
      block[dsu.unite(a, b)] = id;
    }
    for (Node id = root(); id > n_; --id) {
      depth_[left_[id - n_]] = depth_[id] + 1;
      depth_[right_[id - n_]] = depth_[id] + 1;
    }
  }

  [[nodiscard]] std::size_t leaf_count() const noexcept { return n_; }
  [[nodiscard]] std::size_t node_count() const noexcept { return 2 * n_ - 1; }
  [[nodiscard]] Node root() const noexcept { return static_cast<Node>(2 * n_ - 1); }
  [[nodiscard]] bool is_leaf(Node x) const noexcept { return x >= 1 && x <= n_; }

  [[nodiscard]] Node parent(Node x) const noexcept { return parent_[x]; }
  [[nodiscard]] Node left(Node x) const noexcept { return left_[x - n_]; }
  [[nodiscard]] Node right(Node x) const noexcept { return right_[x - n_]; }
  [[nodiscard]] std::uint32_t depth(Node x) const noexcept { return depth_[x]; }
  [[nodiscard]] Vertex min_label(Node x) const noexcept { return min_label_[x]; }

  /// Rank of the cut that splits block x (internal nodes only).
  [[nodiscard]] std::uint32_t cut_rank(Node x) const noexcept {
    return static_cast<std::uint32_t>(2 * n_ - x);
  }
  /// Edge whose removal splits block x (internal nodes only).
  [[nodiscard]] Vertex cut_edge(Node x) const noexcept { return cut_edge_[x - n_]; }
  /// Block split by removing edge v.
  [[nodiscard]] Node node_of_edge(Vertex v) const noexcept { return node_of_edge_[v]; }

  /// Number of cuts needed to isolate vertex i.
  [[nodiscard]] std::uint32_t leaf_depth(Vertex i) const {
    check_leaf(i);
    return depth_[i];
  }

  /// Lowest common ancestor of two leaves. The first cut separating i from j
  /// is the earliest-ranked edge on their path in T_n, so only that (short)
  /// path is walked.
  [[nodiscard]] Node lca(Vertex i, Vertex j) const {
    check_leaf(i);
    check_leaf(j);
    if (i == j) return i;
    Vertex best = kNoVertex;
    auto consider = [&](Vertex v) {
      if (best == kNoVertex || edge_rank_[v] < edge_rank_[best]) best = v;
    };
    while (tree_depth_[i] > tree_depth_[j]) consider(i), i = tree_parent_[i];
    while (tree_depth_[j] > tree_depth_[i]) consider(j), j = tree_parent_[j];
    while (i != j) {
      consider(i);
      consider(j);
      i = tree_parent_[i];
      j = tree_parent_[j];
    }
    return node_of_edge_[best];
  }

  /// Lowest common ancestor of any two nodes by walking parent pointers.
  [[nodiscard]] Node lca_walk(Node x, Node y) const {
    while (depth_[x] > depth_[y]) x = parent_[x];
    while (depth_[y] > depth_[x]) y = parent_[y];
    while (x != y) {
      x = parent_[x];
      y = parent_[y];
    }
    return x;
  }

  [[nodiscard]] std::uint32_t pairwise_distance(Vertex i, Vertex j) const {
    return depth_[i] + depth_[j] - 2 * depth_[lca(i, j)];
  }

  /// Edge count of the subtree spanned by the root and the given leaves.
  [[nodiscard]] std::uint64_t reduced_length(std::span<const Vertex> leaves) const {
    return span_leaves(leaves).length;
  }

  /// Cuts needed to isolate the given vertices, discarding components that
  /// hold none of them: Z = reduced_length - (j - 1).
  [[nodiscard]] std::uint64_t isolation_cuts(std::span<const Vertex> leaves) const {
    const auto sp = span_leaves(leaves);
    return sp.length - (sp.distinct - 1);
  }

  /// W_k for k = 2..j (entry k-2): cuts inside components holding at least
  /// two targets until the j targets lie in k distinct components.
  [[nodiscard]] std::vector<std::uint64_t> spread_cuts(std::span<const Vertex> leaves) const {
    const auto sp = span_leaves(leaves);
    std::vector<std::uint64_t> w;
    if (sp.branch.empty()) return w;
    std::vector<std::uint32_t> branch_ranks;
    for (Node b : sp.branch) branch_ranks.push_back(cut_rank(b));
    std::sort(branch_ranks.begin(), branch_ranks.end());
    if (sp.branch.size() == 1) return {depth_[sp.branch.front()] + 1ULL};

    // Blocks holding two or more targets: all ancestors of branching blocks.
    std::vector<std::uint32_t> shared = shared_ranks(sp.branch);
    std::sort(shared.begin(), shared.end());
    for (std::uint32_t r : branch_ranks) {
      const auto count = std::upper_bound(shared.begin(), shared.end(), r) - shared.begin();
      w.push_back(static_cast<std::uint64_t>(count));
    }
    return w;
  }

  /// Distances between the root and k i.i.d. uniform leaves.
  [[nodiscard]] DistanceMatrix sample_distance_matrix(std::size_t k, Stream& rng) const {
    if (k < 1) throw std::invalid_argument("sample_distance_matrix: need k >= 1");
    DistanceMatrix m;
    m.dim = k + 1;
    m.entries.assign(m.dim * m.dim, 0.0);
    m.points.assign(m.dim, kNoVertex);
    for (std::size_t a = 1; a <= k; ++a) m.points[a] = static_cast<Vertex>(1 + rng.below(n_));
    for (std::size_t a = 1; a <= k; ++a) {
      const double d0 = depth_[m.points[a]];
      m.entries[a] = m.entries[a * m.dim] = d0;
      for (std::size_t b = a + 1; b <= k; ++b) {
        const double d = pairwise_distance(m.points[a], m.points[b]);
        m.entries[a * m.dim + b] = m.entries[b * m.dim + a] = d;
      }
    }
    return m;
  }

  /// Newick text of the block tree; children ordered by smaller minimum label.
  [[nodiscard]] std::string newick() const {
    std::string out;
    // Explicit stack: cut trees can be very deep.
    std::vector<std::pair<Node, int>> stack{{root(), 0}};
    while (!stack.empty()) {
      auto& [x, state] = stack.back();
      if (is_leaf(x)) {
        out += std::to_string(x);
        stack.pop_back();
        continue;
      }
      Node a = left(x);
      Node b = right(x);
      if (min_label_[b] < min_label_[a]) std::swap(a, b);
      if (state == 0) {
        out += '(';
        state = 1;
        stack.push_back({a, 0});
      } else if (state == 1) {
        out += ',';
        state = 2;
        stack.push_back({b, 0});
      } else {
        out += ')';
        stack.pop_back();
      }
    }
    return out + ';';
  }

 private:
  struct Span {
    std::uint64_t length = 0;
    std::size_t distinct = 0;
    std::vector<Node> branch;  ///< blocks where two target groups separate
  };

  void check_leaf(Vertex i) const {
    if (i < 1 || i > n_) {
      throw std::out_of_range("CutTree: vertex " + std::to_string(i) + " out of range");
    }
  }

  Span span_leaves(std::span<const Vertex> leaves) const {
    if (leaves.empty()) throw std::invalid_argument("CutTree: empty leaf set");
    std::vector<Vertex> set(leaves.begin(), leaves.end());
    for (Vertex v : set) check_leaf(v);
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    Span sp;
    sp.distinct = set.size();
    sp.length = depth_[set.front()];
    if (set.size() <= 32) {
      for (std::size_t a = 1; a < set.size(); ++a) {
        Node attach = 0;
        for (std::size_t b = 0; b < a; ++b) {
          const Node c = lca(set[a], set[b]);
          if (attach == 0 || depth_[c] > depth_[attach]) attach = c;
        }
        sp.length += depth_[set[a]] - depth_[attach];
        sp.branch.push_back(attach);
      }
      return sp;
    }
    std::vector<bool> marked(2 * n_, false);
    for (Node x = set.front(); x != 0; x = parent_[x]) marked[x] = true;
    for (std::size_t a = 1; a < set.size(); ++a) {
      Node x = set[a];
      while (!marked[x]) {
        marked[x] = true;
        ++sp.length;
        x = parent_[x];
      }
      sp.branch.push_back(x);
    }
    return sp;
  }

  std::vector<std::uint32_t> shared_ranks(std::span<const Node> branch) const {
    std::vector<bool> marked(2 * n_, false);
    std::vector<std::uint32_t> ranks;
    for (Node b : branch) {
      for (Node x = b; x != 0 && !marked[x]; x = parent_[x]) {
        marked[x] = true;
        ranks.push_back(cut_rank(x));
      }
    }
    return ranks;
  }

  std::size_t n_;
  std::vector<Node> parent_;
  std::vector<Node> left_;
  std::vector<Node> right_;
  std::vector<Vertex> cut_edge_;
  std::vector<std::uint32_t> depth_;
  std::vector<Vertex> min_label_;
  std::vector<Node> node_of_edge_;
  std::vector<Vertex> tree_parent_;
  std::vector<std::uint32_t> tree_depth_;
  std::vector<std::uint32_t> edge_rank_;
};

inline CutTree build_cut_tree(const RootedTree& t, const CutSchedule& s) { return {t, s}; }

inline void write_newick(std::ostream& os, const CutTree& ct) { os << ct.newick() << '\n'; }

}  // namespace cuttree
