#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cuttree {

/// Vertices are 1-based; 0 is the "no vertex" sentinel.
using Vertex = std::uint32_t;
inline constexpr Vertex kNoVertex = 0;

/// A tree on {1..n} rooted at 1 in canonical labeling: parent(v) < v for
/// every v >= 2. The edge (parent(v), v) is identified by its child v.
class RootedTree {
 public:
  RootedTree() : parent_(2, kNoVertex) {}

  /// `parent` is indexed 0..n; entries 0 and 1 are ignored.
  RootedTree(std::vector<Vertex> parent, std::string family)
      : parent_(std::move(parent)), family_(std::move(family)) {
    if (parent_.size() < 2) {
      throw std::invalid_argument("RootedTree: need at least one vertex");
    }
    parent_[0] = kNoVertex;
    parent_[1] = kNoVertex;
    for (std::size_t v = 2; v < parent_.size(); ++v) {
      if (parent_[v] < 1 || parent_[v] >= v) {
        throw std::invalid_argument("RootedTree: vertex " + std::to_string(v) +
                                    " has parent " + std::to_string(parent_[v]) +
                                    "; canonical labeling needs 1 <= parent(v) < v");
      }
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return parent_.size() - 1; }
  [[nodiscard]] std::size_t edge_count() const noexcept { return size() - 1; }
  [[nodiscard]] Vertex parent(Vertex v) const noexcept { return parent_[v]; }
  [[nodiscard]] std::span<const Vertex> parents() const noexcept { return parent_; }
  [[nodiscard]] const std::string& family() const noexcept { return family_; }

  [[nodiscard]] bool contains(Vertex v) const noexcept { return v >= 1 && v <= size(); }

  friend bool operator==(const RootedTree& a, const RootedTree& b) {
    return a.parent_ == b.parent_;
  }

 private:
  std::vector<Vertex> parent_;
  std::string family_;
};

/// Graph distance from the root for every vertex (index 0 unused).
inline std::vector<std::uint32_t> depths(const RootedTree& t) {
  std::vector<std::uint32_t> d(t.size() + 1, 0);
  for (Vertex v = 2; v <= t.size(); ++v) d[v] = d[t.parent(v)] + 1;
  return d;
}

/// Last common ancestor by walking parent pointers; O(depth).
inline Vertex common_ancestor(const RootedTree& t, std::span<const std::uint32_t> depth,
                              Vertex u, Vertex v) {
  while (depth[u] > depth[v]) u = t.parent(u);
  while (depth[v] > depth[u]) v = t.parent(v);
  while (u != v) {
    u = t.parent(u);
    v = t.parent(v);
  }
  return u;
}

inline std::uint32_t distance(const RootedTree& t, std::span<const std::uint32_t> depth,
                              Vertex u, Vertex v) {
  const Vertex a = common_ancestor(t, depth, u, v);
  return depth[u] + depth[v] - 2 * depth[a];
}

/// Children lists in compressed form: children of v are
/// `child[offset[v] .. offset[v+1])`, in increasing label order.
struct ChildIndex {
  std::vector<std::uint32_t> offset;
  std::vector<Vertex> child;

  explicit ChildIndex(const RootedTree& t) : offset(t.size() + 2, 0), child(t.edge_count()) {
    for (Vertex v = 2; v <= t.size(); ++v) ++offset[t.parent(v) + 1];
    std::partial_sum(offset.begin(), offset.end(), offset.begin());
    std::vector<std::uint32_t> fill(offset.begin(), offset.end() - 1);
    for (Vertex v = 2; v <= t.size(); ++v) child[fill[t.parent(v)]++] = v;
  }

  [[nodiscard]] std::span<const Vertex> of(Vertex v) const {
    return {child.data() + offset[v], child.data() + offset[v + 1]};
  }
};

/// Result of relabeling an arbitrary tree into canonical (BFS) order.
struct Canonicalized {
  RootedTree tree;
  std::vector<Vertex> new_label;  ///< old label -> canonical label
  std::vector<Vertex> old_label;  ///< canonical label -> old label
};

/// Roots an undirected edge list on {1..n} at `root` and relabels vertices in
/// breadth-first order (children visited in increasing old label), so the
/// root becomes 1 and parent(v) < v.
inline Canonicalized canonicalize(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges,
                                  std::string family, Vertex root = 1) {
  if (n == 0) throw std::invalid_argument("canonicalize: empty tree");
  if (edges.size() != n - 1) throw std::invalid_argument("canonicalize: need exactly n-1 edges");
  std::vector<std::uint32_t> deg(n + 2, 0);
  for (auto [a, b] : edges) {
    if (a < 1 || a > n || b < 1 || b > n || a == b) {
      throw std::invalid_argument("canonicalize: edge endpoint out of range");
    }
    ++deg[a + 1];
    ++deg[b + 1];
  }
  std::partial_sum(deg.begin(), deg.end(), deg.begin());
  std::vector<Vertex> adj(2 * (n - 1));
  std::vector<std::uint32_t> fill(deg.begin(), deg.end() - 1);
  for (auto [a, b] : edges) {
    adj[fill[a]++] = b;
    adj[fill[b]++] = a;
  }
  for (std::size_t v = 1; v <= n; ++v) {
    std::sort(adj.begin() + deg[v], adj.begin() + deg[v + 1]);
  }

  Canonicalized out;
  out.new_label.assign(n + 1, kNoVertex);
  out.old_label.assign(n + 1, kNoVertex);
  std::vector<Vertex> parent(n + 1, kNoVertex);
  std::vector<Vertex> queue;
  queue.reserve(n);
  queue.push_back(root);
  out.new_label[root] = 1;
  out.old_label[1] = root;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex v = queue[head];
    for (auto k = deg[v]; k < deg[v + 1]; ++k) {
      const Vertex w = adj[k];
      if (out.new_label[w] != kNoVertex) continue;
      const auto label = static_cast<Vertex>(queue.size() + 1);
      out.new_label[w] = label;
      out.old_label[label] = w;
      parent[label] = out.new_label[v];
      queue.push_back(w);
    }
  }
  if (queue.size() != n) throw std::invalid_argument("canonicalize: edges do not form a tree");
  out.tree = RootedTree(std::move(parent), std::move(family));
  return out;
}

// Text format: first line "n", then n-1 lines "child parent" in increasing
// child order.
inline void write_tree(std::ostream& os, const RootedTree& t) {
  os << t.size() << '\n';
  for (Vertex v = 2; v <= t.size(); ++v) os << v << ' ' << t.parent(v) << '\n';
}

inline std::string to_text(const RootedTree& t) {
  std::ostringstream os;
  write_tree(os, t);
  return os.str();
}

/// Reads the text format. Lines may come in any order; a tree whose labels
/// are not canonical is relabeled (the mapping is returned).
inline Canonicalized read_tree(std::istream& is, std::string family = "file") {
  std::size_t n = 0;
  if (!(is >> n) || n == 0) throw std::runtime_error("read_tree: bad vertex count");
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(n - 1);
  std::vector<Vertex> parent(n + 1, kNoVertex);
  bool canonical = true;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    long long child = 0;
    long long par = 0;
    if (!(is >> child >> par)) throw std::runtime_error("read_tree: truncated edge list");
    if (child < 1 || par < 1 || static_cast<std::size_t>(child) > n ||
        static_cast<std::size_t>(par) > n) {
      throw std::runtime_error("read_tree: vertex out of range");
    }
    edges.emplace_back(static_cast<Vertex>(child), static_cast<Vertex>(par));
    if (child <= par || child == 1 || parent[child] != kNoVertex) canonical = false;
    parent[child] = static_cast<Vertex>(par);
  }
  std::string extra;
  if (is >> extra) throw std::runtime_error("read_tree: trailing content");
  if (canonical) {
    Canonicalized out;
    out.tree = RootedTree(std::move(parent), std::move(family));
    out.new_label.resize(n + 1);
    std::iota(out.new_label.begin(), out.new_label.end(), Vertex{0});
    out.old_label = out.new_label;
    return out;
  }
  return canonicalize(n, edges, std::move(family));
}

inline RootedTree tree_from_text(const std::string& text) {
  std::istringstream is(text);
  return read_tree(is).tree;
}

}  // namespace cuttree
