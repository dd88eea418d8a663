#pragma once

// Slow reference implementations used only by the tests. They follow the
// literal definitions (split components one cut at a time, enumerate every
// outcome) and share no code with the library beyond RootedTree.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cuttree/rooted_tree.hpp"

namespace oracle {

using cuttree::RootedTree;
using cuttree::Vertex;
using Block = std::vector<Vertex>;  // sorted
using Rational = boost::multiprecision::cpp_rational;

/// Forward destruction of `t`, removing edges (child ids) in the given order.
struct ForwardRun {
  /// Every block that was split, mapped to its two children (sorted pair).
  std::map<Block, std::pair<Block, Block>> splits;
  std::vector<std::uint32_t> depth;      ///< cuts in components containing u
  std::vector<std::uint32_t> sep_step;   ///< 1-based step separating u from 1 (0 for root)
  std::vector<std::uint32_t> Y;          ///< root-component cuts up to sep_step[u]
  std::uint32_t root_cuts = 0;
  std::vector<std::uint32_t> root_size;  ///< root component size after each step
  std::vector<std::uint32_t> root_cut_count;  ///< root-component cuts after each step
};

inline ForwardRun forward_split(const RootedTree& t, const std::vector<Vertex>& order) {
  const std::size_t n = t.size();
  std::vector<std::vector<Vertex>> adj(n + 1);
  for (Vertex v = 2; v <= n; ++v) {
    adj[v].push_back(t.parent(v));
    adj[t.parent(v)].push_back(v);
  }
  std::set<std::pair<Vertex, Vertex>> removed;
  auto gone = [&](Vertex a, Vertex b) { return removed.count({std::min(a, b), std::max(a, b)}) > 0; };
  auto component = [&](Vertex s) {
    Block out{s};
    std::vector<char> seen(n + 1, 0);
    seen[s] = 1;
    for (std::size_t h = 0; h < out.size(); ++h) {
      for (Vertex w : adj[out[h]]) {
        if (!seen[w] && !gone(out[h], w)) {
          seen[w] = 1;
          out.push_back(w);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  ForwardRun run;
  run.depth.assign(n + 1, 0);
  run.sep_step.assign(n + 1, 0);
  run.Y.assign(n + 1, 0);
  std::uint32_t step = 0;
  for (Vertex v : order) {
    ++step;
    const Vertex p = t.parent(v);
    const Block whole = component(v);
    removed.insert({std::min(p, v), std::max(p, v)});
    Block a = component(p);
    Block b = component(v);
    if (b < a) std::swap(a, b);
    run.splits[whole] = {a, b};
    for (Vertex u : whole) ++run.depth[u];
    const bool rooted = std::binary_search(whole.begin(), whole.end(), Vertex{1});
    if (rooted) {
      ++run.root_cuts;
      const Block& lost = std::binary_search(a.begin(), a.end(), Vertex{1}) ? b : a;
      for (Vertex u : lost) {
        run.sep_step[u] = step;
        run.Y[u] = run.root_cuts;
      }
    }
    run.root_size.push_back(static_cast<std::uint32_t>(component(1).size()));
    run.root_cut_count.push_back(run.root_cuts);
  }
  return run;
}

/// Z and W_2..W_j by replaying cuts and discarding components as the
/// definitions say: Z counts cuts in components holding a target, W_k counts
/// cuts in components holding two or more targets until the targets occupy
/// k distinct components.
struct SpreadCounts {
  std::uint64_t Z = 0;
  std::vector<std::uint64_t> W;
};

inline SpreadCounts forward_spread(const RootedTree& t, const std::vector<Vertex>& order,
                                   const std::vector<Vertex>& targets) {
  const std::size_t n = t.size();
  std::vector<Vertex> comp(n + 1, 1);  // component label per vertex
  std::vector<std::vector<Vertex>> adj(n + 1);
  for (Vertex v = 2; v <= n; ++v) {
    adj[v].push_back(t.parent(v));
    adj[t.parent(v)].push_back(v);
  }
  std::set<std::pair<Vertex, Vertex>> removed;
  std::set<Vertex> tset(targets.begin(), targets.end());
  const std::size_t j = tset.size();
  Vertex next_label = 2;
  SpreadCounts out;
  std::uint64_t shared = 0;
  std::size_t reached = 1;
  for (Vertex v : order) {
    const Vertex p = t.parent(v);
    std::size_t held = 0;
    for (Vertex u : tset) held += comp[u] == comp[v];
    if (held >= 1) ++out.Z;
    if (held >= 2) ++shared;
    removed.insert({std::min(p, v), std::max(p, v)});
    // relabel the side of v
    std::vector<Vertex> stack{v};
    const Vertex old = comp[v];
    const Vertex fresh = next_label++;
    comp[v] = fresh;
    while (!stack.empty()) {
      const Vertex x = stack.back();
      stack.pop_back();
      for (Vertex w : adj[x]) {
        if (comp[w] == old && !removed.count({std::min(x, w), std::max(x, w)})) {
          comp[w] = fresh;
          stack.push_back(w);
        }
      }
    }
    std::set<Vertex> labels;
    for (Vertex u : tset) labels.insert(comp[u]);
    while (reached < labels.size() && reached < j) {
      ++reached;
      out.W.push_back(shared);
    }
  }
  return out;
}

/// All trees with parent(v) < v on n vertices; every rooted tree shape on n
/// labeled vertices is isomorphic to at least one of them.
inline std::vector<RootedTree> recursive_trees(std::size_t n) {
  std::vector<RootedTree> out;
  std::vector<Vertex> parent(n + 1, cuttree::kNoVertex);
  std::function<void(Vertex)> rec = [&](Vertex v) {
    if (v > n) {
      out.emplace_back(parent, "enum");
      return;
    }
    for (Vertex p = 1; p < v; ++p) {
      parent[v] = p;
      rec(v + 1);
    }
  };
  rec(2);
  return out;
}

/// Decodes a Pruefer sequence over {1..n} into an unrooted edge list.
inline std::vector<std::pair<Vertex, Vertex>> prufer_edges(const std::vector<Vertex>& code,
                                                           std::size_t n) {
  std::vector<std::size_t> degree(n + 1, 1);
  for (Vertex c : code) ++degree[c];
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex c : code) {
    for (Vertex leaf = 1; leaf <= n; ++leaf) {
      if (degree[leaf] == 1) {
        edges.emplace_back(leaf, c);
        --degree[leaf];
        --degree[c];
        break;
      }
    }
  }
  std::vector<Vertex> last;
  for (Vertex v = 1; v <= n; ++v) {
    if (degree[v] == 1) last.push_back(v);
  }
  edges.emplace_back(last[0], last[1]);
  return edges;
}

/// Exact laws for the degree-biased (alpha = 0) growth: every tree with
/// `edges` edges started from the edge {1,2}, with its probability.
inline std::vector<std::pair<RootedTree, Rational>> scale_free_trees(std::size_t edges) {
  std::vector<std::pair<RootedTree, Rational>> out;
  std::vector<Vertex> parent{cuttree::kNoVertex, cuttree::kNoVertex, 1};
  std::vector<std::size_t> degree{0, 1, 1};
  std::function<void(Rational)> rec = [&](Rational p) {
    const std::size_t m = parent.size() - 2;  // current edge count
    if (m == edges) {
      out.emplace_back(RootedTree(parent, "sf-enum"), p);
      return;
    }
    const Vertex v = static_cast<Vertex>(parent.size());
    for (Vertex i = 1; i < v; ++i) {
      parent.push_back(i);
      ++degree[i];
      degree.push_back(1);
      rec(p * Rational(degree[i] - 1, 2 * m));
      degree.pop_back();
      --degree[i];
      parent.pop_back();
    }
  };
  rec(Rational(1));
  return out;
}

/// sum_{u != i} z^{d(i,u)-1} with exact arithmetic.
inline Rational exact_profile(const RootedTree& t, Vertex i, const Rational& z) {
  const auto d = cuttree::depths(t);
  Rational g = 0;
  for (Vertex u = 1; u <= t.size(); ++u) {
    if (u == i) continue;
    const auto k = cuttree::distance(t, d, i, u);
    Rational p = 1;
    for (std::uint32_t e = 1; e < k; ++e) p *= z;
    g += p;
  }
  return g;
}

}  // namespace oracle
