#pragma once

// Monte Carlo checks of the limit laws. Every check draws `replicas`
// independent trees of one family and size, takes a bounded number of
// samples from each, and compares against the family's LimitModel.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cuttree/cut_tree.hpp"
#include "cuttree/destruction.hpp"
#include "cuttree/family.hpp"
#include "cuttree/format.hpp"
#include "cuttree/limit_model.hpp"
#include "cuttree/parallel.hpp"
#include "cuttree/rng.hpp"
#include "cuttree/schedule.hpp"
#include "cuttree/stats.hpp"

namespace cuttree {

inline constexpr double kNoThreshold = std::numeric_limits<double>::infinity();

struct EmpiricalSample {
  std::vector<double> values;
  std::size_t n_used = 0;
  std::string family_tag;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> replica_keys;  ///< stream key of every replica
};

struct TestReport {
  std::string check;
  std::string quantity;
  std::string statistic;  ///< KS | Wasserstein-1 | energy | sup-norm | abs-error | ...
  std::string reference;  ///< reference law id
  std::string family;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t sample_size = 0;
  std::size_t reference_size = 0;  ///< 0 when the reference is analytic
  double value = 0.0;
  double threshold = kNoThreshold;
  double p_value = std::numeric_limits<double>::quiet_NaN();
  bool pass = true;

  [[nodiscard]] bool informational() const { return std::isinf(threshold); }
};

/// Pass thresholds by key; keys without a value mean "no threshold".
class Thresholds {
 public:
  Thresholds()
      : values_{{"H.w1", 0.15},          {"H.meet", 0.05},       {"H.mass", 0.03},
                {"Hprime", 0.05},        {"root_cluster", 0.05}, {"R_process", 0.05},
                {"gamma.ks", 0.02},      {"gamma.corr", 0.02},   {"Y.ks", 0.05},
                {"depth.ks", 0.05},      {"depth.ks.other", 0.08}, {"gp.energy", 0.05},
                {"gp.entry_ks", 0.05},   {"Z.mean", 0.03},       {"Z.ks", 0.05},
                {"W.ks", 0.05},          {"merged.block", 0.02}} {}

  [[nodiscard]] double get(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? kNoThreshold : it->second;
  }
  void set(const std::string& key, double value) { values_[key] = value; }
  [[nodiscard]] const std::map<std::string, double>& all() const { return values_; }

  /// Reads "key = value" lines; '#' starts a comment.
  void load(std::istream& is) {
    std::string line;
    while (std::getline(is, line)) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
          throw std::runtime_error("thresholds: expected key = value, got '" + line + "'");
        }
        continue;
      }
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      if (!values_.count(key)) throw std::invalid_argument("thresholds: unknown key '" + key + "'");
      values_[key] = std::stod(trim(line.substr(eq + 1)));
    }
  }

 private:
  std::map<std::string, double> values_;
};

struct CheckConfig {
  std::uint64_t seed = 1;
  std::size_t replicas = 50;
  std::size_t samples_per_tree = 10;
  unsigned threads = 1;
  std::size_t k = 4;
  unsigned j_max = 5;
  Thresholds thresholds;
};

/// Stream of replica r: master seed -> family -> n -> r.
inline Stream replica_stream(const FamilySpec& f, std::size_t n, std::uint64_t seed,
                             std::size_t r) {
  return Stream(seed).split(f.stream_id()).split(n).split(r);
}

/// One simulated tree with its exponential-clock destruction.
struct Replica {
  RootedTree tree;
  CutSchedule schedule;
  double ell = 1.0;
  std::optional<CutTree> cut;

  [[nodiscard]] std::size_t size() const { return tree.size(); }
};

/// The tree and its clocks come from sub-stream 0 of the replica stream, so
/// every check sees the same trees for the same seed.
inline Replica make_replica(const FamilySpec& f, std::size_t n, const LimitModel& m,
                            Stream& replica_rng) {
  Stream rng = replica_rng.split(0);
  Replica rep;
  rep.tree = generate(f, n, rng);
  rep.ell = m.ell(rep.tree.size());
  rep.schedule = sample_schedule(rep.tree, rep.ell, rng);
  rep.cut.emplace(rep.tree, rep.schedule);
  return rep;
}

namespace detail {

inline TestReport report(std::string check, std::string quantity, std::string statistic,
                         std::string reference, const FamilySpec& f, std::size_t n,
                         const CheckConfig& cfg, std::size_t sample_size, double value,
                         double threshold) {
  TestReport r;
  r.check = std::move(check);
  r.quantity = std::move(quantity);
  r.statistic = std::move(statistic);
  r.reference = std::move(reference);
  r.family = f.tag();
  r.n = n;
  r.seed = cfg.seed;
  r.sample_size = sample_size;
  r.value = value;
  r.threshold = threshold;
  r.pass = !(value > threshold);
  return r;
}

inline Vertex uniform_vertex(std::size_t n, Stream& rng) {
  return static_cast<Vertex>(1 + rng.below(n));
}

/// j distinct uniform vertices.
inline std::vector<Vertex> distinct_vertices(std::size_t n, std::size_t j, Stream& rng) {
  if (j > n) throw std::invalid_argument("distinct_vertices: more targets than vertices");
  std::vector<Vertex> out;
  while (out.size() < j) {
    const Vertex v = uniform_vertex(n, rng);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

template <class T>
std::vector<T> flatten(const std::vector<std::vector<T>>& parts) {
  std::vector<T> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline std::vector<std::pair<double, double>> zeta_atoms(const LimitModel& m) {
  std::vector<std::pair<double, double>> out;
  for (const auto& a : m.atoms()) out.emplace_back(a.value, a.weight);
  return out;
}

inline std::vector<std::pair<double, double>> zeta_pair_atoms(const LimitModel& m) {
  std::vector<std::pair<double, double>> out;
  for (const auto& a : m.atoms()) {
    for (const auto& b : m.atoms()) out.emplace_back(a.value + b.value, a.weight * b.weight);
  }
  return out;
}

inline std::size_t used_size(const FamilySpec& f, std::size_t n) {
  Stream unused;
  return f.kind == FamilyKind::merged ? generate(f, n, unused).size() : n;
}

}  // namespace detail

/// Scaled cut-tree depths (ell/n) * depth(u) of uniform vertices.
inline EmpiricalSample sample_scaled_depths(const FamilySpec& f, std::size_t n,
                                            const CheckConfig& cfg) {
  const LimitModel m = limit_model(f);
  EmpiricalSample out;
  out.family_tag = f.tag();
  out.master_seed = cfg.seed;
  struct Part {
    std::vector<double> values;
    std::uint64_t key = 0;
    std::size_t n = 0;
  };
  const auto parts = map_replicas(cfg.replicas, cfg.threads, [&](std::size_t r) {
    Stream rs = replica_stream(f, n, cfg.seed, r);
    const Replica rep = make_replica(f, n, m, rs);
    Stream pick = rs.split(1);
    Part p;
    p.key = rs.key();
    p.n = rep.size();
    const double scale = rep.ell / static_cast<double>(rep.size());
    for (std::size_t s = 0; s < cfg.samples_per_tree; ++s) {
      p.values.push_back(scale * rep.cut->leaf_depth(detail::uniform_vertex(rep.size(), pick)));
    }
    return p;
  });
  for (const auto& p : parts) {
    out.values.insert(out.values.end(), p.values.begin(), p.values.end());
    out.replica_keys.push_back(p.key);
    out.n_used = p.n;
  }
  return out;
}

/// Hypothesis (H): d(1,u)/ell against zeta, d(u,v)/ell against zeta_1 + zeta_2,
/// d(1, u^v)/ell against 0; for several atoms also the mass near each atom.
inline std::vector<TestReport> check_H(const FamilySpec& f, std::size_t n, const CheckConfig& cfg) {
  const LimitModel m = limit_model(f);
  struct Part {
    std::vector<double> root, pair, meet;
  };
  const auto parts = map_replicas(cfg.replicas, cfg.threads, [&](std::size_t r) {
    Stream rs = replica_stream(f, n, cfg.seed, r);
    Stream rng = rs.split(0);
    const RootedTree t = generate(f, n, rng);
    const double ell = m.ell(t.size());
    const auto depth = depths(t);
    Stream pick = rs.split(2);
    Part p;
    for (std::size_t s = 0; s < cfg.samples_per_tree; ++s) {
      const Vertex u = detail::uniform_vertex(t.size(), pick);
      const Vertex v = detail::uniform_vertex(t.size(), pick);
      const Vertex w = common_ancestor(t, depth, u, v);
      p.root.push_back(depth[u] / ell);
      p.pair.push_back((depth[u] + depth[v] - 2.0 * depth[w]) / ell);
      p.meet.push_back(depth[w] / ell);
    }
    return p;
  });
  std::vector<double> root, pair, meet;
  for (const auto& p : parts) {
    root.insert(root.end(), p.root.begin(), p.root.end());
    pair.insert(pair.end(), p.pair.begin(), p.pair.end());
    meet.insert(meet.end(), p.meet.begin(), p.meet.end());
  }
  const std::size_t nu = detail::used_size(f, n);
  const auto& th = cfg.thresholds;
  std::vector<TestReport> out;
  out.push_back(detail::report("H", "d(1,u)/ell", "Wasserstein-1", "zeta", f, nu, cfg, root.size(),
                               stats::wasserstein1_discrete(root, detail::zeta_atoms(m)),
                               th.get("H.w1")));
  out.push_back(detail::report("H", "d(u,v)/ell", "Wasserstein-1", "zeta1+zeta2", f, nu, cfg,
                               pair.size(),
                               stats::wasserstein1_discrete(pair, detail::zeta_pair_atoms(m)),
                               th.get("H.w1")));
  out.push_back(detail::report("H", "d(1,u^v)/ell", "median", "0", f, nu, cfg, meet.size(),
                               stats::quantile(meet, 0.5), th.get("H.meet")));
  out.push_back(detail::report("H", "d(1,u)/ell", "mean", "E[zeta]", f, nu, cfg, root.size(),
                               stats::mean(root), kNoThreshold));
  out.push_back(detail::report("H", "d(u,v)/ell", "mean", "E[zeta1+zeta2]", f, nu, cfg,
                               pair.size(), stats::mean(pair), kNoThreshold));
  if (m.atoms().size() > 1) {
    // Mass attracted by each atom: assign every sample to the nearest atom.
    std::vector<double> count(m.atoms().size(), 0.0);
    for (double x : root) {
      std::size_t best = 0;
      for (std::size_t a = 1; a < m.atoms().size(); ++a) {
        if (std::abs(x - m.atoms()[a].value) < std::abs(x - m.atoms()[best].value)) best = a;
      }
      count[best] += 1.0;
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < count.size(); ++a) {
      const double frac = count[a] / static_cast<double>(root.size());
      worst = std::max(worst, std::abs(frac - m.atoms()[a].weight));
      out.push_back(detail::report("H", "mass near zeta=" + format_double(m.atoms()[a].value),
                                   "fraction", format_double(m.atoms()[a].weight), f, nu, cfg,
                                   root.size(), frac, kNoThreshold));
    }
    out.push_back(detail::report("H", "atom masses", "max-abs-error", "zeta weights", f, nu, cfg,
                                 root.size(), worst, th.get("H.mass")));
  }
  return out;
}

/// Hypothesis (H'): E[ell / d(u,v) ; u != v] against E[1/(zeta_1 + zeta_2)].
inline std::vector<TestReport> check_Hprime(const FamilySpec& f, std::size_t n,
                                            const CheckConfig& cfg) {
  const LimitModel m = limit_model(f);
  const auto parts = map_replicas(cfg.replicas, cfg.threads, [&](std::size_t r) {
    Stream rs = replica_stream(f, n, cfg.seed, r);
    Stream rng = rs.split(0);
    const RootedTree t = generate(f, n, rng);
    const double ell = m.ell(t.size());
    const auto depth = depths(t);
    Stream pick = rs.split(3);
    std::vector<double> v;
    for (std::size_t s = 0; s < cfg.samples_per_tree; ++s) {
      const Vertex a = detail::uniform_vertex(t.size(), pick);
      const Vertex b = detail::uniform_vertex(t.size(), pick);
      v.push_back(a == b ? 0.0 : ell / distance(t, depth, a, b));
    }
    return v;
  });
  const auto values = detail::flatten(parts);
  const double est = stats::mean(values);
  const double target = m.mean_inverse_pair_sum();
  const std::size_t nu = detail::used_size(f, n);
  std::vector<TestReport> out;
  out.push_back(detail::report("Hprime", "E[ell/d(u,v)]", "estimate", format_double(target), f, nu,
                               cfg, values.size(), est, kNoThreshold));
  auto rep = detail::report("Hprime", "E[ell/d(u,v)]", "abs-error", "E[1/(zeta1+zeta2)]", f, nu,
                            cfg, values.size(), std::abs(est - target),
                            cfg.thresholds.get("Hprime"));
  out.push_back(rep);
  return out;
}

namespace detail {

template <class Fn>
std::vector<double> per_replica_traces(const FamilySpec& f, std::size_t n, const CheckConfig& cfg,
                                       const LimitModel& m, Fn&& fn) {
  return map_replicas(cfg.replicas, cfg.threads, [&](std::size_t r) {
    Stream rs = replica_stream(f, n, cfg.seed, r);
    const Replica rep = make_replica(f, n, m, rs);
    const DestructionTrace tr = run_destruction(rep.tree, rep.schedule, *rep.cut);
    return fn(rep, tr);
  });
}

inline void sup_reports(std::vector<TestReport>& out, const std::string& check,
                        const std::string& quantity, const std::string& reference,
                        const FamilySpec& f, std::size_t n, const CheckConfig& cfg,
                        const std::vector<double>& sups, double threshold) {
  out.push_back(report(check, quantity, "sup-norm median", reference, f, n, cfg, sups.size(),
                       stats::quantile(sups, 0.5), threshold));
  out.push_back(report(check, quantity, "sup-norm p90", reference, f, n, cfg, sups.size(),
                       stats::quantile(sups, 0.9), kNoThreshold));
}

}  // namespace detail

/// Root component size: sup_t |X(t)/n - lambda(t)| per replica.
inline std::vector<TestReport> check_root_cluster(const FamilySpec& f, std::size_t n,
                                                  const CheckConfig& cfg) {
  const LimitModel m = limit_model(f);
  const auto sups = detail::per_replica_traces(
      f, n, cfg, m, [&](const Replica&, const DestructionTrace& tr) {
        return root_cluster_deviation(tr, m);
      });
  std::vector<TestReport> out;
  detail::sup_reports(out, "root_cluster", "X(t)/n", "lambda", f, detail::used_size(f, n), cfg,
                      sups, cfg.thresholds.get("root_cluster"));
  return out;
}

/// Cuts absorbed by the root component: sup_{t<=T} |(ell/n) R(t) - Lambda(t)|.
inline std::vector<TestReport> check_R_process(const FamilySpec& f, std::size_t n,
                                               const CheckConfig& cfg) {
  const LimitModel m = limit_model(f);
  const auto sups = detail::per_replica_traces(
      f, n, cfg, m, [&](const Replica& rep, const DestructionTrace& tr) {
        return root_cuts_deviation(tr, m, rep.ell);
      });
  std::vector<TestReport> out;
  detail::sup_reports(out, "R_process", "(ell/n)R(t)", "Lambda", f, detail::used_size(f, n), cfg,
                      sups, cfg.thresholds.get("R_process"));
  return out;
}

/// Disconnection times: KS of Gamma_u against 1 - lambda, and correlation of
/// (Gamma_u, Gamma_v) for independent uniform non-root u, v.
inline std::vector<TestReport> check_gamma(const FamilySpec& f, std::size_t n,
                                           const CheckConfig& cfg) {
  const LimitModel m = limit_model(f);
  struct Part {
    std::vector<double> a, b;
  };
  const auto parts = map_replicas(cfg.replicas, cfg.threads, [&](std::size_t r) {
    Stream rs = replica_stream(f, n, cfg.seed, r);
    const Replica rep = make_replica(f, n, m, rs);
    const DestructionTrace tr = run_destruction(rep.tree, rep.schedule, *rep.cut);
    Stream pick = rs.split(4);
    Part p;
    for (std::size_t s = 0; s < cfg.samples_per_tree; ++s) {
      const auto uv = detail::distinct_vertices(rep.size() - 1, 2, pick);
      p.a.push_back(tr.gamma[uv[0] + 1]);
      p.b.push_back(tr.gamma[uv[1] + 1]);
    }
    return p;
  });
  std::vector<double> a, b;
  for (const auto& p : parts) {
    a.insert(a.end(), p.a.begin(), p.a.end());
    b.insert(b.end(), p.b.begin(), p.b.end());
  }
  const std::size_t nu = detail::used_size(f, n);
  const auto ks = stats::ks_test(a, [&](double t) { return t <= 0 ? 0.0 : 1.0 - m.lambda(t); });
  std::vector<TestReport> out;
  auto rep = detail::report("gamma", "Gamma_u", "KS", "1-lambda", f, nu, cfg, a.size(),
                            ks.statistic, cfg.thresholds.get("gamma.ks"));
  rep.p_value = ks.p_value;
  out.push_back(rep);
  out.push_back(detail::report("gamma", "corr(Gamma_u,Gamma_v)", "abs-correlation", "0", f, nu, cfg,
                               a.size(), std::abs(stats::correlation(a, b)),
                               cfg.thresholds.get("gamma.corr")));
  return out;
}

/// Y_u and cut-tree depth of uniform u against mu; mean residual (ell/n) N^(u).
inline std::vector<TestReport> check_Y_and_depth(const FamilySpec& f, std::size_t n,
                                                 const CheckConfig& cfg) {
  const LimitModel m = limit_model(f);
  struct Part {
    std::vector<double> y, depth, nres;
  };
  const auto parts = map_replicas(cfg.replicas, cfg.threads, [&](std::size_t r) {
    Stream rs = replica_stream(f, n, cfg.seed, r);
    const Replica rep = make_replica(f, n, m, rs);
    const DestructionTrace tr = run_destruction(rep.tree, rep.schedule, *rep.cut);
    Stream pick = rs.split(1);
    const double scale = rep.ell / static_cast<double>(rep.size());
    Part p;
    for (std::size_t s = 0; s < cfg.samples_per_tree; ++s) {
      const Vertex u = detail::uniform_vertex(rep.size(), pick);
      p.depth.push_back(scale * tr.depth[u]);
      p.y.push_back(scale * tr.Y[u]);
      p.nres.push_back(scale * tr.Nres[u]);
    }
    return p;
  });
  std::vector<double> y, depth, nres;
  for (const auto& p : parts) {
    y.insert(y.end(), p.y.begin(), p.y.end());
    depth.insert(depth.end(), p.depth.begin(), p.depth.end());
    nres.insert(nres.end(), p.nres.begin(), p.nres.end());
  }
  const std::size_t nu = detail::used_size(f, n);
  const auto cdf = [&](double x) { return m.mu_cdf(x); };
  const double depth_threshold = cfg.thresholds.get(
      f.kind == FamilyKind::urt ? "depth.ks" : "depth.ks.other");
  std::vector<TestReport> out;
  const auto ks_y = stats::ks_test(y, cdf);
  auto r1 = detail::report("Y_depth", "(ell/n)Y_u", "KS", "mu", f, nu, cfg, y.size(),
                           ks_y.statistic, cfg.thresholds.get("Y.ks"));
  r1.p_value = ks_y.p_value;
  out.push_back(r1);
  const auto ks_d = stats::ks_test(depth, cdf);
  auto r2 = detail::report("Y_depth", "(ell/n)depth(u)", "KS", "mu", f, nu, cfg, depth.size(),
                           ks_d.statistic, depth_threshold);
  r2.p_value = ks_d.p_value;
  out.push_back(r2);
  out.push_back(detail::report("Y_depth", "(ell/n)N(u)", "mean", "0", f, nu, cfg, nres.size(),
                               stats::mean(nres), kNoThreshold));
  return out;
}

/// Distance matrices between the root and k uniform leaves, scaled by ell/n,
/// against matrices built from k i.i.d. mu draws (entries xi_i and |xi_i - xi_j|).
inline std::vector<TestReport> check_pairwise_gp(const FamilySpec& f, std::size_t n,
                                                 const CheckConfig& cfg) {
  if (cfg.k < 1) throw std::invalid_argument("check_pairwise_gp: need k >= 1");
  const LimitModel m = limit_model(f);
  const std::size_t k = cfg.k;
  using Vec = std::vector<double>;
  auto upper = [k](const auto& at) {
    Vec v;
    for (std::size_t i = 0; i <= k; ++i) {
      for (std::size_t j = i + 1; j <= k; ++j) v.push_back(at(i, j));
    }
    return v;
  };
  const auto parts = map_replicas(cfg.replicas, cfg.threads, [&](std::size_t r) {
    Stream rs = replica_stream(f, n, cfg.seed, r);
    const Replica rep = make_replica(f, n, m, rs);
    Stream pick = rs.split(5);
    const double scale = rep.ell / static_cast<double>(rep.size());
    std::vector<Vec> mats;
    for (std::size_t s = 0; s < cfg.samples_per_tree; ++s) {
      const DistanceMatrix dm = rep.cut->sample_distance_matrix(k, pick);
      mats.push_back(upper([&](std::size_t i, std::size_t j) { return scale * dm.at(i, j); }));
    }
    return mats;
  });
  const auto sample = detail::flatten(parts);

  Stream ref_rng = Stream(cfg.seed).split(f.stream_id()).split(n).split(~std::uint64_t{0});
  std::vector<Vec> reference;
  for (std::size_t s = 0; s < sample.size(); ++s) {
    Vec xi(k + 1, 0.0);
    for (std::size_t i = 1; i <= k; ++i) xi[i] = m.sample_mu(ref_rng);
    reference.push_back(upper([&](std::size_t i, std::size_t j) {
      return i == 0 ? xi[j] : std::abs(xi[i] - xi[j]);
    }));
  }

  const std::size_t nu = detail::used_size(f, n);
  std::vector<TestReport> out;
  auto energy = detail::report("gp", "distance matrix k=" + std::to_string(k), "energy",
                               "mu matrices", f, nu, cfg, sample.size(),
                               stats::energy_distance(sample, reference),
                               cfg.thresholds.get("gp.energy"));
  energy.reference_size = reference.size();
  out.push_back(energy);

  // Row 0 entries against mu, other entries against |U - U'|.
  std::vector<double> root_entries, leaf_entries;
  for (const auto& v : sample) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i <= k; ++i) {
      for (std::size_t j = i + 1; j <= k; ++j, ++idx) {
        (i == 0 ? root_entries : leaf_entries).push_back(v[idx]);
      }
    }
  }
  const auto ks_root = stats::ks_test(root_entries, [&](double x) { return m.mu_cdf(x); });
  auto r1 = detail::report("gp", "entry (0,i)", "KS", "mu", f, nu, cfg, root_entries.size(),
                           ks_root.statistic, cfg.thresholds.get("gp.entry_ks"));
  r1.p_value = ks_root.p_value;
  out.push_back(r1);
  if (!leaf_entries.empty()) {
    const auto ks_leaf = stats::ks_test(leaf_entries, [&](double x) { return m.abs_diff_cdf(x); });
    auto r2 = detail::report("gp", "entry (i,j)", "KS", "|U-U'|", f, nu, cfg, leaf_entries.size(),
                             ks_leaf.statistic, cfg.thresholds.get("gp.entry_ks"));
    r2.p_value = ks_leaf.p_value;
    out.push_back(r2);
  }
  return out;
}

/// Z_{n,j} and W_{n,k} for j uniform distinct targets, j in `js`.
inline std::vector<TestReport> check_multi_isolation(const FamilySpec& f, std::size_t n,
                                                     const CheckConfig& cfg,
                                                     std::vector<unsigned> js = {}) {
  if (js.empty()) {
    if (cfg.j_max < 1) throw std::invalid_argument("check_multi_isolation: need j_max >= 1");
    for (unsigned j = 1; j <= cfg.j_max; ++j) js.push_back(j);
  }
  const LimitModel m = limit_model(f);
  // parts[r][jidx] = {Z samples, W_2 samples, W_3 samples, ...}
  using Cell = std::vector<std::vector<double>>;
  const auto parts = map_replicas(cfg.replicas, cfg.threads, [&](std::size_t r) {
    Stream rs = replica_stream(f, n, cfg.seed, r);
    const Replica rep = make_replica(f, n, m, rs);
    Stream pick = rs.split(6);
    const double scale = rep.ell / static_cast<double>(rep.size());
    std::vector<Cell> cells;
    for (unsigned j : js) {
      Cell c(j);
      for (std::size_t s = 0; s < cfg.samples_per_tree; ++s) {
        const auto targets = detail::distinct_vertices(rep.size(), j, pick);
        c[0].push_back(scale * static_cast<double>(rep.cut->isolation_cuts(targets)));
        const auto w = rep.cut->spread_cuts(targets);
        for (std::size_t q = 0; q < w.size(); ++q) c[q + 1].push_back(scale * w[q]);
      }
      cells.push_back(std::move(c));
    }
    return cells;
  });
  const std::size_t nu = detail::used_size(f, n);
  const auto& th = cfg.thresholds;
  std::vector<TestReport> out;
  for (std::size_t ji = 0; ji < js.size(); ++ji) {
    const unsigned j = js[ji];
    std::vector<std::vector<double>> merged(j);
    for (const auto& p : parts) {
      for (unsigned q = 0; q < j; ++q) {
        merged[q].insert(merged[q].end(), p[ji][q].begin(), p[ji][q].end());
      }
    }
    const std::string js_ = std::to_string(j);
    const double target = expected_max(m, j);
    const auto& z = merged[0];
    out.push_back(detail::report("multi_isolation", "(ell/n)Z_{n," + js_ + "}", "mean",
                                 format_double(target), f, nu, cfg, z.size(), stats::mean(z),
                                 kNoThreshold));
    out.push_back(detail::report("multi_isolation", "(ell/n)Z_{n," + js_ + "}", "mean abs-error",
                                 "E[max of " + js_ + " mu]", f, nu, cfg, z.size(),
                                 std::abs(stats::mean(z) - target), th.get("Z.mean")));
    const auto ks_z = stats::ks_test(z, [&](double x) { return std::pow(m.mu_cdf(x), j); });
    auto rz = detail::report("multi_isolation", "(ell/n)Z_{n," + js_ + "}", "KS",
                             "max of " + js_ + " mu", f, nu, cfg, z.size(), ks_z.statistic,
                             th.get("Z.ks"));
    rz.p_value = ks_z.p_value;
    out.push_back(rz);
    for (unsigned kk = 2; kk <= j; ++kk) {
      const auto& w = merged[kk - 1];
      const unsigned order = kk - 1;
      const auto ks_w = stats::ks_test(
          w, [&](double x) { return stats::order_statistic_cdf(m.mu_cdf(x), order, j); });
      auto rw = detail::report("multi_isolation",
                               "(ell/n)W_{n," + std::to_string(kk) + "} j=" + js_, "KS",
                               "order statistic " + std::to_string(order) + " of " + js_, f, nu,
                               cfg, w.size(), ks_w.statistic, th.get("W.ks"));
      rw.p_value = ks_w.p_value;
      out.push_back(rw);
      if (kk == 2 && j > 2) {
        // The other reading of the W-limit: order statistic j-1 of j.
        const auto ks_alt = stats::ks_test(
            w, [&](double x) { return stats::order_statistic_cdf(m.mu_cdf(x), j - 1, j); });
        auto ra = detail::report("multi_isolation", "(ell/n)W_{n,2} j=" + js_, "KS",
                                 "order statistic " + std::to_string(j - 1) + " of " + js_, f, nu,
                                 cfg, w.size(), ks_alt.statistic, kNoThreshold);
        ra.p_value = ks_alt.p_value;
        out.push_back(ra);
      }
    }
  }
  return out;
}

/// Merged trees: fraction of uniform vertices in each block against 1/r.
inline std::vector<TestReport> check_merged_blocks(const FamilySpec& f, std::size_t n,
                                                   const CheckConfig& cfg) {
  if (f.kind != FamilyKind::merged) throw std::invalid_argument("check_merged_blocks: merged only");
  const MergedLayout layout = merged_layout(f.ds, f.merged_m(n));
  const auto parts = map_replicas(cfg.replicas, cfg.threads, [&](std::size_t r) {
    Stream pick = replica_stream(f, n, cfg.seed, r).split(7);
    std::vector<double> hits(layout.ds.size() + 1, 0.0);
    for (std::size_t s = 0; s < cfg.samples_per_tree; ++s) {
      const Vertex v = detail::uniform_vertex(layout.n, pick);
      hits[v == 1 ? layout.ds.size() : layout.block_of(v)] += 1.0;
    }
    return hits;
  });
  std::vector<double> hits(layout.ds.size() + 1, 0.0);
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += p[i];
  }
  const double total = static_cast<double>(cfg.replicas * cfg.samples_per_tree);
  const double target = 1.0 / static_cast<double>(layout.ds.size());
  std::vector<TestReport> out;
  double worst = 0.0;
  for (std::size_t i = 0; i < layout.ds.size(); ++i) {
    const double frac = hits[i] / total;
    worst = std::max(worst, std::abs(frac - target));
    out.push_back(detail::report("merged_blocks",
                                 "block d=" + std::to_string(layout.ds[i]) + " h=" +
                                     std::to_string(layout.heights[i]),
                                 "fraction", "exact " + format_double(layout.block_fraction(i)), f,
                                 layout.n, cfg, static_cast<std::size_t>(total), frac,
                                 kNoThreshold));
  }
  out.push_back(detail::report("merged_blocks", "block fractions", "max-abs-error",
                               "1/r=" + format_double(target), f, layout.n, cfg,
                               static_cast<std::size_t>(total), worst,
                               cfg.thresholds.get("merged.block")));
  return out;
}

// ---- output ----

inline void write_reports_csv(std::ostream& os, std::span<const TestReport> reports,
                              std::span<const std::string> comment_lines = {}) {
  for (const auto& c : comment_lines) os << "# " << c << '\n';
  os << "check,quantity,statistic,reference,family,n,seed,sample_size,reference_size,value,"
        "threshold,p_value,pass\n";
  for (const auto& r : reports) {
    os << csv_field(r.check) << ',' << csv_field(r.quantity) << ',' << csv_field(r.statistic) << ','
       << csv_field(r.reference) << ',' << csv_field(r.family) << ',' << r.n << ',' << r.seed << ','
       << r.sample_size << ',' << r.reference_size << ',' << format_double(r.value) << ','
       << format_double(r.threshold) << ',' << format_double(r.p_value) << ','
       << (r.pass ? "true" : "false") << '\n';
  }
}

inline nlohmann::ordered_json to_json(const TestReport& r) {
  nlohmann::ordered_json j;
  j["check"] = r.check;
  j["quantity"] = r.quantity;
  j["statistic"] = r.statistic;
  j["reference"] = r.reference;
  j["family"] = r.family;
  j["n"] = r.n;
  j["seed"] = r.seed;
  j["sample_size"] = r.sample_size;
  j["reference_size"] = r.reference_size;
  j["value"] = r.value;
  j["threshold"] = r.informational() ? nlohmann::ordered_json(nullptr)
                                     : nlohmann::ordered_json(r.threshold);
  j["p_value"] = std::isnan(r.p_value) ? nlohmann::ordered_json(nullptr)
                                       : nlohmann::ordered_json(r.p_value);
  j["pass"] = r.pass;
  return j;
}

}  // namespace cuttree
