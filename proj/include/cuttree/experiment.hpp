#pragma once

// Experiment runner behind the command line tool: resolved configuration,
// per-replica seeding and the generate / destroy / verify / profile /
// gp-compare commands. Outputs depend only on the configuration and seed.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cuttree/cut_tree.hpp"
#include "cuttree/destruction.hpp"
#include "cuttree/family.hpp"
#include "cuttree/format.hpp"
#include "cuttree/limit_laws.hpp"
#include "cuttree/limit_model.hpp"
#include "cuttree/profile_gf.hpp"
#include "cuttree/rooted_tree.hpp"
#include "cuttree/schedule.hpp"

namespace cuttree {

struct ExperimentConfig {
  std::string family = "urt";
  unsigned b = 2;
  double alpha = 0.0;
  std::vector<unsigned> ds{2, 4};
  double m = 0.0;
  unsigned d = 2;       ///< regular degree
  unsigned height = 3;  ///< regular height
  std::vector<std::size_t> ns{1000};
  std::size_t replicas = 1;
  std::size_t samples_per_tree = 10;
  std::size_t k = 4;
  unsigned j_max = 5;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out = ".";
  std::string threshold_file;
  std::vector<std::string> checks;
  std::string tree_file;
  std::string order_file;
  std::size_t n_max = 2000;
  std::vector<double> zs;
  std::size_t mc_replicas = 10000;
  bool dump_table = false;

  [[nodiscard]] FamilySpec family_spec() const {
    FamilySpec f;
    f.kind = parse_family_kind(family);
    f.b = f.kind == FamilyKind::regular ? d : b;
    f.alpha = alpha;
    f.ds = ds;
    f.m = m;
    f.height = height;
    return f;
  }

  void validate() const {
    if (ns.empty()) throw std::invalid_argument("config: empty n list");
    for (auto n : ns) {
      if (n < 1) throw std::invalid_argument("config: every n must be >= 1");
    }
    if (replicas < 1 || samples_per_tree < 1 || k < 1 || j_max < 1) {
      throw std::invalid_argument("config: counts must be >= 1");
    }
    (void)family_spec();
  }

  /// Resolved key/value pairs embedded in every output. The thread count is
  /// left out because it never changes results.
  [[nodiscard]] std::vector<std::pair<std::string, std::string>> resolved() const {
    auto join = [](const auto& v) {
      std::ostringstream os;
      for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
      return os.str();
    };
    std::vector<std::string> zs_text;
    for (double z : zs) zs_text.push_back(format_double(z));
    return {{"family", family_spec().tag()},
            {"n", join(ns)},
            {"replicas", std::to_string(replicas)},
            {"samples_per_tree", std::to_string(samples_per_tree)},
            {"k", std::to_string(k)},
            {"j_max", std::to_string(j_max)},
            {"seed", std::to_string(seed)},
            {"checks", join(checks)},
            {"threshold_file", threshold_file},
            {"tree_file", tree_file},
            {"order_file", order_file},
            {"n_max", std::to_string(n_max)},
            {"z", join(zs_text)},
            {"mc_replicas", std::to_string(mc_replicas)}};
  }

  [[nodiscard]] std::vector<std::string> comment_lines() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : resolved()) out.push_back(key + "=" + value);
    return out;
  }

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    for (const auto& [key, value] : resolved()) j[key] = value;
    return j;
  }

  [[nodiscard]] CheckConfig check_config() const {
    CheckConfig c;
    c.seed = seed;
    c.replicas = replicas;
    c.samples_per_tree = samples_per_tree;
    c.threads = threads;
    c.k = k;
    c.j_max = j_max;
    if (!threshold_file.empty()) {
      std::ifstream in(threshold_file);
      if (!in) throw std::runtime_error("cannot read threshold file " + threshold_file);
      c.thresholds.load(in);
    }
    return c;
  }
};

namespace detail {

inline std::filesystem::path output_dir(const ExperimentConfig& cfg) {
  std::filesystem::path dir(cfg.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + cfg.out);
  }
  return dir;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

inline std::string file_tag(const FamilySpec& f) {
  std::string s;
  for (char c : f.tag()) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '.') ? c : '_';
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s;
}

/// Clock mean for destruction runs; families without a limit package use ln n.
inline double clock_mean(const FamilySpec& f, std::size_t n) {
  if (f.kind == FamilyKind::regular || f.kind == FamilyKind::cayley) {
    return std::max(1.0, std::log(static_cast<double>(n)));
  }
  return std::max(1e-9, limit_model(f).ell(n));
}

}  // namespace detail

/// Writes one tree file per (n, replica); the tree of replica r is the one
/// every other command uses for the same seed.
inline std::vector<std::filesystem::path> cmd_generate(const ExperimentConfig& cfg) {
  cfg.validate();
  const FamilySpec f = cfg.family_spec();
  const auto dir = detail::output_dir(cfg);
  std::vector<std::filesystem::path> written;
  for (std::size_t n : cfg.ns) {
    for (std::size_t r = 0; r < cfg.replicas; ++r) {
      Stream rng = replica_stream(f, n, cfg.seed, r).split(0);
      const RootedTree t = generate(f, n, rng);
      const auto path = dir / ("tree_" + detail::file_tag(f) + "_n" + std::to_string(n) + "_r" +
                               std::to_string(r) + ".txt");
      auto os = detail::open_out(path);
      write_tree(os, t);
      written.push_back(path);
    }
  }
  return written;
}

/// Reads a removal order: whitespace-separated edge ids (child vertices).
inline std::vector<Vertex> read_order(std::istream& is) {
  std::vector<Vertex> order;
  long long v = 0;
  while (is >> v) {
    if (v < 2 || v > std::numeric_limits<Vertex>::max()) {
      throw std::runtime_error("order file: bad edge id " + std::to_string(v));
    }
    order.push_back(static_cast<Vertex>(v));
  }
  if (!is.eof()) throw std::runtime_error("order file: unreadable token");
  return order;
}

namespace detail {

inline void write_destruction(const std::filesystem::path& dir, const std::string& stem,
                              const RootedTree& t, const CutSchedule& s,
                              const std::vector<std::string>& comments) {
  const CutTree ct(t, s);
  const DestructionTrace tr = run_destruction(t, s, ct);
  {
    auto os = open_out(dir / (stem + "_vertices.csv"));
    for (const auto& c : comments) os << "# " << c << '\n';
    write_vertex_csv(os, tr);
  }
  {
    auto os = open_out(dir / (stem + "_jumps.csv"));
    for (const auto& c : comments) os << "# " << c << '\n';
    write_jump_csv(os, tr);
  }
  auto os = open_out(dir / (stem + "_cut.nwk"));
  write_newick(os, ct);
}

}  // namespace detail

/// Runs destruction and cut-tree construction and writes the vertex table,
/// the root-component jumps and the Newick cut-tree. With a tree file the
/// order file (if any) fixes the removal order; otherwise clocks are drawn.
inline void cmd_destroy(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto dir = detail::output_dir(cfg);
  const auto comments = cfg.comment_lines();
  if (!cfg.tree_file.empty()) {
    std::ifstream in(cfg.tree_file);
    if (!in) throw std::runtime_error("cannot read tree file " + cfg.tree_file);
    const Canonicalized c = read_tree(in, "file");
    const RootedTree& t = c.tree;
    if (t.size() < 2 && cfg.order_file.empty()) {
      detail::write_destruction(dir, "destroy_input", t, CutSchedule::from_order(1, {}), comments);
      return;
    }
    CutSchedule s;
    if (!cfg.order_file.empty()) {
      std::ifstream oin(cfg.order_file);
      if (!oin) throw std::runtime_error("cannot read order file " + cfg.order_file);
      auto order = read_order(oin);
      for (auto& v : order) {
        if (v >= c.new_label.size()) throw std::runtime_error("order file: edge id out of range");
        v = c.new_label[v];
      }
      s = CutSchedule::from_order(t.size(), order);
    } else {
      Stream rng = Stream(cfg.seed).split(0);
      s = sample_schedule(t, std::max(1.0, std::log(static_cast<double>(t.size()))), rng);
    }
    detail::write_destruction(dir, "destroy_input", t, s, comments);
    return;
  }
  const FamilySpec f = cfg.family_spec();
  for (std::size_t n : cfg.ns) {
    for (std::size_t r = 0; r < cfg.replicas; ++r) {
      Stream rng = replica_stream(f, n, cfg.seed, r).split(0);
      const RootedTree t = generate(f, n, rng);
      const CutSchedule s = t.size() < 2 ? CutSchedule::from_order(1, {})
                                         : sample_schedule(t, detail::clock_mean(f, t.size()), rng);
      detail::write_destruction(dir,
                                "destroy_" + detail::file_tag(f) + "_n" + std::to_string(n) +
                                    "_r" + std::to_string(r),
                                t, s, comments);
    }
  }
}

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{"H",     "Hprime",          "root_cluster",
                                              "R_process", "gamma",       "Y_depth",
                                              "gp",    "multi_isolation", "merged_blocks"};
  return names;
}

/// One check by name.
inline std::vector<TestReport> run_check(const std::string& name, const FamilySpec& f,
                                         std::size_t n, const CheckConfig& c) {
  if (name == "H") return check_H(f, n, c);
  if (name == "Hprime") return check_Hprime(f, n, c);
  if (name == "root_cluster") return check_root_cluster(f, n, c);
  if (name == "R_process") return check_R_process(f, n, c);
  if (name == "gamma") return check_gamma(f, n, c);
  if (name == "Y_depth") return check_Y_and_depth(f, n, c);
  if (name == "gp") return check_pairwise_gp(f, n, c);
  if (name == "multi_isolation") return check_multi_isolation(f, n, c);
  if (name == "merged_blocks") return check_merged_blocks(f, n, c);
  throw std::invalid_argument("unknown check '" + name + "'");
}

/// Across the n list (in the given order), counts how often a statistic
/// failed to decrease; reported with threshold 0.
inline std::vector<TestReport> trend_reports(const std::vector<TestReport>& reports,
                                             const std::vector<std::size_t>& ns) {
  std::map<std::string, std::vector<std::pair<std::size_t, double>>> series;
  std::map<std::string, TestReport> first;
  for (const auto& r : reports) {
    if (r.statistic != "KS" && r.statistic != "energy" && r.statistic != "sup-norm median") {
      continue;
    }
    const std::string key = r.check + "|" + r.quantity + "|" + r.statistic + "|" + r.reference;
    series[key].emplace_back(r.n, r.value);
    first.emplace(key, r);
  }
  std::vector<TestReport> out;
  if (ns.size() < 2) return out;
  for (const auto& [key, pts] : series) {
    if (pts.size() < 2) continue;
    double increases = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) increases += pts[i].second > pts[i - 1].second;
    TestReport t = first.at(key);
    t.statistic = "trend (non-decreases across n)";
    t.n = pts.back().first;
    t.value = increases;
    t.threshold = 0.0;
    t.p_value = std::numeric_limits<double>::quiet_NaN();
    t.pass = increases == 0.0;
    out.push_back(t);
  }
  return out;
}

struct VerifyResult {
  std::vector<TestReport> reports;
  bool pass = true;
};

/// Runs the selected checks for every n; writes verify.csv and verify.json.
inline VerifyResult cmd_verify(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  cfg.validate();
  if (cfg.checks.empty()) throw std::invalid_argument("verify: empty check list");
  const FamilySpec f = cfg.family_spec();
  const CheckConfig c = cfg.check_config();
  std::vector<std::string> checks;
  for (const auto& name : cfg.checks) {
    if (name == "all") {
      for (const auto& k : known_checks()) {
        if (k != "merged_blocks" || f.kind == FamilyKind::merged) checks.push_back(k);
      }
    } else {
      checks.push_back(name);
    }
  }
  VerifyResult res;
  for (std::size_t n : cfg.ns) {
    for (const auto& name : checks) {
      auto part = run_check(name, f, n, c);
      res.reports.insert(res.reports.end(), part.begin(), part.end());
    }
  }
  auto trends = trend_reports(res.reports, cfg.ns);
  res.reports.insert(res.reports.end(), trends.begin(), trends.end());
  for (const auto& r : res.reports) res.pass = res.pass && r.pass;

  const auto dir = detail::output_dir(cfg);
  {
    auto os = detail::open_out(dir / "verify.csv");
    write_reports_csv(os, res.reports, cfg.comment_lines());
  }
  nlohmann::ordered_json j;
  j["config"] = cfg.to_json();
  j["seed"] = cfg.seed;
  j["reports"] = nlohmann::ordered_json::array();
  std::size_t failed = 0;
  for (const auto& r : res.reports) {
    j["reports"].push_back(to_json(r));
    failed += !r.pass;
  }
  j["summary"] = {{"reports", res.reports.size()}, {"failed", failed}, {"pass", res.pass}};
  {
    auto os = detail::open_out(dir / "verify.json");
    os << j.dump(2) << '\n';
  }
  for (const auto& r : res.reports) {
    log << (r.informational() ? "INFO" : (r.pass ? "PASS" : "FAIL")) << "  " << r.check << "  "
        << r.quantity << "  " << r.statistic << " = " << format_double(r.value);
    if (!r.informational()) log << "  (threshold " << format_double(r.threshold) << ")";
    log << "  n=" << r.n << '\n';
  }
  return res;
}

struct ProfileResult {
  double z0 = 0.0;
  std::vector<BoundReport> bounds;
  bool pass = true;
};

/// z0, the two profile bounds up to n_max, optional table dumps and a
/// DP-versus-Monte-Carlo grid (skipped when mc_replicas < 2).
inline ProfileResult cmd_profile(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  if (cfg.n_max < 1) throw std::invalid_argument("profile: need n_max >= 1");
  const auto dir = detail::output_dir(cfg);
  ProfileResult res;
  res.z0 = find_z0();
  res.bounds = verify_bounds(res.z0, cfg.n_max);
  nlohmann::ordered_json j;
  j["config"] = cfg.to_json();
  j["seed"] = cfg.seed;
  j["z0"] = res.z0;
  j["z0_condition"] = z0_condition(res.z0);
  j["z0_condition_next"] = z0_condition(res.z0 + 1e-6);
  j["bounds"] = nlohmann::ordered_json::array();
  for (const auto& b : res.bounds) {
    res.pass = res.pass && b.pass;
    j["bounds"].push_back({{"bound", b.bound},
                           {"n_max", b.n_max},
                           {"checked", b.checked},
                           {"worst_ratio", b.worst_ratio},
                           {"worst_i", b.worst_i},
                           {"worst_n", b.worst_n},
                           {"pass", b.pass}});
    log << (b.pass ? "PASS" : "FAIL") << "  bound " << b.bound << "  max lhs/rhs = "
        << format_double(b.worst_ratio) << " at (i=" << b.worst_i << ", n=" << b.worst_n << ")\n";
  }
  log << "z0 = " << format_double(res.z0) << '\n';

  std::vector<double> zs = cfg.zs.empty() ? std::vector<double>{0.25, 0.5} : cfg.zs;
  if (cfg.dump_table) {
    for (double z : zs) {
      auto os = detail::open_out(dir / ("profile_table_z" + format_double(z) + ".csv"));
      GFTable(z, cfg.n_max).write_csv(os);
    }
  }

  j["grid"] = nlohmann::ordered_json::array();
  if (cfg.mc_replicas >= 2) {
    auto os = detail::open_out(dir / "profile_grid.csv");
    for (const auto& c : cfg.comment_lines()) os << "# " << c << '\n';
    os << "i,n,z,dp,mc_mean,mc_se,z_score,pass\n";
    std::vector<std::size_t> grid_ns;
    for (std::size_t n : cfg.ns) {
      if (n >= 2) grid_ns.push_back(n);
    }
    for (std::size_t n : grid_ns) {
      std::vector<ProfileQuery> queries;
      for (std::size_t i : {std::size_t{1}, n / 2, n}) {
        for (double z : zs) queries.push_back({i, z});
      }
      const Stream rng = Stream(cfg.seed).split(0x70F11E).split(n);
      const auto est = mc_profile_many(n, queries, cfg.mc_replicas, rng);
      std::map<double, GFTable> tables;
      for (double z : zs) tables.emplace(z, GFTable(z, n));
      for (std::size_t q = 0; q < queries.size(); ++q) {
        const double dp = tables.at(queries[q].z).G(queries[q].i, n);
        const double score = est[q].standard_error > 0
                                 ? std::abs(est[q].mean - dp) / est[q].standard_error
                                 : (est[q].mean == dp ? 0.0 : INFINITY);
        const bool ok = score <= 3.0;
        res.pass = res.pass && ok;
        os << queries[q].i << ',' << n << ',' << format_double(queries[q].z) << ','
           << format_double(dp) << ',' << format_double(est[q].mean) << ','
           << format_double(est[q].standard_error) << ',' << format_double(score) << ','
           << (ok ? "true" : "false") << '\n';
        j["grid"].push_back({{"i", queries[q].i},
                             {"n", n},
                             {"z", queries[q].z},
                             {"dp", dp},
                             {"mc_mean", est[q].mean},
                             {"mc_se", est[q].standard_error},
                             {"pass", ok}});
        log << (ok ? "PASS" : "FAIL") << "  E[G_" << n << "^" << queries[q].i << "("
            << format_double(queries[q].z) << ")] dp=" << format_double(dp)
            << " mc=" << format_double(est[q].mean) << " +- "
            << format_double(est[q].standard_error) << '\n';
      }
    }
  }
  j["pass"] = res.pass;
  auto os = detail::open_out(dir / "profile.json");
  os << j.dump(2) << '\n';
  return res;
}

/// Distance-matrix comparison for every n plus the sampled matrices
/// themselves (plot-ready, scaled by ell/n).
inline VerifyResult cmd_gp_compare(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  cfg.validate();
  const FamilySpec f = cfg.family_spec();
  const CheckConfig c = cfg.check_config();
  const LimitModel m = limit_model(f);
  const auto dir = detail::output_dir(cfg);
  VerifyResult res;
  auto samples = detail::open_out(dir / "gp_samples.csv");
  for (const auto& line : cfg.comment_lines()) samples << "# " << line << '\n';
  samples << "n,replica,sample,i,j,value\n";
  for (std::size_t n : cfg.ns) {
    auto part = check_pairwise_gp(f, n, c);
    res.reports.insert(res.reports.end(), part.begin(), part.end());
    for (std::size_t r = 0; r < c.replicas; ++r) {
      Stream rs = replica_stream(f, n, c.seed, r);
      const Replica rep = make_replica(f, n, m, rs);
      Stream pick = rs.split(5);
      const double scale = rep.ell / static_cast<double>(rep.size());
      for (std::size_t s = 0; s < c.samples_per_tree; ++s) {
        const DistanceMatrix dm = rep.cut->sample_distance_matrix(c.k, pick);
        for (std::size_t a = 0; a <= c.k; ++a) {
          for (std::size_t b = a + 1; b <= c.k; ++b) {
            samples << rep.size() << ',' << r << ',' << s << ',' << a << ',' << b << ','
                    << format_double(scale * dm.at(a, b)) << '\n';
          }
        }
      }
    }
  }
  auto trends = trend_reports(res.reports, cfg.ns);
  res.reports.insert(res.reports.end(), trends.begin(), trends.end());
  for (const auto& r : res.reports) res.pass = res.pass && r.pass;
  auto os = detail::open_out(dir / "gp_compare.csv");
  write_reports_csv(os, res.reports, cfg.comment_lines());
  for (const auto& r : res.reports) {
    log << (r.informational() ? "INFO" : (r.pass ? "PASS" : "FAIL")) << "  " << r.quantity << "  "
        << r.statistic << " = " << format_double(r.value) << "  n=" << r.n << '\n';
  }
  return res;
}

}  // namespace cuttree
