#include <cstdlib>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cuttree/experiment.hpp"

namespace {

template <class T>
std::vector<T> split_list(const std::vector<std::string>& items) {
  std::vector<T> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      std::istringstream is(tok);
      T v{};
      if (!(is >> v) || !is.eof()) throw CLI::ValidationError("bad list entry '" + tok + "'");
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using cuttree::ExperimentConfig;
  ExperimentConfig cfg;
  CLI::App app{"Random edge-cutting destruction of rooted trees and the associated cut-tree"};
  app.set_config("--config", "", "flat key = value file; command-line flags override it");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  std::vector<std::string> ns_raw{"1000"};
  std::vector<std::string> ds_raw{"2,4"};
  std::vector<std::string> checks_raw;
  std::vector<std::string> zs_raw;

  app.add_option("--family", cfg.family, "urt | bst | bary | scale_free | merged | regular | cayley")
      ->check(CLI::IsMember({"urt", "bst", "bary", "scale_free", "sf", "merged", "regular", "cayley"}));
  app.add_option("--n", ns_raw, "tree size(s), comma separated")->delimiter(',');
  app.add_option("--replicas", cfg.replicas)->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--alpha", cfg.alpha, "scale-free attachment parameter")->check(CLI::Range(-1.0, 1e9));
  app.add_option("--b", cfg.b, "b-ary branching factor")->check(CLI::Range(2U, 1U << 20));
  app.add_option("--ds", ds_raw, "merged degrees, comma separated")->delimiter(',');
  app.add_option("--m", cfg.m, "merged scale (0: ln n)");
  app.add_option("--d", cfg.d, "regular degree")->check(CLI::Range(1U, 1U << 20));
  app.add_option("--height", cfg.height, "regular height");
  app.add_option("--j-max", cfg.j_max)->check(CLI::PositiveNumber);
  app.add_option("--k", cfg.k, "distance-matrix size")->check(CLI::PositiveNumber);
  app.add_option("--samples-per-tree", cfg.samples_per_tree)->check(CLI::PositiveNumber);
  app.add_option("--threads", cfg.threads)->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--threshold-file", cfg.threshold_file, "key = value threshold overrides");

  auto* gen = app.add_subcommand("generate", "write sampled trees");
  gen->fallthrough();
  auto* destroy = app.add_subcommand("destroy", "destruction trace and cut-tree per replica");
  destroy->fallthrough();
  destroy->add_option("--tree-file", cfg.tree_file, "tree to destroy instead of sampling");
  destroy->add_option("--order-file", cfg.order_file, "removal order (edge ids = child labels)");
  auto* verify = app.add_subcommand("verify", "run limit-law checks");
  verify->fallthrough();
  verify->add_option("--checks", checks_raw, "check names or 'all'")->delimiter(',');
  auto* profile = app.add_subcommand("profile", "expected profile recurrences and bounds");
  profile->fallthrough();
  profile->add_option("--n-max", cfg.n_max);
  profile->add_option("--z", zs_raw, "z values for the grid and table dump")->delimiter(',');
  profile->add_option("--mc-replicas", cfg.mc_replicas, "Monte Carlo replicas (0 skips the grid)");
  profile->add_flag("--dump-table", cfg.dump_table, "write the DP tables");
  auto* gp = app.add_subcommand("gp-compare", "distance matrices against the limit model");
  gp->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    cfg.ns = split_list<std::size_t>(ns_raw);
    cfg.ds = split_list<unsigned>(ds_raw);
    cfg.checks = checks_raw;
    cfg.zs = split_list<double>(zs_raw);
    if (gen->parsed()) {
      for (const auto& p : cuttree::cmd_generate(cfg)) std::cout << p.string() << '\n';
      return 0;
    }
    if (destroy->parsed()) {
      cuttree::cmd_destroy(cfg);
      return 0;
    }
    if (verify->parsed()) {
      if (cfg.checks.empty()) cfg.checks = {"all"};
      return cuttree::cmd_verify(cfg).pass ? 0 : 1;
    }
    if (profile->parsed()) {
      if (app.count("--n") == 0) cfg.ns = {100, 500};
      return cuttree::cmd_profile(cfg).pass ? 0 : 1;
    }
    if (gp->parsed()) return cuttree::cmd_gp_compare(cfg).pass ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
