#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cuttree/experiment.hpp"
#include "fixtures.hpp"

using namespace cuttree;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cuttree_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Experiment, GenerateGolden) {
  ExperimentConfig cfg;
  cfg.family = "urt";
  cfg.ns = {10};
  cfg.seed = 1;
  cfg.out = scratch("gen").string();
  const auto files = cmd_generate(cfg);
  ASSERT_EQ(files.size(), 1U);
  EXPECT_EQ(files[0].filename(), "tree_urt_n10_r0.txt");
  EXPECT_EQ(slurp(files[0]), slurp(fs::path(CUTTREE_GOLDEN_DIR) / "tree_urt_n10_r0.txt"));

  cfg.ns = {1};
  EXPECT_EQ(slurp(cmd_generate(cfg).at(0)), "1\n");

  cfg.family = "gw";
  EXPECT_THROW(cmd_generate(cfg), std::invalid_argument);
}

TEST(Experiment, DestroyElevenVertexFromFiles) {
  const fs::path dir = scratch("destroy");
  {
    std::ofstream t(dir / "tree.txt");
    write_tree(t, fixtures::eleven_tree());
    std::ofstream o(dir / "order.txt");
    for (Vertex v : fixtures::eleven_order()) o << v << '\n';
  }
  ExperimentConfig cfg;
  cfg.tree_file = (dir / "tree.txt").string();
  cfg.order_file = (dir / "order.txt").string();
  cfg.out = (dir / "out").string();
  cmd_destroy(cfg);
  EXPECT_EQ(slurp(dir / "out" / "destroy_input_cut.nwk"), std::string(fixtures::eleven_newick()) + "\n");
  const std::string vertices = slurp(dir / "out" / "destroy_input_vertices.csv");
  EXPECT_NE(vertices.find("vertex,Gamma,Y,Nres,depth\n1,inf,4,0,4\n"), std::string::npos);
}

TEST(Experiment, DestroyTwoVerticesAndReplay) {
  ExperimentConfig cfg;
  cfg.family = "urt";
  cfg.ns = {2, 500};
  cfg.replicas = 2;
  cfg.seed = 5;
  cfg.out = scratch("replay_a").string();
  cmd_destroy(cfg);
  const std::string nwk = slurp(fs::path(cfg.out) / "destroy_urt_n2_r0_cut.nwk");
  EXPECT_EQ(nwk, "(1,2);\n");
  const std::string a = slurp(fs::path(cfg.out) / "destroy_urt_n500_r1_jumps.csv");
  cfg.out = scratch("replay_b").string();
  cfg.threads = 3;
  cmd_destroy(cfg);
  EXPECT_EQ(a, slurp(fs::path(cfg.out) / "destroy_urt_n500_r1_jumps.csv"));
}

TEST(Experiment, VerifyRejectsEmptyCheckList) {
  ExperimentConfig cfg;
  cfg.out = scratch("verify_empty").string();
  EXPECT_THROW(cmd_verify(cfg), std::invalid_argument);
  cfg.checks = {"no_such_check"};
  EXPECT_THROW(cmd_verify(cfg), std::invalid_argument);
}

TEST(Experiment, VerifyTrendAndDeterminism) {
  ExperimentConfig cfg;
  cfg.family = "urt";
  cfg.ns = {1000, 10000, 100000};
  cfg.replicas = 10;
  cfg.samples_per_tree = 10;
  cfg.checks = {"Y_depth", "root_cluster"};
  cfg.out = scratch("verify_a").string();
  std::ostringstream log;
  const auto res = cmd_verify(cfg, log);
  std::size_t trends = 0;
  for (const auto& r : res.reports) {
    if (r.statistic.rfind("trend", 0) == 0) {
      ++trends;
      EXPECT_EQ(r.pass, r.value == 0.0);
    }
  }
  EXPECT_EQ(trends, 3U);  // Y KS, depth KS, sup-norm median
  const std::string json = slurp(fs::path(cfg.out) / "verify.json");
  const std::string csv = slurp(fs::path(cfg.out) / "verify.csv");
  EXPECT_NE(json.find("\"config\""), std::string::npos);
  EXPECT_EQ(csv.rfind("# family=urt\n", 0), 0U);

  cfg.out = scratch("verify_b").string();
  cfg.threads = 2;
  cmd_verify(cfg, log);
  EXPECT_EQ(json, slurp(fs::path(cfg.out) / "verify.json"));
  EXPECT_EQ(csv, slurp(fs::path(cfg.out) / "verify.csv"));
}

TEST(Experiment, ProfileSmall) {
  ExperimentConfig cfg;
  cfg.n_max = 1;
  cfg.mc_replicas = 0;
  cfg.out = scratch("profile").string();
  std::ostringstream log;
  const auto res = cmd_profile(cfg, log);
  EXPECT_TRUE(res.pass);
  EXPECT_GT(res.z0, 0.0);
  EXPECT_NE(log.str().find("z0 = "), std::string::npos);

  cfg.n_max = 50;
  cfg.ns = {20};
  cfg.mc_replicas = 2000;
  cfg.dump_table = true;
  cfg.zs = {0.5};
  const auto grid = cmd_profile(cfg, log);
  EXPECT_TRUE(fs::exists(fs::path(cfg.out) / "profile_grid.csv"));
  EXPECT_TRUE(fs::exists(fs::path(cfg.out) / "profile_table_z0.5.csv"));
  EXPECT_EQ(grid.bounds.size(), 2U);
}

TEST(Experiment, ConfigValidation) {
  ExperimentConfig cfg;
  cfg.replicas = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.replicas = 1;
  cfg.ns = {};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.ns = {10};
  cfg.threads = 8;
  ExperimentConfig other = cfg;
  other.threads = 1;
  EXPECT_EQ(cfg.comment_lines(), other.comment_lines());
}

TEST(Experiment, CommandLine) {
  const fs::path dir = scratch("cli");
  const std::string cli = CUTTREE_CLI;
  EXPECT_NE(std::system((cli + " generate --family gw --out " + dir.string() + " > /dev/null 2>&1").c_str()), 0);
  EXPECT_EQ(std::system((cli + " generate --family urt --n 10 --seed 1 --out " + dir.string() + " > /dev/null").c_str()), 0);
  EXPECT_EQ(slurp(dir / "tree_urt_n10_r0.txt"), slurp(fs::path(CUTTREE_GOLDEN_DIR) / "tree_urt_n10_r0.txt"));
  {
    std::ofstream conf(dir / "run.ini");
    conf << "family = bst\nn = 12\nseed = 3\n";
  }
  EXPECT_EQ(std::system((cli + " --config " + (dir / "run.ini").string() + " generate --out " + dir.string() + " > /dev/null").c_str()), 0);
  EXPECT_TRUE(fs::exists(dir / "tree_bst_n12_r0.txt"));
}
