#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "cuttree/profile_gf.hpp"
#include "oracles/oracles.hpp"

using namespace cuttree;

TEST(ProfileGF, ExpectedDegree) {
  EXPECT_DOUBLE_EQ(expected_degree(1, 2), 1.5);
  EXPECT_DOUBLE_EQ(expected_degree(1, 3), 15.0 / 8.0);
  EXPECT_DOUBLE_EQ(expected_degree(2, 3), 15.0 / 8.0);
  for (std::size_t n = 1; n < 50; ++n) EXPECT_DOUBLE_EQ(expected_degree(n + 1, n), 1.0);
  EXPECT_THROW(expected_degree(5, 3), std::out_of_range);
  EXPECT_THROW(expected_degree(0, 3), std::out_of_range);
}

TEST(ProfileGF, SmallValues) {
  EXPECT_DOUBLE_EQ(expected_gf(1, 1, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(expected_gf(2, 1, 0.3), 1.0);
  for (double z : {0.1, 0.5, 0.9}) EXPECT_NEAR(expected_gf(3, 2, z), 1.0 + z, 1e-15);
  EXPECT_NEAR(expected_gf(1, 3, 0.5), (3.5 / 2.0) * (5.5 / 4.0), 1e-15);
  EXPECT_DOUBLE_EQ(GFTable(0.5, 10).G(6, 3), 0.0);
  EXPECT_THROW(expected_gf(1, 3, 1.0), std::invalid_argument);
  EXPECT_THROW(expected_gf(1, 3, 0.0), std::invalid_argument);
  EXPECT_THROW(expected_gf(9, 3, 0.5), std::out_of_range);
}

// Exact expectations by enumerating every degree-biased tree with up to six
// edges in rational arithmetic.
TEST(ProfileGF, MatchesExactEnumeration) {
  const oracle::Rational z(2, 7);
  const double zd = 2.0 / 7.0;
  const GFTable table(zd, 6);
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto trees = oracle::scale_free_trees(n);
    oracle::Rational total = 0;
    for (const auto& tp : trees) total += tp.second;
    ASSERT_EQ(total, 1);
    for (std::size_t i = 1; i <= n + 1; ++i) {
      oracle::Rational g = 0;
      oracle::Rational gz = 0;
      oracle::Rational deg = 0;
      for (const auto& [t, p] : trees) {
        const auto gi = oracle::exact_profile(t, Vertex(i), z);
        std::size_t d = i == 1 ? 0 : 1;
        for (Vertex v = 2; v <= t.size(); ++v) d += t.parent(v) == i;
        g += p * gi;
        gz += p * gi * d;
        deg += p * d;
      }
      EXPECT_NEAR(table.G(i, n), static_cast<double>(g), 1e-14) << "i=" << i << " n=" << n;
      EXPECT_NEAR(table.GZ(i, n), static_cast<double>(gz), 1e-14) << "i=" << i << " n=" << n;
      EXPECT_NEAR(table.Z(i, n), static_cast<double>(deg), 1e-14) << "i=" << i << " n=" << n;
      EXPECT_NEAR(expected_degree(i, n), static_cast<double>(deg), 1e-14);
    }
  }
}

TEST(ProfileGF, TwoEvaluationPathsAgree) {
  const GFTable table(0.37, 300);
  for (std::size_t i = 3; i <= 301; ++i) {
    const double direct = table.G(i, i - 1);
    ASSERT_NEAR(table.seed_from_joint_moments(i), direct, 1e-10 * direct) << i;
  }
  for (std::size_t n : {1UL, 7UL, 120UL, 300UL}) {
    for (std::size_t i = 1; i <= n + 1; ++i) {
      const double gz = table.GZ(i, n);
      ASSERT_NEAR(table.joint_moment_closed_form(i, n), gz, 1e-10 * gz);
    }
  }
}

TEST(ProfileGF, ZeroArgumentGivesDegree) {
  const GFTable table(0.0, 200);
  for (std::size_t n : {1UL, 50UL, 200UL}) {
    for (std::size_t i = 1; i <= n + 1; ++i) {
      ASSERT_NEAR(table.G(i, n), table.Z(i, n), 1e-12 * table.Z(i, n));
    }
  }
}

TEST(ProfileGF, FindZ0) {
  EXPECT_NEAR(z0_condition(0.0), 1.0 / std::sqrt(3.0), 1e-15);
  double prev = z0_condition(0.0);
  for (int k = 1; k < 10000; ++k) {
    const double c = z0_condition(k / 10000.0);
    ASSERT_GT(c, prev);
    prev = c;
  }
  const double z0 = find_z0();
  EXPECT_GT(z0, 0.0);
  EXPECT_LT(z0, 1.0);
  EXPECT_LE(z0_condition(z0), 1.0);
  EXPECT_GT(z0_condition(z0 + 1e-6), 1.0);
}

TEST(ProfileGF, BoundsHold) {
  const double z0 = find_z0();
  const auto reports = verify_bounds(z0, 2000);
  ASSERT_EQ(reports.size(), 2U);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.bound << " " << r.worst_ratio;
  const GFTable table(z0, 3);
  EXPECT_DOUBLE_EQ(table.G(2, 1), 1.0);
  EXPECT_LE(table.G(3, 2), std::pow(2.0, (1 + z0) / 2));
  const auto tiny = verify_bounds(z0, 1);
  for (const auto& r : tiny) EXPECT_TRUE(r.pass);
}

TEST(ProfileGF, MonteCarloSmall) {
  const Stream rng(4);
  const auto one = mc_profile(1, 1, 0.4, 100, rng);
  EXPECT_DOUBLE_EQ(one.mean, 1.0);
  EXPECT_DOUBLE_EQ(one.standard_error, 0.0);
  const auto e = mc_profile(3, 2, 0.4, 100000, rng);
  EXPECT_NEAR(e.mean, 1.4, 3.0 * e.standard_error);
  const auto d = mc_profile(1, 3, 0.5, 200000, rng);
  EXPECT_NEAR(d.mean, 2.40625, 3.0 * d.standard_error);
}

TEST(ProfileGF, CsvDump) {
  std::ostringstream os;
  GFTable(0.5, 2).write_csv(os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "i,n,z,E_G,E_GZ,E_Z");
  std::size_t lines = 0;
  for (char c : os.str()) lines += c == '\n';
  EXPECT_EQ(lines, 1U + 2U + 3U);
}
