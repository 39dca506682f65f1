#include <gtest/gtest.h>

#include <cmath>

#include "dcovsel/oracle.hpp"
#include "test_support.hpp"

namespace dcovsel {
namespace {

using testing::Rng;

TEST(EnumerateMPi, ConstantCacheSingletons) {
  const auto r = enumerate_m_pi(testing::constant_cache(3, 0.7));
  EXPECT_EQ(r.minimal_maximizers, (std::vector<SubsetMask>{0b001, 0b010, 0b100}));
  EXPECT_EQ(r.maximizers, r.minimal_maximizers);
  EXPECT_DOUBLE_EQ(r.best, -0.7);
  EXPECT_TRUE(union_decomposition_check(r));
}

TEST(EnumerateMPi, HandCacheValues) {
  const auto r = enumerate_m_pi(testing::hand_cache());
  EXPECT_DOUBLE_EQ(r.values[0b001], -0.9);  // {0}: min(-0.9, -0.1)
  EXPECT_DOUBLE_EQ(r.values[0b010], -0.9);  // {1}: min(-0.9, -0.5)
  EXPECT_DOUBLE_EQ(r.values[0b100], -0.5);  // {2}: min(-0.1, -0.5)
  EXPECT_DOUBLE_EQ(r.values[0b011], -0.6);  // {0,1}: pi(2) = -(0.1 + 0.5)
  EXPECT_DOUBLE_EQ(r.values[0b101], -1.4);  // {0,2}: pi(1) = -(0.9 + 0.5)
  EXPECT_DOUBLE_EQ(r.values[0b110], -1.0);  // {1,2}: pi(0) = -(0.9 + 0.1)
  EXPECT_TRUE(std::isnan(r.values[0]));
  EXPECT_TRUE(std::isnan(r.values[0b111]));
  EXPECT_EQ(r.minimal_maximizers, (std::vector<SubsetMask>{0b100}));
}

TEST(EnumerateMPi, SizeGuard) {
  EXPECT_THROW(enumerate_m_pi(testing::constant_cache(21, 0.1)), SizeError);
  EXPECT_THROW(enumerate_m_pi(testing::constant_cache(1, 0.1)), InvalidArgument);
}

TEST(EnumerateMPi, MinimalMaximizersAreMinimalMaximizers) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = enumerate_m_pi(testing::random_cache(rng, 6));
    for (auto m : r.minimal_maximizers) {
      EXPECT_NE(std::find(r.maximizers.begin(), r.maximizers.end(), m), r.maximizers.end());
      for (auto other : r.minimal_maximizers) {
        if (other != m) EXPECT_NE(other & m, other);
      }
    }
    EXPECT_EQ(r.values.size(), 64u);
  }
}

TEST(UnionDecomposition, SingleMaximizerIsTrivial) {
  const auto r = enumerate_m_pi(testing::hand_cache());
  ASSERT_EQ(r.maximizers.size(), 1u);
  EXPECT_TRUE(union_decomposition_check(r));
}

TEST(UnionDecomposition, DetectsAMaximizerNotCoveredByMinimalOnes) {
  auto r = enumerate_m_pi(testing::constant_cache(3, 0.7));
  r.maximizers.push_back(0b011);
  r.minimal_maximizers = {0b001};
  EXPECT_FALSE(union_decomposition_check(r));
}

TEST(UnionDecomposition, HoldsOnRandomCaches) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = 2 + static_cast<std::size_t>(rng() % 7);
    EXPECT_TRUE(union_decomposition_check(enumerate_m_pi(testing::random_cache(rng, p))));
  }
}

TEST(QuasiConcavity, ExhaustiveOnSmallCaches) {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto r = enumerate_m_pi(build_cache(testing::block_data(rng, 30, 7), {}));
    EXPECT_EQ(quasi_concavity_violations(r), 0u);
    EXPECT_EQ(intersection_closure_violations(r), 0u);
  }
}

TEST(QuasiConcavity, DetectsAViolation) {
  auto r = enumerate_m_pi(testing::hand_cache());
  r.values[0b001] = -10.0;  // below min(M({0,1}), M({0,2}))
  EXPECT_GT(quasi_concavity_violations(r), 0u);
}

TEST(ScalingExperiment, SingleFeatureIsDegenerate) {
  Rng rng(4);
  const auto x = DataMatrix::from_columns({testing::gaussian(rng, 30)});
  const auto y = DataMatrix::from_columns({testing::gaussian(rng, 30)}, {"y"});
  const auto r = power_set_dependence_experiment(x, y, {}, false);
  EXPECT_EQ(r.rho_E.size(), 1u);
  EXPECT_EQ(r.rho_of_rho_nu, 0.0);
}

TEST(ScalingExperiment, ListsCoverEveryNonemptySubset) {
  Rng rng(5);
  const auto x = testing::block_data(rng, 40, 4);
  auto yv = testing::gaussian(rng, 40);
  for (std::size_t k = 0; k < 40; ++k) yv[k] += x(k, 0);
  const auto y = DataMatrix::from_columns({yv}, {"y"});
  const auto r = power_set_dependence_experiment(x, y, {}, false);
  ASSERT_EQ(r.rho_E.size(), 15u);
  ASSERT_EQ(r.nu_E.size(), 15u);
  for (SubsetMask m = 1; m < 16; ++m) {
    EXPECT_NEAR(r.nu_E[m - 1], sample_dcov2(x, mask_to_set(m), y, {0}, {}), 1e-12);
    EXPECT_NEAR(r.rho_E[m - 1], sample_dcor2(x, mask_to_set(m), y, {0}, {}), 1e-12);
  }
  EXPECT_GE(r.rho_of_rho_nu, 0.0);
  EXPECT_LE(r.rho_of_rho_nu, 1.0);
}

TEST(ScalingExperiment, StandardizationHelpsWithHeterogeneousScales) {
  Rng rng(6);
  int better = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto base = testing::block_data(rng, 200, 6);
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < 6; ++j) {
      const double scale = std::pow(10.0, static_cast<double>(j % 3) * 1.5 - 1.0);
      std::vector<double> c(base.column(j).begin(), base.column(j).end());
      for (auto& v : c) v *= scale;
      cols.push_back(c);
    }
    const auto x = DataMatrix::from_columns(cols);
    auto yv = testing::gaussian(rng, 200);
    for (std::size_t k = 0; k < 200; ++k) yv[k] += base(k, 0) + base(k, 3) + base(k, 5);
    const auto y = DataMatrix::from_columns({yv}, {"y"});
    const auto raw = power_set_dependence_experiment(x, y, {}, false);
    const auto std = power_set_dependence_experiment(x, y, {}, true);
    EXPECT_TRUE(std.standardized);
    if (std.rho_of_rho_nu >= raw.rho_of_rho_nu) ++better;
  }
  EXPECT_GE(better, 9);
}

}  // namespace
}  // namespace dcovsel
