#include <gtest/gtest.h>

#include "dcovsel/oracle.hpp"
#include "dcovsel/pipeline.hpp"
#include "test_support.hpp"

namespace dcovsel {
namespace {

using testing::Rng;

struct Planted {
  DataMatrix x;
  DataMatrix y;
};

// Features 0..2 drive the response; 3..5 share a latent factor but are irrelevant.
Planted planted(Rng& rng, std::size_t n = 150) {
  std::vector<std::vector<double>> cols;
  const auto z = testing::gaussian(rng, n);
  for (int j = 0; j < 6; ++j) {
    auto c = testing::gaussian(rng, n);
    if (j >= 3) {
      for (std::size_t k = 0; k < n; ++k) c[k] = 0.4 * c[k] + z[k];
    }
    cols.push_back(std::move(c));
  }
  auto y = testing::gaussian(rng, n, 0.2);
  for (std::size_t k = 0; k < n; ++k) y[k] += 2.0 * cols[0][k] + 1.0 * cols[1][k] + 0.5 * cols[2][k];
  return {DataMatrix::from_columns(cols), DataMatrix::from_columns({y}, {"y"})};
}

PipelineConfig mode(PipelineMode m, std::optional<double> alpha = std::nullopt) {
  PipelineConfig cfg;
  cfg.mode = m;
  cfg.alpha = alpha;
  return cfg;
}

TEST(PipelineConfig, AlphaIffControlled) {
  EXPECT_THROW(mode(PipelineMode::controlled).validate(), InvalidArgument);
  EXPECT_THROW(mode(PipelineMode::kww_then_diverse, 0.1).validate(), InvalidArgument);
  EXPECT_NO_THROW(mode(PipelineMode::controlled, 0.1).validate());
  EXPECT_EQ(parse_pipeline_mode("diverse_then_kww"), PipelineMode::diverse_then_kww);
  EXPECT_THROW(parse_pipeline_mode("both"), InvalidArgument);
}

TEST(ControlledSelect, ZeroAlphaReducesToDiverseSelection) {
  Rng rng(1);
  const auto d = planted(rng);
  const auto report = controlled_select(d.x, d.y, mode(PipelineMode::controlled, 0.0));
  ASSERT_EQ(report.stages.size(), 2u);
  EXPECT_EQ(report.stages[0].selected, ColumnSet::range(6));
  const auto direct = minimal_maximizers(build_cache(d.x, {}));
  EXPECT_EQ(report.final_selection, direct.members());
  EXPECT_DOUBLE_EQ(*report.stages[1].objective, direct.objective);
}

TEST(ControlledSelect, AlphaAboveEveryMarginalFails) {
  Rng rng(2);
  const auto d = planted(rng);
  EXPECT_THROW(controlled_select(d.x, d.y, mode(PipelineMode::controlled, 1.01)), DataError);
}

TEST(ControlledSelect, DiverseStageMatchesOracleOnControlledSet) {
  Rng rng(3);
  const auto d = planted(rng);
  const auto ranking = marginal_ranking(d.x, d.y, {});
  // Threshold halfway between the 4th and 5th strongest marginal keeps four.
  const double alpha = 0.5 * (ranking.ranked[3].dcor2 + ranking.ranked[4].dcor2);
  const auto report = controlled_select(d.x, d.y, mode(PipelineMode::controlled, alpha));
  const auto& kept = report.stages[0].selected;
  ASSERT_EQ(kept.size(), 4u);

  const auto oracle = enumerate_m_pi(build_cache(d.x, kept, {}));
  std::vector<SubsetMask> expected;
  for (auto m : oracle.minimal_maximizers) {
    std::vector<std::size_t> mapped;
    for (auto local : mask_to_set(m)) mapped.push_back(kept[local]);
    expected.push_back(set_to_mask(ColumnSet(mapped)));
  }
  std::vector<SubsetMask> got;
  for (const auto& c : report.stages[1].clusters) got.push_back(set_to_mask(c));
  std::sort(expected.begin(), expected.end());
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, expected);
}

TEST(TwoStage, KwwThenDiverseNeedsTwoRelevantFeatures) {
  Rng rng(4);
  const std::size_t n = 200;
  const auto a = testing::gaussian(rng, n);
  // The response is a copy of feature 0, so adding anything else lowers dcov.
  const auto x = DataMatrix::from_columns({a, testing::gaussian(rng, n), testing::gaussian(rng, n)});
  const auto y = DataMatrix::from_columns({a}, {"y"});
  try {
    two_stage(x, y, mode(PipelineMode::kww_then_diverse));
    FAIL() << "expected a stage-empty error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("diverse stage needs at least 2"), std::string::npos);
  }
}

TEST(TwoStage, DiverseThenKwwStaysInsideDiverseUnion) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = planted(rng);
    const auto report = two_stage(d.x, d.y, mode(PipelineMode::diverse_then_kww));
    ASSERT_EQ(report.stages.size(), 2u);
    for (auto j : report.final_selection) EXPECT_TRUE(report.stages[0].selected.contains(j));
  }
}

TEST(TwoStage, ReportFieldsRecomputeFromRawData) {
  Rng rng(6);
  const auto d = planted(rng, 120);
  for (auto m : {PipelineMode::kww_then_diverse, PipelineMode::diverse_then_kww}) {
    const auto report = two_stage(d.x, d.y, mode(m));
    for (const auto& stage : report.stages) {
      EXPECT_EQ(stage.selected_names, d.x.names_of(stage.selected));
      if (stage.name == "relevant") {
        for (std::size_t k = 0; k < stage.selected.size(); ++k) {
          EXPECT_NEAR(stage.scores[k], sample_dcor2(d.x, {stage.selected[k]}, d.y, {0}, {}), 1e-12);
          const ColumnSet prefix(std::vector<std::size_t>(stage.selected.begin(), stage.selected.begin() + k + 1));
          EXPECT_NEAR(stage.trace[k], std::sqrt(sample_dcov2(d.x, prefix, d.y, {0}, {})), 1e-10);
        }
      } else {
        ASSERT_EQ(stage.name, "diverse");
        for (const auto& c : stage.clusters) {
          // M_pi of a cluster, recomputed with direct dcov2 calls over the stage's ground set.
          const auto& ground = (m == PipelineMode::kww_then_diverse) ? report.stages[0].selected : ColumnSet::range(6);
          double value = std::numeric_limits<double>::infinity();
          for (auto i : ground) {
            if (c.contains(i)) continue;
            double link = 0.0;
            for (auto j : c) link -= sample_dcov2(d.x, {i}, {j}, {});
            value = std::min(value, link);
          }
          EXPECT_NEAR(*stage.objective, value, 1e-12);
        }
      }
    }
    // Stage containment.
    for (auto j : report.final_selection) EXPECT_TRUE(report.stages[0].selected.contains(j));
  }
}

}  // namespace
}  // namespace dcovsel
