// Generates a small dataset with two correlated feature groups and a response
// driven by one feature from each, then runs the main entry points.

#include <cstdio>
#include <random>
#include <vector>

#include "dcovsel/dcovsel.hpp"

int main() {
  using namespace dcovsel;
  std::mt19937_64 rng(42);
  std::normal_distribution<double> normal;
  const std::size_t n = 300;

  std::vector<std::vector<double>> cols(6, std::vector<double>(n));
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = normal(rng), b = normal(rng);
    for (std::size_t j = 0; j < 3; ++j) cols[j][k] = a + 0.5 * normal(rng);
    for (std::size_t j = 3; j < 6; ++j) cols[j][k] = b + 0.5 * normal(rng);
    y[k] = cols[0][k] + cols[3][k] * cols[3][k] + 0.1 * normal(rng);
  }
  const auto x = standardize(DataMatrix::from_columns(cols, {"a1", "a2", "a3", "b1", "b2", "b3"}));
  const auto response = DataMatrix::from_columns({y}, {"y"});

  std::printf("dcor2(a1, y) = %.4f\n", sample_dcor2(x, {0}, response, {0}, {}));

  const auto diverse = minimal_maximizers(build_cache(x, {}));
  std::printf("minimal maximizers (objective %.4f):\n", diverse.objective);
  for (const auto& c : diverse.clusters) {
    for (auto j : c.members) std::printf(" %s", x.name(j).c_str());
    std::printf("\n");
  }

  const auto relevant = kww_select(x, response, {});
  std::printf("relevant:");
  for (auto j : relevant.selected) std::printf(" %s", x.name(j).c_str());
  std::printf("\n");

  PipelineConfig cfg;
  cfg.mode = PipelineMode::diverse_then_kww;
  const auto report = run_pipeline(x, response, cfg);
  std::printf("diverse then relevant:");
  for (auto j : report.final_selection) std::printf(" %s", x.name(j).c_str());
  std::printf("\n");

  const auto tiers = diversity_ordering(x, {});
  for (std::size_t t = 0; t < tiers.size(); ++t) {
    std::printf("tier %zu:", t + 1);
    for (auto j : tiers[t].features) std::printf(" %s", x.name(j).c_str());
    std::printf("\n");
  }
}
