#pragma once

// Enumeration of all inclusion-minimal maximizers of M_pi.
//
// From every start feature a pi-series is grown greedily (each step appends
// the outside feature with the smallest linkage to the current prefix). The
// shortest prefix attaining the largest recorded step value is that series'
// pi-cluster. Every inclusion-minimal maximizer is the pi-cluster of the
// series started from any of its members, so keeping the distinct clusters
// of best value yields exactly the minimal maximizers in O(p^3).

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "dcovsel/data_matrix.hpp"
#include "dcovsel/error.hpp"
#include "dcovsel/linkage.hpp"
#include "dcovsel/parallel.hpp"

namespace dcovsel {

struct PiSeries {
  /// Permutation of all features, starting with the seed feature.
  std::vector<std::size_t> order;
  /// step_values[k-1] = pi(order[k], {order[0..k-1]}) for k = 1..p-1.
  std::vector<double> step_values;
};

struct PiCluster {
  ColumnSet members;
  double value = 0.0;
  std::size_t origin_start = 0;
};

struct MinimalMaximizerResult {
  std::vector<PiCluster> clusters;
  double objective = 0.0;

  /// Union of all clusters, in cluster order.
  ColumnSet members() const {
    std::vector<std::size_t> out;
    for (const auto& c : clusters) out.insert(out.end(), c.members.begin(), c.members.end());
    return ColumnSet(std::move(out));
  }
};

/// Greedy pi-series from `start`. Near-ties (within the cache tolerance)
/// go to the lowest feature index.
inline PiSeries build_pi_series(std::size_t start, const PairwiseDCovCache& cache, double eps = 1e-12) {
  const auto p = cache.size();
  if (p < 2) throw InvalidArgument("pi-series needs at least 2 features");
  if (start >= p) throw InvalidArgument("start feature out of range");
  const double tol = cache.tolerance(eps);

  PiSeries series;
  series.order.reserve(p);
  series.step_values.reserve(p - 1);
  std::vector<bool> used(p, false);
  // link[i] tracks pi(i, prefix), summed in prefix order.
  std::vector<double> link(p, 0.0);

  auto append = [&](std::size_t t) {
    used[t] = true;
    series.order.push_back(t);
    for (std::size_t i = 0; i < p; ++i) {
      if (!used[i]) link[i] -= cache(i, t);
    }
  };
  append(start);

  while (series.order.size() < p) {
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p; ++i) {
      if (!used[i]) lowest = std::min(lowest, link[i]);
    }
    std::size_t next = p;
    for (std::size_t i = 0; i < p; ++i) {
      if (!used[i] && link[i] <= lowest + tol) {
        next = i;
        break;
      }
    }
    series.step_values.push_back(link[next]);
    append(next);
  }
  return series;
}

/// Shortest prefix of `series` whose step value attains the maximum.
inline PiCluster extract_pi_cluster(const PiSeries& series, const PairwiseDCovCache& cache,
                                    double eps = 1e-12) {
  if (series.order.size() != cache.size() || series.step_values.size() + 1 != series.order.size()) {
    throw InvalidArgument("pi-series does not match the cache ground set");
  }
  const double tol = cache.tolerance(eps);
  const double best = *std::max_element(series.step_values.begin(), series.step_values.end());
  std::size_t k = 1;
  while (series.step_values[k - 1] < best - tol) ++k;

  PiCluster cluster;
  cluster.members = ColumnSet(std::vector<std::size_t>(series.order.begin(), series.order.begin() + k));
  cluster.value = series.step_values[k - 1];
  cluster.origin_start = series.order.front();
  return cluster;
}

/// All inclusion-minimal maximizers of M_pi over nonempty proper subsets.
/// Clusters are reported in order of the first start feature that produced them.
inline MinimalMaximizerResult minimal_maximizers(const PairwiseDCovCache& cache, double eps = 1e-12,
                                                 unsigned threads = 1) {
  const auto p = cache.size();
  if (p < 2) throw InvalidArgument("minimal maximizers need at least 2 features");
  const double tol = cache.tolerance(eps);

  std::vector<PiCluster> per_start(p);
  parallel_for(p, threads, [&](std::size_t start) {
    per_start[start] = extract_pi_cluster(build_pi_series(start, cache, eps), cache, eps);
  });

  // Distinct clusters, first occurrence wins.
  std::vector<PiCluster> distinct;
  std::vector<ColumnSet> keys;
  for (auto& c : per_start) {
    auto key = c.members.sorted();
    if (std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
    keys.push_back(std::move(key));
    c.value = m_pi(c.members, cache);
    distinct.push_back(std::move(c));
  }

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : distinct) best = std::max(best, c.value);

  std::vector<std::size_t> winners;
  for (std::size_t k = 0; k < distinct.size(); ++k) {
    if (distinct[k].value >= best - tol) winners.push_back(k);
  }

  auto strictly_contains = [&](std::size_t big, std::size_t small) {
    const auto& b = keys[big];
    const auto& s = keys[small];
    return s.size() < b.size() && std::includes(b.begin(), b.end(), s.begin(), s.end());
  };

  MinimalMaximizerResult result;
  result.objective = best;
  for (auto k : winners) {
    // Only reachable under exact ties: drop a winner that contains another one.
    bool minimal = std::none_of(winners.begin(), winners.end(),
                                [&](std::size_t other) { return other != k && strictly_contains(k, other); });
    if (minimal) result.clusters.push_back(distinct[k]);
  }
  return result;
}

struct DiversityTier {
  /// Features in this tier (indices into the full feature set).
  ColumnSet features;
  /// The clusters whose union forms the tier; empty for the leftover tier.
  std::vector<ColumnSet> clusters;
  /// Shared M_pi value of the clusters on the features remaining at that
  /// iteration; absent for the leftover tier.
  std::optional<double> objective;
};

/// Repeatedly extracts the minimal maximizers and removes them, until fewer
/// than two features remain. The tiers partition the features, most diverse first.
inline std::vector<DiversityTier> diversity_ordering(const PairwiseDCovCache& cache, double eps = 1e-12,
                                                     unsigned threads = 1) {
  if (cache.size() < 2) throw InvalidArgument("diversity ordering needs at least 2 features");
  std::vector<DiversityTier> tiers;
  auto remaining = ColumnSet::range(cache.size());

  while (remaining.size() >= 2) {
    const auto sub = cache.restrict_to(remaining);
    const auto found = minimal_maximizers(sub, eps, threads);

    DiversityTier tier;
    tier.objective = found.objective;
    std::vector<bool> taken(remaining.size(), false);
    std::vector<std::size_t> members;
    for (const auto& c : found.clusters) {
      std::vector<std::size_t> mapped;
      for (auto local : c.members) {
        mapped.push_back(remaining[local]);
        taken[local] = true;
      }
      members.insert(members.end(), mapped.begin(), mapped.end());
      tier.clusters.emplace_back(std::move(mapped));
    }
    tier.features = ColumnSet(std::move(members));
    tiers.push_back(std::move(tier));

    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < remaining.size(); ++k) {
      if (!taken[k]) rest.push_back(remaining[k]);
    }
    remaining = ColumnSet(std::move(rest));
  }
  if (!remaining.empty()) tiers.push_back(DiversityTier{remaining, {}, std::nullopt});
  return tiers;
}

inline std::vector<DiversityTier> diversity_ordering(const DataMatrix& data, const DCovConfig& cfg) {
  cfg.validate();
  if (data.cols() < 2) throw InvalidArgument("diversity ordering needs at least 2 features");
  return diversity_ordering(build_cache(data, cfg), cfg.eps, cfg.threads);
}

}  // namespace dcovsel
