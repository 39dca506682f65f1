#pragma once

// All-relevant forward selection: rank features by marginal distance
// correlation with the response, then walk down the ranking adding each
// feature while the joint distance covariance with the response does not
// decrease. The walk stops at the first decrease; later features are never
// considered.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dcovsel/data_matrix.hpp"
#include "dcovsel/dcov.hpp"
#include "dcovsel/error.hpp"
#include "dcovsel/parallel.hpp"

namespace dcovsel {

struct RankedFeature {
  std::size_t index = 0;
  double dcor2 = 0.0;
};

struct RelevanceRanking {
  /// Sorted by dcor2 descending; equal values keep ascending index order.
  std::vector<RankedFeature> ranked;
};

struct RelevantSet {
  /// A prefix of ranking.ranked.
  ColumnSet selected;
  /// sqrt(dcov2(selected prefix, response)) after each accepted feature.
  std::vector<double> dcov_trace;
  RelevanceRanking ranking;
};

namespace detail {

inline void require_same_rows(const DataMatrix& features, const DataMatrix& response) {
  if (features.rows() != response.rows()) {
    throw InvalidArgument("features and response have different row counts");
  }
}

}  // namespace detail

inline RelevanceRanking marginal_ranking(const DataMatrix& features, const DataMatrix& response,
                                         const DCovConfig& cfg) {
  cfg.validate();
  detail::require_same_rows(features, response);
  const CenteredDistances y(response, ColumnSet::range(response.cols()), cfg.exponent);

  RelevanceRanking out;
  out.ranked.resize(features.cols());
  parallel_for(features.cols(), cfg.threads, [&](std::size_t j) {
    out.ranked[j] = {j, dcor2(CenteredDistances(features.column(j), cfg.exponent), y, cfg.eps)};
  });
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const RankedFeature& a, const RankedFeature& b) { return a.dcor2 > b.dcor2; });
  return out;
}

inline RelevantSet kww_select(const DataMatrix& features, const DataMatrix& response, const DCovConfig& cfg) {
  cfg.validate();
  detail::require_same_rows(features, response);
  const auto n = features.rows();
  const CenteredDistances y(response, ColumnSet::range(response.cols()), cfg.exponent);

  RelevantSet out;
  out.ranking = marginal_ranking(features, response, cfg);
  const auto& ranked = out.ranking.ranked;

  // Squared distances of the selected columns; additive across columns.
  auto squared = packed_squared_distances(features.column(ranked.front().index));
  double current = dcov2(CenteredDistances::from_squared(n, squared, cfg.exponent), y);
  out.selected.push_back(ranked.front().index);
  out.dcov_trace.push_back(std::sqrt(std::max(0.0, current)));

  for (std::size_t r = 1; r < ranked.size(); ++r) {
    auto candidate = squared;
    const auto extra = packed_squared_distances(features.column(ranked[r].index));
    for (std::size_t k = 0; k < candidate.size(); ++k) candidate[k] += extra[k];
    const double value = dcov2(CenteredDistances::from_squared(n, candidate, cfg.exponent), y);
    // dcov2 is compared directly: the square root is monotone.
    if (value < current - cfg.eps * std::max(std::abs(current), std::abs(value))) break;
    squared = std::move(candidate);
    current = value;
    out.selected.push_back(ranked[r].index);
    out.dcov_trace.push_back(std::sqrt(std::max(0.0, current)));
  }
  return out;
}

}  // namespace dcovsel
