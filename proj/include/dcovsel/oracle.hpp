#pragma once

// Exhaustive reference computations over the power set of features.
//
// Everything here evaluates M_pi straight from its definition, without the
// incremental bookkeeping used by the greedy search, so it can serve as an
// independent check of the minimal-maximizer enumeration at small p.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dcovsel/data_matrix.hpp"
#include "dcovsel/dcov.hpp"
#include "dcovsel/error.hpp"
#include "dcovsel/linkage.hpp"
#include "dcovsel/parallel.hpp"

namespace dcovsel {

/// Subsets of at most 32 features, bit j standing for feature j.
using SubsetMask = std::uint32_t;

inline constexpr std::size_t kMaxEnumerationFeatures = 20;

inline ColumnSet mask_to_set(SubsetMask mask) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; mask != 0; ++j, mask >>= 1) {
    if (mask & 1u) idx.push_back(j);
  }
  return ColumnSet(std::move(idx));
}

inline SubsetMask set_to_mask(const ColumnSet& set) {
  SubsetMask mask = 0;
  for (auto j : set) {
    if (j >= 32) throw InvalidArgument("subset masks hold at most 32 features");
    mask |= SubsetMask{1} << j;
  }
  return mask;
}

struct EnumerationResult {
  std::size_t p = 0;
  double tolerance = 0.0;
  /// M_pi by mask; NaN for the empty set and the full set, where it is undefined.
  std::vector<double> values;
  double best = -std::numeric_limits<double>::infinity();
  /// Ascending mask order.
  std::vector<SubsetMask> maximizers;
  std::vector<SubsetMask> minimal_maximizers;

  SubsetMask full_mask() const { return static_cast<SubsetMask>((std::uint64_t{1} << p) - 1); }
};

inline void require_enumerable(std::size_t p, std::size_t lowest) {
  if (p > kMaxEnumerationFeatures) {
    throw SizeError("exhaustive enumeration is limited to " + std::to_string(kMaxEnumerationFeatures) +
                    " features, got " + std::to_string(p));
  }
  if (p < lowest) {
    throw InvalidArgument("exhaustive enumeration needs at least " + std::to_string(lowest) + " feature(s)");
  }
}

/// M_pi on every nonempty proper subset, plus its maximizers and the
/// inclusion-minimal ones. Maximizers are values within the cache
/// tolerance of the best.
inline EnumerationResult enumerate_m_pi(const PairwiseDCovCache& cache, double eps = 1e-12) {
  const auto p = cache.size();
  require_enumerable(p, 2);

  EnumerationResult out;
  out.p = p;
  out.tolerance = cache.tolerance(eps);
  const auto full = out.full_mask();
  out.values.assign(std::size_t{full} + 1, std::numeric_limits<double>::quiet_NaN());

  for (SubsetMask mask = 1; mask < full; ++mask) {
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p; ++i) {
      if (mask >> i & 1u) continue;
      double link = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        if (mask >> j & 1u) link -= cache(i, j);
      }
      lowest = std::min(lowest, link);
    }
    out.values[mask] = lowest;
    out.best = std::max(out.best, lowest);
  }

  for (SubsetMask mask = 1; mask < full; ++mask) {
    if (out.values[mask] >= out.best - out.tolerance) out.maximizers.push_back(mask);
  }
  for (auto m : out.maximizers) {
    bool minimal = true;
    for (auto other : out.maximizers) {
      if (other != m && (other & m) == other) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.minimal_maximizers.push_back(m);
  }
  return out;
}

/// True iff every maximizer is exactly the union of the minimal maximizers it contains.
inline bool union_decomposition_check(const EnumerationResult& result) {
  for (auto m : result.maximizers) {
    SubsetMask covered = 0;
    for (auto minimal : result.minimal_maximizers) {
      if ((minimal & m) == minimal) covered |= minimal;
    }
    if (covered != m) return false;
  }
  return true;
}

/// Number of overlapping maximizer pairs whose intersection is not a maximizer.
inline std::size_t intersection_closure_violations(const EnumerationResult& result) {
  std::size_t violations = 0;
  for (std::size_t a = 0; a < result.maximizers.size(); ++a) {
    for (std::size_t b = a + 1; b < result.maximizers.size(); ++b) {
      const auto meet = result.maximizers[a] & result.maximizers[b];
      if (meet == 0) continue;
      if (!(result.values[meet] >= result.best - result.tolerance)) ++violations;
    }
  }
  return violations;
}

/// Number of overlapping subset pairs (S, T) with M_pi(S & T) < min(M_pi(S), M_pi(T)) - tolerance.
inline std::size_t quasi_concavity_violations(const EnumerationResult& result) {
  std::size_t violations = 0;
  const auto full = result.full_mask();
  for (SubsetMask s = 1; s < full; ++s) {
    for (SubsetMask t = s + 1; t < full; ++t) {
      const auto meet = s & t;
      if (meet == 0) continue;
      const double floor = std::min(result.values[s], result.values[t]);
      if (result.values[meet] < floor - result.tolerance) ++violations;
    }
  }
  return violations;
}

struct ScalingExperimentResult {
  /// dcor2(S, Y) for every nonempty subset S, ascending mask order.
  std::vector<double> rho_E;
  /// dcov2(S, Y) in the same order.
  std::vector<double> nu_E;
  /// Distance correlation (not squared) between the two lists as scalar samples.
  double rho_of_rho_nu = 0.0;
  bool standardized = false;
};

/// How well dcov2 tracks dcor2 across all feature subsets: computes both
/// against the response for every nonempty subset (the full set included)
/// and reports the distance correlation between the two lists.
inline ScalingExperimentResult power_set_dependence_experiment(const DataMatrix& features, const DataMatrix& response,
                                                               const DCovConfig& cfg, bool standardize_features) {
  cfg.validate();
  const auto p = features.cols();
  require_enumerable(p, 1);
  if (features.rows() != response.rows()) throw InvalidArgument("features and response have different row counts");

  const auto data = standardize_features ? standardize(features) : features;
  const CenteredDistances y(response, ColumnSet::range(response.cols()), cfg.exponent);

  ScalingExperimentResult out;
  out.standardized = standardize_features;
  const auto count = (std::size_t{1} << p) - 1;
  out.rho_E.resize(count);
  out.nu_E.resize(count);
  parallel_for(count, cfg.threads, [&](std::size_t k) {
    const CenteredDistances x(data, mask_to_set(static_cast<SubsetMask>(k + 1)), cfg.exponent);
    out.nu_E[k] = dcov2(x, y);
    out.rho_E[k] = dcor2(x, y, cfg.eps);
  });

  if (count >= 2) {
    const double r2 = dcor2(CenteredDistances(out.rho_E, cfg.exponent), CenteredDistances(out.nu_E, cfg.exponent),
                            cfg.eps);
    out.rho_of_rho_nu = std::sqrt(std::max(0.0, r2));
  }
  return out;
}

}  // namespace dcovsel
