#pragma once

// Monotone linkage over pairwise distance covariances.
//
//   pi(i, S)  = - sum_{j in S} dcov2(X_i, X_j),       i not in S
//   M_pi(T)   = min_{i outside T} pi(i, T),           T nonempty, proper
//
// pi only decreases as S grows because every summand is nonnegative, which
// makes M_pi quasi-concave: M_pi(S & T) >= min(M_pi(S), M_pi(T)).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "dcovsel/data_matrix.hpp"
#include "dcovsel/dcov.hpp"
#include "dcovsel/error.hpp"
#include "dcovsel/parallel.hpp"

namespace dcovsel {

/// Symmetric p x p matrix of singleton-pair distance covariances.
class PairwiseDCovCache {
 public:
  PairwiseDCovCache() = default;

  /// `matrix` is row-major p x p; it must be exactly symmetric.
  PairwiseDCovCache(std::vector<double> matrix, std::vector<std::string> names)
      : size_(names.size()), matrix_(std::move(matrix)), names_(std::move(names)) {
    if (matrix_.size() != size_ * size_) throw InvalidArgument("cache matrix does not match name count");
    for (std::size_t i = 0; i < size_; ++i) {
      for (std::size_t j = 0; j < size_; ++j) {
        if (!std::isfinite(at(i, j))) throw DataError("non-finite cache entry");
        if (at(i, j) != at(j, i)) throw InvalidArgument("cache matrix must be symmetric");
      }
    }
    for (double v : matrix_) max_abs_ = std::max(max_abs_, std::abs(v));
  }

  /// Unnamed features get "f0", "f1", ...
  static PairwiseDCovCache from_matrix(std::vector<double> matrix, std::size_t p) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j) names.push_back("f" + std::to_string(j));
    return PairwiseDCovCache(std::move(matrix), std::move(names));
  }

  std::size_t size() const noexcept { return size_; }
  double operator()(std::size_t i, std::size_t j) const { return at(i, j); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  /// Absolute tolerance for comparing linkage values: eps scaled by the
  /// largest possible |pi| (p times the largest entry).
  double tolerance(double eps) const {
    return eps * std::max(1.0, max_abs_ * static_cast<double>(size_));
  }

  /// Cache over the features in `keep`, renumbered 0..|keep|-1 in `keep` order.
  PairwiseDCovCache restrict_to(const ColumnSet& keep) const {
    keep.check_bounds(size_);
    std::vector<double> m;
    m.reserve(keep.size() * keep.size());
    std::vector<std::string> names;
    for (auto i : keep) {
      names.push_back(names_[i]);
      for (auto j : keep) m.push_back(at(i, j));
    }
    return PairwiseDCovCache(std::move(m), std::move(names));
  }

 private:
  double at(std::size_t i, std::size_t j) const { return matrix_[i * size_ + j]; }

  std::size_t size_ = 0;
  std::vector<double> matrix_;
  std::vector<std::string> names_;
  double max_abs_ = 0.0;
};

/// Bytes of centered distance matrices build_cache keeps resident at once.
inline constexpr double kCacheMemoryBudget = 1024.0 * 1024.0 * 1024.0;

/// Computes dcov2 for every unordered pair of `features` (diagonal included).
/// Each centered distance matrix is built once; pairs are spread over cfg.threads.
inline PairwiseDCovCache build_cache(const DataMatrix& data, const ColumnSet& features,
                                     const DCovConfig& cfg) {
  cfg.validate();
  features.check_bounds(data.cols());
  if (features.size() < 2) throw InvalidArgument("pairwise cache needs at least 2 features");
  const auto p = features.size();

  const auto n = data.rows();
  std::vector<double> matrix(p * p, 0.0);
  auto single = [&](std::size_t i) { return CenteredDistances(data, ColumnSet{features[i]}, cfg.exponent); };

  const double bytes = static_cast<double>(p) * static_cast<double>(n) * static_cast<double>(n + 1) / 2.0 *
                       sizeof(double);
  if (bytes > kCacheMemoryBudget) {
    // Too large to hold every centered matrix: rebuild column j per row i.
    parallel_for(p, cfg.threads, [&](std::size_t i) {
      const auto ci = single(i);
      matrix[i * p + i] = dcov2(ci, ci);
      for (std::size_t j = i + 1; j < p; ++j) matrix[i * p + j] = dcov2(ci, single(j));
    });
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) matrix[j * p + i] = matrix[i * p + j];
    }
    return PairwiseDCovCache(std::move(matrix), data.names_of(features));
  }

  std::vector<CenteredDistances> centered(p);
  parallel_for(p, cfg.threads, [&](std::size_t i) { centered[i] = single(i); });

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(p * (p + 1) / 2);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) pairs.emplace_back(i, j);
  }
  parallel_for(pairs.size(), cfg.threads, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const double v = dcov2(centered[i], centered[j]);
    matrix[i * p + j] = v;
    matrix[j * p + i] = v;
  });
  return PairwiseDCovCache(std::move(matrix), data.names_of(features));
}

inline PairwiseDCovCache build_cache(const DataMatrix& data, const DCovConfig& cfg) {
  return build_cache(data, ColumnSet::range(data.cols()), cfg);
}

/// pi(i, S) = - sum_{j in S} cache(i, j).
inline double pi_linkage(std::size_t i, const ColumnSet& s, const PairwiseDCovCache& cache) {
  s.check_bounds(cache.size());
  if (i >= cache.size()) throw InvalidArgument("feature index out of range");
  if (s.empty()) throw InvalidArgument("linkage needs a nonempty set");
  if (s.contains(i)) throw InvalidArgument("linkage element " + std::to_string(i) + " lies inside the set");
  double total = 0.0;
  for (auto j : s) total -= cache(i, j);
  return total;
}

/// M_pi(T) = min over features outside T of pi(i, T).
inline double m_pi(const ColumnSet& t, const PairwiseDCovCache& cache) {
  t.check_bounds(cache.size());
  if (t.empty()) throw InvalidArgument("M_pi is undefined on the empty set");
  if (t.size() >= cache.size()) throw InvalidArgument("M_pi is undefined on the full ground set");
  std::vector<bool> inside(cache.size(), false);
  for (auto j : t) inside[j] = true;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cache.size(); ++i) {
    if (!inside[i]) best = std::min(best, pi_linkage(i, t, cache));
  }
  return best;
}

}  // namespace dcovsel
