#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dcovsel/error.hpp"

namespace dcovsel {

/// Ordered list of distinct column indices into a DataMatrix.
///
/// Order is significant: it is the order in which columns are appended
/// when a set is turned into a multivariate sample. Set comparisons go
/// through sorted().
class ColumnSet {
 public:
  using const_iterator = std::vector<std::size_t>::const_iterator;

  ColumnSet() = default;
  ColumnSet(std::initializer_list<std::size_t> indices) : indices_(indices) { check_distinct(); }
  explicit ColumnSet(std::vector<std::size_t> indices) : indices_(std::move(indices)) { check_distinct(); }

  /// {0, 1, ..., count-1}
  static ColumnSet range(std::size_t count) {
    std::vector<std::size_t> idx(count);
    for (std::size_t i = 0; i < count; ++i) idx[i] = i;
    return ColumnSet(std::move(idx));
  }

  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  std::size_t operator[](std::size_t k) const { return indices_[k]; }
  const_iterator begin() const noexcept { return indices_.begin(); }
  const_iterator end() const noexcept { return indices_.end(); }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

  bool contains(std::size_t index) const {
    return std::find(indices_.begin(), indices_.end(), index) != indices_.end();
  }

  ColumnSet sorted() const {
    auto idx = indices_;
    std::sort(idx.begin(), idx.end());
    return ColumnSet(std::move(idx), unchecked_tag{});
  }

  /// Throws InvalidArgument if any index is outside [0, bound).
  void check_bounds(std::size_t bound) const {
    for (auto i : indices_) {
      if (i >= bound) {
        throw InvalidArgument("column index " + std::to_string(i) + " out of range [0, " +
                              std::to_string(bound) + ")");
      }
    }
  }

  void push_back(std::size_t index) {
    if (contains(index)) throw InvalidArgument("duplicate column index " + std::to_string(index));
    indices_.push_back(index);
  }

  friend bool operator==(const ColumnSet&, const ColumnSet&) = default;

 private:
  struct unchecked_tag {};
  ColumnSet(std::vector<std::size_t> indices, unchecked_tag) : indices_(std::move(indices)) {}

  void check_distinct() const {
    std::unordered_set<std::size_t> seen;
    for (auto i : indices_) {
      if (!seen.insert(i).second) throw InvalidArgument("duplicate column index " + std::to_string(i));
    }
  }

  std::vector<std::size_t> indices_;
};

/// n x p numeric sample matrix with named columns, stored column-major.
class DataMatrix {
 public:
  DataMatrix() = default;

  /// `column_major` holds p consecutive columns of n values each.
  DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> column_major,
             std::vector<std::string> names)
      : rows_(rows), cols_(cols), values_(std::move(column_major)), names_(std::move(names)) {
    validate();
  }

  /// Unnamed columns get names "x0", "x1", ...
  static DataMatrix from_columns(const std::vector<std::vector<double>>& columns,
                                 std::vector<std::string> names = {}) {
    if (columns.empty()) throw DataError("data matrix needs at least one column");
    const auto rows = columns.front().size();
    std::vector<double> values;
    values.reserve(rows * columns.size());
    for (const auto& c : columns) {
      if (c.size() != rows) throw DataError("columns have different lengths");
      values.insert(values.end(), c.begin(), c.end());
    }
    if (names.empty()) {
      for (std::size_t j = 0; j < columns.size(); ++j) names.push_back("x" + std::to_string(j));
    }
    return DataMatrix(rows, columns.size(), std::move(values), std::move(names));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const double> column(std::size_t j) const {
    return {values_.data() + j * rows_, rows_};
  }
  std::span<double> column(std::size_t j) { return {values_.data() + j * rows_, rows_}; }

  double operator()(std::size_t row, std::size_t col) const { return values_[col * rows_ + row]; }

  const std::string& name(std::size_t j) const { return names_[j]; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  std::vector<std::string> names_of(const ColumnSet& set) const {
    set.check_bounds(cols_);
    std::vector<std::string> out;
    out.reserve(set.size());
    for (auto j : set) out.push_back(names_[j]);
    return out;
  }

  /// Index of the column called `name`, or cols() if absent.
  std::size_t index_of(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    return static_cast<std::size_t>(it - names_.begin());
  }

  /// New matrix holding the columns of `set`, in set order.
  DataMatrix select(const ColumnSet& set) const {
    set.check_bounds(cols_);
    if (set.empty()) throw InvalidArgument("cannot select an empty column set");
    std::vector<double> values;
    values.reserve(rows_ * set.size());
    std::vector<std::string> names;
    for (auto j : set) {
      auto c = column(j);
      values.insert(values.end(), c.begin(), c.end());
      names.push_back(names_[j]);
    }
    return DataMatrix(rows_, set.size(), std::move(values), std::move(names));
  }

 private:
  void validate() const {
    if (rows_ < 2) throw DataError("data matrix needs at least 2 rows, got " + std::to_string(rows_));
    if (cols_ < 1) throw DataError("data matrix needs at least 1 column");
    if (values_.size() != rows_ * cols_) throw DataError("value buffer does not match dimensions");
    if (names_.size() != cols_) throw DataError("column name count does not match column count");
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
      if (!seen.insert(n).second) throw DataError("duplicate column name '" + n + "'");
    }
    for (std::size_t j = 0; j < cols_; ++j) {
      for (std::size_t r = 0; r < rows_; ++r) {
        if (!std::isfinite(values_[j * rows_ + r])) {
          throw DataError("non-finite value at row " + std::to_string(r) + ", column '" + names_[j] + "'");
        }
      }
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<std::string> names_;
};

struct DCovConfig {
  /// Power applied to Euclidean distances, in (0, 2]. 1 is the classical
  /// distance covariance; 2 uses squared distances.
  double exponent = 1.0;
  /// Standardize feature columns before selection. Consumed at the data
  /// boundary (tools and experiment drivers); the kernels never rescale.
  bool standardize = false;
  /// Comparison tolerance, applied relative to the magnitude of the values compared.
  double eps = 1e-12;
  /// Worker threads for pairwise work; 0 means hardware concurrency.
  unsigned threads = 0;

  void validate() const {
    if (!(exponent > 0.0 && exponent <= 2.0)) {
      throw InvalidArgument("distance exponent must lie in (0, 2], got " + std::to_string(exponent));
    }
    if (!(eps >= 0.0)) throw InvalidArgument("eps must be nonnegative");
  }
};

}  // namespace dcovsel
