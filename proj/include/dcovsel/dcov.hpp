#pragma once

// Sample distance covariance and correlation.
//
// For samples x_1..x_n and y_1..y_n the V-statistic
//
//   dcov2(X, Y) = (1/n^2) * sum_{k,l} A_kl * B_kl
//
// is computed from the double-centered distance matrices A = J E_X J and
// B = J E_Y J, J = I - (1/n) 1 1^T, with [E_X]_kl = |x_k - x_l|^exponent.
// Exponent 1 is the classical statistic; exponent 2 uses squared distances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dcovsel/data_matrix.hpp"
#include "dcovsel/error.hpp"

namespace dcovsel {

/// Dense row-major matrix. Used for point sets and explicit n x n distance matrices.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    for (const auto& r : rows) {
      if (r.size() != cols_) throw InvalidArgument("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const noexcept { return data_; }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

namespace detail {

inline void require_exponent(double exponent) {
  if (!(exponent > 0.0 && exponent <= 2.0)) {
    throw InvalidArgument("distance exponent must lie in (0, 2], got " + std::to_string(exponent));
  }
}

// |d|^exponent given d^2.
inline double power_from_squared(double squared, double exponent) {
  if (exponent == 2.0) return squared;
  if (exponent == 1.0) return std::sqrt(squared);
  return std::pow(squared, 0.5 * exponent);
}

inline std::size_t packed_offset(std::size_t row, std::size_t n) {
  return row * n - row * (row - 1) / 2;
}

}  // namespace detail

/// Pairwise |row_k - row_l|^exponent for the rows of `points`.
inline Matrix distance_matrix(const Matrix& points, double exponent) {
  detail::require_exponent(exponent);
  const auto n = points.rows();
  if (n < 2) throw DataError("distance matrix needs at least 2 points");
  for (double v : points.data()) {
    if (!std::isfinite(v)) throw DataError("non-finite coordinate in point set");
  }
  Matrix d(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) {
      double sq = 0.0;
      for (std::size_t c = 0; c < points.cols(); ++c) {
        const double diff = points(k, c) - points(l, c);
        sq += diff * diff;
      }
      d(k, l) = d(l, k) = detail::power_from_squared(sq, exponent);
    }
  }
  return d;
}

/// n x n matrix whose row and column sums vanish: J D J for a distance matrix D.
class CenteredDistanceMatrix {
 public:
  std::size_t size() const noexcept { return entries_.rows(); }
  double operator()(std::size_t k, std::size_t l) const { return entries_(k, l); }
  const Matrix& entries() const noexcept { return entries_; }

 private:
  explicit CenteredDistanceMatrix(Matrix m) : entries_(std::move(m)) {}
  friend CenteredDistanceMatrix double_center(const Matrix& d, double eps);

  Matrix entries_;
};

/// J D J, computed from row, column and grand means in O(n^2).
inline CenteredDistanceMatrix double_center(const Matrix& d, double eps = 1e-12) {
  const auto n = d.rows();
  if (n == 0 || d.cols() != n) throw InvalidArgument("double_center needs a nonempty square matrix");
  const double tol = eps * std::max(1.0, d.max_abs());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = k + 1; l < n; ++l) {
      if (std::abs(d(k, l) - d(l, k)) > tol) throw InvalidArgument("double_center needs a symmetric matrix");
    }
  }
  std::vector<double> row_mean(n, 0.0), col_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      row_mean[k] += d(k, l);
      col_mean[l] += d(k, l);
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    grand += row_mean[k];
    row_mean[k] /= static_cast<double>(n);
    col_mean[k] /= static_cast<double>(n);
  }
  grand /= static_cast<double>(n) * static_cast<double>(n);

  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) out(k, l) = d(k, l) - row_mean[k] - col_mean[l] + grand;
  }
  return CenteredDistanceMatrix(std::move(out));
}

/// Double-centered distance matrix of a sample, stored as a packed upper
/// triangle (diagonal included). This is the working form for every
/// statistic below; it halves memory relative to CenteredDistanceMatrix.
class CenteredDistances {
 public:
  CenteredDistances() = default;

  /// Distances between the rows of the columns `set` of `data`.
  CenteredDistances(const DataMatrix& data, const ColumnSet& set, double exponent) {
    set.check_bounds(data.cols());
    if (set.empty()) throw InvalidArgument("distance covariance needs a nonempty column set");
    std::vector<std::span<const double>> cols;
    for (auto j : set) cols.push_back(data.column(j));
    build(data.rows(), cols, exponent);
  }

  /// Distances between scalar samples.
  CenteredDistances(std::span<const double> sample, double exponent) {
    if (sample.size() < 2) throw DataError("distance covariance needs at least 2 samples");
    for (double v : sample) {
      if (!std::isfinite(v)) throw DataError("non-finite sample value");
    }
    std::vector<std::span<const double>> cols{sample};
    build(sample.size(), cols, exponent);
  }

  /// From a packed upper triangle of squared Euclidean distances (see
  /// packed_squared_distances). Lets callers grow a multivariate sample one
  /// column at a time by adding triangles.
  static CenteredDistances from_squared(std::size_t n, std::vector<double> packed_squared, double exponent) {
    detail::require_exponent(exponent);
    if (n < 2) throw DataError("distance covariance needs at least 2 samples");
    if (packed_squared.size() != n * (n + 1) / 2) throw InvalidArgument("packed triangle has the wrong size");
    CenteredDistances out;
    out.n_ = n;
    out.packed_ = std::move(packed_squared);
    for (auto& v : out.packed_) v = detail::power_from_squared(v, exponent);
    out.center();
    return out;
  }

  std::size_t size() const noexcept { return n_; }
  double max_abs() const noexcept { return max_abs_; }

  double operator()(std::size_t k, std::size_t l) const {
    if (k > l) std::swap(k, l);
    return packed_[detail::packed_offset(k, n_) + (l - k)];
  }

  /// (1/n^2) sum_{k,l} this_kl * other_kl. Symmetric in its arguments bit for bit.
  double dot(const CenteredDistances& other) const {
    if (other.n_ != n_) throw InvalidArgument("samples have different sizes");
    double diagonal = 0.0;
    double off = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      const auto base = detail::packed_offset(k, n_);
      diagonal += packed_[base] * other.packed_[base];
      double row = 0.0;
      for (std::size_t l = 1; l < n_ - k; ++l) row += packed_[base + l] * other.packed_[base + l];
      off += row;
    }
    const double nn = static_cast<double>(n_) * static_cast<double>(n_);
    return (diagonal + 2.0 * off) / nn;
  }

 private:
  void build(std::size_t n, const std::vector<std::span<const double>>& cols, double exponent) {
    detail::require_exponent(exponent);
    n_ = n;
    packed_.assign(n * (n + 1) / 2, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const auto base = detail::packed_offset(k, n);
      for (std::size_t l = k + 1; l < n; ++l) {
        double sq = 0.0;
        for (const auto& c : cols) {
          const double diff = c[k] - c[l];
          sq += diff * diff;
        }
        packed_[base + (l - k)] = detail::power_from_squared(sq, exponent);
      }
    }
    center();
  }

  // Double-centers the (uncentered) distances held in packed_.
  void center() {
    const auto n = n_;
    std::vector<double> mean(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const auto base = detail::packed_offset(k, n);
      for (std::size_t l = k + 1; l < n; ++l) {
        mean[k] += packed_[base + (l - k)];
        mean[l] += packed_[base + (l - k)];
      }
    }
    double grand = 0.0;
    for (auto& m : mean) {
      grand += m;
      m /= static_cast<double>(n);
    }
    grand /= static_cast<double>(n) * static_cast<double>(n);
    max_abs_ = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const auto base = detail::packed_offset(k, n);
      for (std::size_t l = k; l < n; ++l) {
        auto& v = packed_[base + (l - k)];
        v = v - mean[k] - mean[l] + grand;
        max_abs_ = std::max(max_abs_, std::abs(v));
      }
    }
  }

  std::size_t n_ = 0;
  double max_abs_ = 0.0;
  std::vector<double> packed_;
};

/// Packed upper triangle (diagonal included) of (x_k - x_l)^2.
inline std::vector<double> packed_squared_distances(std::span<const double> column) {
  const auto n = column.size();
  std::vector<double> out(n * (n + 1) / 2, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto base = detail::packed_offset(k, n);
    for (std::size_t l = k + 1; l < n; ++l) {
      const double diff = column[k] - column[l];
      out[base + (l - k)] = diff * diff;
    }
  }
  return out;
}

/// Distance covariance of two precomputed samples. Never clamped.
inline double dcov2(const CenteredDistances& a, const CenteredDistances& b) { return a.dot(b); }

/// Squared distance correlation; exactly 0 when either self-covariance vanishes
/// (product at or below eps times its natural scale).
inline double dcor2(const CenteredDistances& a, const CenteredDistances& b, double eps = 1e-12) {
  const double xx = a.dot(a);
  const double yy = b.dot(b);
  const double scale = a.max_abs() * a.max_abs() * b.max_abs() * b.max_abs();
  const double product = xx * yy;
  if (scale == 0.0 || !(product > eps * scale)) return 0.0;
  return a.dot(b) / std::sqrt(product);
}

inline double sample_dcov2(const DataMatrix& x_data, const ColumnSet& a, const DataMatrix& y_data,
                           const ColumnSet& b, const DCovConfig& cfg) {
  cfg.validate();
  if (x_data.rows() != y_data.rows()) throw InvalidArgument("samples have different sizes");
  return dcov2(CenteredDistances(x_data, a, cfg.exponent), CenteredDistances(y_data, b, cfg.exponent));
}

inline double sample_dcov2(const DataMatrix& data, const ColumnSet& a, const ColumnSet& b,
                           const DCovConfig& cfg) {
  return sample_dcov2(data, a, data, b, cfg);
}

inline double sample_dcor2(const DataMatrix& x_data, const ColumnSet& a, const DataMatrix& y_data,
                           const ColumnSet& b, const DCovConfig& cfg) {
  cfg.validate();
  if (x_data.rows() != y_data.rows()) throw InvalidArgument("samples have different sizes");
  return dcor2(CenteredDistances(x_data, a, cfg.exponent), CenteredDistances(y_data, b, cfg.exponent),
               cfg.eps);
}

inline double sample_dcor2(const DataMatrix& data, const ColumnSet& a, const ColumnSet& b,
                           const DCovConfig& cfg) {
  return sample_dcor2(data, a, data, b, cfg);
}

/// A followed by B. Appending columns is how a union of variables becomes one sample.
inline ColumnSet augment_union(const DataMatrix& data, const ColumnSet& a, const ColumnSet& b) {
  a.check_bounds(data.cols());
  b.check_bounds(data.cols());
  std::vector<std::size_t> out(a.begin(), a.end());
  for (auto j : b) {
    if (a.contains(j)) throw InvalidArgument("augment_union needs disjoint sets; both contain " + std::to_string(j));
    out.push_back(j);
  }
  return ColumnSet(std::move(out));
}

/// Centers every column and scales it to unit standard deviation (divisor n).
/// Constant columns become all zero.
inline DataMatrix standardize(const DataMatrix& data) {
  const auto n = data.rows();
  std::vector<double> values;
  values.reserve(n * data.cols());
  for (std::size_t j = 0; j < data.cols(); ++j) {
    auto c = data.column(j);
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    if (*lo == *hi) {
      values.insert(values.end(), n, 0.0);
      continue;
    }
    const double mean = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : c) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    for (double v : c) values.push_back((v - mean) / sd);
  }
  return DataMatrix(n, data.cols(), std::move(values), data.names());
}

namespace detail {

// Fenwick tree over y-ranks accumulating count, sum x, sum y and sum xy.
class MomentTree {
 public:
  explicit MomentTree(std::size_t n) : nodes_(n + 1) {}

  void add(std::size_t rank, long double x, long double y) {
    for (auto i = rank + 1; i < nodes_.size(); i += i & (~i + 1)) {
      nodes_[i].count += 1;
      nodes_[i].sx += x;
      nodes_[i].sy += y;
      nodes_[i].sxy += x * y;
    }
  }

  struct Moments {
    long double count = 0, sx = 0, sy = 0, sxy = 0;
  };

  // Moments of all inserted points with rank <= `rank`.
  Moments prefix(std::size_t rank) const {
    Moments m;
    for (auto i = rank + 1; i > 0; i -= i & (~i + 1)) {
      m.count += nodes_[i].count;
      m.sx += nodes_[i].sx;
      m.sy += nodes_[i].sy;
      m.sxy += nodes_[i].sxy;
    }
    return m;
  }

 private:
  std::vector<Moments> nodes_;
};

// sum_l |v_k - v_l| for every k, via sorting and prefix sums.
inline std::vector<long double> absolute_row_sums(const std::vector<long double>& v) {
  const auto n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  long double total = 0;
  for (auto x : v) total += x;
  std::vector<long double> sums(n);
  long double before = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto x = v[order[r]];
    const long double after = total - before - x;
    const auto below = static_cast<long double>(r);
    const auto above = static_cast<long double>(n - 1 - r);
    sums[order[r]] = (x * below - before) + (after - x * above);
    before += x;
  }
  return sums;
}

}  // namespace detail

/// O(n log n) distance covariance of two scalar samples (exponent 1 only).
///
/// Uses dcov2 = S1 + S2 - 2 S3 with
///   S1 = (1/n^2) sum_{k,l} |x_k-x_l||y_k-y_l|,
///   S2 = (1/n^2) sum |x_k-x_l| * (1/n^2) sum |y_k-y_l|,
///   S3 = (1/n^3) sum_k a_k b_k,  a_k, b_k the distance row sums.
/// S1 is accumulated over pairs in x order with a Fenwick tree keyed on y rank.
inline double fast_dcov2_univariate(std::span<const double> x, std::span<const double> y,
                                    const DCovConfig& cfg = {}) {
  cfg.validate();
  if (cfg.exponent != 1.0) throw InvalidArgument("fast univariate distance covariance requires exponent 1");
  const auto n = x.size();
  if (y.size() != n) throw InvalidArgument("samples have different sizes");
  if (n < 2) throw DataError("distance covariance needs at least 2 samples");

  auto centered = [n](std::span<const double> s) {
    long double mean = 0;
    for (double v : s) {
      if (!std::isfinite(v)) throw DataError("non-finite sample value");
      mean += v;
    }
    mean /= static_cast<long double>(n);
    std::vector<long double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<long double>(s[i]) - mean;
    return out;
  };
  const auto xs = centered(x);
  const auto ys = centered(y);

  const auto a = detail::absolute_row_sums(xs);
  const auto b = detail::absolute_row_sums(ys);

  std::vector<std::size_t> by_x(n);
  std::iota(by_x.begin(), by_x.end(), 0);
  std::stable_sort(by_x.begin(), by_x.end(), [&](auto p, auto q) { return xs[p] < xs[q]; });

  std::vector<long double> distinct_y(ys);
  std::sort(distinct_y.begin(), distinct_y.end());
  distinct_y.erase(std::unique(distinct_y.begin(), distinct_y.end()), distinct_y.end());
  auto y_rank = [&](long double v) {
    return static_cast<std::size_t>(std::lower_bound(distinct_y.begin(), distinct_y.end(), v) -
                                    distinct_y.begin());
  };

  detail::MomentTree tree(distinct_y.size());
  detail::MomentTree::Moments all;
  long double pair_sum = 0;
  for (auto idx : by_x) {
    const auto xv = xs[idx];
    const auto yv = ys[idx];
    const auto below = tree.prefix(y_rank(yv));
    const detail::MomentTree::Moments above{all.count - below.count, all.sx - below.sx, all.sy - below.sy,
                                            all.sxy - below.sxy};
    // Earlier points have x_k <= x_l; the sign of y_l - y_k splits them.
    pair_sum += below.count * xv * yv - xv * below.sy - yv * below.sx + below.sxy;
    pair_sum -= above.count * xv * yv - xv * above.sy - yv * above.sx + above.sxy;
    tree.add(y_rank(yv), xv, yv);
    all.count += 1;
    all.sx += xv;
    all.sy += yv;
    all.sxy += xv * yv;
  }

  const auto nn = static_cast<long double>(n) * static_cast<long double>(n);
  long double sum_a = 0, sum_b = 0, sum_ab = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_a += a[i];
    sum_b += b[i];
    sum_ab += a[i] * b[i];
  }
  const long double s1 = 2 * pair_sum / nn;
  const long double s2 = (sum_a / nn) * (sum_b / nn);
  const long double s3 = sum_ab / (nn * static_cast<long double>(n));
  return static_cast<double>(s1 + s2 - 2 * s3);
}

}  // namespace dcovsel
