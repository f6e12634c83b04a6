#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tron/error.hpp"
#include "tron/parallel.hpp"

namespace tron {

using RealVector = std::vector<double>;

enum class Layout { DenseRowMajor, SparseCsr };

/// Immutable feature matrix X of l instances by n features, stored
/// either dense row-major or CSR with 0-based column indices.
/// Row access dominates every kernel here (per-instance margins,
/// active-set gathers), hence the row-oriented layouts.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;

  static FeatureMatrix dense(std::size_t rows, std::size_t cols, std::vector<double> values);
  static FeatureMatrix csr(std::size_t rows, std::size_t cols,
                           std::vector<std::int64_t> row_offsets,
                           std::vector<std::int32_t> col_indices,
                           std::vector<double> values);

  Layout layout() const { return layout_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  /// Stored entries (CSR nonzeros; dense stores all l*n).
  std::size_t stored() const { return values_.size(); }

  /// x_i · v  (v must have length cols()).
  double row_dot(std::size_t i, std::span<const double> v) const;

  /// out += a * x_i  (out must have length cols()).
  void row_axpy(std::size_t i, double a, double* out) const;

  /// out_j += a * X_ij^2  — column-squared accumulation for one row.
  void row_axpy_squared(std::size_t i, double a, double* out) const;

  /// Count of stored nonzero values in row i (dense rows count all n).
  std::size_t row_size(std::size_t i) const;

  /// Bytes of the value/index/offset buffers (dense: values only).
  std::size_t payload_bytes() const;

  std::span<const std::int64_t> row_offsets() const { return row_offsets_; }
  std::span<const std::int32_t> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

 private:
  Layout layout_ = Layout::DenseRowMajor;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int64_t> row_offsets_;   // CSR only, length rows+1
  std::vector<std::int32_t> col_indices_;   // CSR only
  std::vector<double> values_;              // CSR nonzeros or dense row-major
};

/// Strictly ascending row indices in [0, rows).
class IndexSet {
 public:
  IndexSet() = default;

  /// Validates ascending order, uniqueness and range.
  static IndexSet checked(std::vector<std::int64_t> indices, std::size_t row_limit);

  /// Trusted constructor for indices produced already sorted.
  static IndexSet from_sorted_unchecked(std::vector<std::int64_t> indices);

  static IndexSet all(std::size_t rows);

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  std::int64_t operator[](std::size_t k) const { return indices_[k]; }
  std::span<const std::int64_t> indices() const { return indices_; }
  std::size_t footprint_bytes() const { return indices_.size() * sizeof(std::int64_t); }

 private:
  std::vector<std::int64_t> indices_;
};

// =============================================================================
// Kernels. All of them are pure reads of the matrix; parallel variants
// partition work over the fixed reduction blocks so results are
// bit-identical for every worker count.
// =============================================================================

/// result_i = x_i · v
RealVector matvec(const FeatureMatrix& X, const RealVector& v, const Executor& exec = {});
void matvec(const FeatureMatrix& X, const RealVector& v, RealVector& out, const Executor& exec);

/// result_j = sum_i X_ij u_i
RealVector matvec_transpose(const FeatureMatrix& X, const RealVector& u,
                            const Executor& exec = {}, KernelScratch* scratch = nullptr);

/// Materialize X_{I,:} in the same layout family as X.
FeatureMatrix gather_rows(const FeatureMatrix& X, const IndexSet& I);

/// result_j = sum_{i in I} X_ij u_i, without materializing X_{I,:}.
RealVector masked_matvec_transpose(const FeatureMatrix& X, const IndexSet& I, const RealVector& u,
                                   const Executor& exec = {}, KernelScratch* scratch = nullptr);

/// result_j = sum_i weights_i X_ij^2
RealVector weighted_sq_col_sums(const FeatureMatrix& X, const RealVector& weights,
                                const Executor& exec = {}, KernelScratch* scratch = nullptr);

/// result_j = sum_{i in I} X_ij^2
RealVector masked_sq_col_sums(const FeatureMatrix& X, const IndexSet& I,
                              const Executor& exec = {}, KernelScratch* scratch = nullptr);

double dot(const RealVector& a, const RealVector& b);
RealVector axpy(double alpha, const RealVector& a, const RealVector& b);
void axpy_inplace(double alpha, const RealVector& a, RealVector& b);
double norm2(const RealVector& a);

}  // namespace tron
