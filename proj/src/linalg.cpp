#include "tron/linalg.hpp"

#include <cmath>
#include <cstring>
#include <string>
#include <utility>

namespace tron {

namespace {

void check_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": length " + std::to_string(got) +
                         ", expected " + std::to_string(want));
  }
}

}  // namespace

FeatureMatrix FeatureMatrix::dense(std::size_t rows, std::size_t cols, std::vector<double> values) {
  if (values.size() != rows * cols) {
    throw DimensionError("dense matrix: " + std::to_string(values.size()) +
                         " values for " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  FeatureMatrix m;
  m.layout_ = Layout::DenseRowMajor;
  m.rows_ = rows;
  m.cols_ = cols;
  m.values_ = std::move(values);
  return m;
}

FeatureMatrix FeatureMatrix::csr(std::size_t rows, std::size_t cols,
                                 std::vector<std::int64_t> row_offsets,
                                 std::vector<std::int32_t> col_indices,
                                 std::vector<double> values) {
  if (row_offsets.size() != rows + 1) {
    throw DimensionError("csr matrix: " + std::to_string(row_offsets.size()) +
                         " row offsets for " + std::to_string(rows) + " rows");
  }
  if (row_offsets.front() != 0 ||
      row_offsets.back() != static_cast<std::int64_t>(values.size()) ||
      col_indices.size() != values.size()) {
    throw DimensionError("csr matrix: offsets/indices/values disagree");
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_offsets[i] > row_offsets[i + 1]) {
      throw DimensionError("csr matrix: decreasing row offset at row " + std::to_string(i));
    }
    std::int32_t prev = -1;
    for (std::int64_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      std::int32_t c = col_indices[static_cast<std::size_t>(k)];
      if (c < 0 || static_cast<std::size_t>(c) >= cols) {
        throw BoundsError("csr matrix: column " + std::to_string(c) + " out of range in row " +
                          std::to_string(i));
      }
      if (c <= prev) {
        throw DimensionError("csr matrix: column indices not strictly ascending in row " +
                             std::to_string(i));
      }
      prev = c;
    }
  }
  FeatureMatrix m;
  m.layout_ = Layout::SparseCsr;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_offsets_ = std::move(row_offsets);
  m.col_indices_ = std::move(col_indices);
  m.values_ = std::move(values);
  return m;
}

double FeatureMatrix::row_dot(std::size_t i, std::span<const double> v) const {
  double acc = 0.0;
  if (layout_ == Layout::DenseRowMajor) {
    const double* row = values_.data() + i * cols_;
    for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * v[j];
  } else {
    for (std::int64_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      acc += values_[static_cast<std::size_t>(k)] * v[col_indices_[static_cast<std::size_t>(k)]];
    }
  }
  return acc;
}

void FeatureMatrix::row_axpy(std::size_t i, double a, double* out) const {
  if (layout_ == Layout::DenseRowMajor) {
    const double* row = values_.data() + i * cols_;
    for (std::size_t j = 0; j < cols_; ++j) out[j] += a * row[j];
  } else {
    for (std::int64_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      out[col_indices_[static_cast<std::size_t>(k)]] += a * values_[static_cast<std::size_t>(k)];
    }
  }
}

void FeatureMatrix::row_axpy_squared(std::size_t i, double a, double* out) const {
  if (layout_ == Layout::DenseRowMajor) {
    const double* row = values_.data() + i * cols_;
    for (std::size_t j = 0; j < cols_; ++j) out[j] += a * row[j] * row[j];
  } else {
    for (std::int64_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      double v = values_[static_cast<std::size_t>(k)];
      out[col_indices_[static_cast<std::size_t>(k)]] += a * v * v;
    }
  }
}

std::size_t FeatureMatrix::row_size(std::size_t i) const {
  if (layout_ == Layout::DenseRowMajor) return cols_;
  return static_cast<std::size_t>(row_offsets_[i + 1] - row_offsets_[i]);
}

std::size_t FeatureMatrix::payload_bytes() const {
  std::size_t bytes = values_.size() * sizeof(double);
  if (layout_ == Layout::SparseCsr) {
    bytes += col_indices_.size() * sizeof(std::int32_t);
    bytes += row_offsets_.size() * sizeof(std::int64_t);
  }
  return bytes;
}

IndexSet IndexSet::checked(std::vector<std::int64_t> indices, std::size_t row_limit) {
  std::int64_t prev = -1;
  for (std::int64_t i : indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= row_limit) {
      throw BoundsError("index " + std::to_string(i) + " outside [0, " +
                        std::to_string(row_limit) + ")");
    }
    if (i <= prev) {
      throw BoundsError("index set not strictly ascending at " + std::to_string(i));
    }
    prev = i;
  }
  IndexSet s;
  s.indices_ = std::move(indices);
  return s;
}

IndexSet IndexSet::from_sorted_unchecked(std::vector<std::int64_t> indices) {
  IndexSet s;
  s.indices_ = std::move(indices);
  return s;
}

IndexSet IndexSet::all(std::size_t rows) {
  std::vector<std::int64_t> idx(rows);
  for (std::size_t i = 0; i < rows; ++i) idx[i] = static_cast<std::int64_t>(i);
  return from_sorted_unchecked(std::move(idx));
}

void matvec(const FeatureMatrix& X, const RealVector& v, RealVector& out, const Executor& exec) {
  check_length(v.size(), X.cols(), "matvec input");
  out.resize(X.rows());
  std::span<const double> vs(v);
  exec.for_tasks(kReductionBlocks, [&](std::size_t b) {
    auto [begin, end] = reduction_block(X.rows(), b);
    for (std::size_t i = begin; i < end; ++i) out[i] = X.row_dot(i, vs);
  });
}

RealVector matvec(const FeatureMatrix& X, const RealVector& v, const Executor& exec) {
  RealVector out;
  matvec(X, v, out, exec);
  return out;
}

namespace {

// Shared scatter-and-merge core: each reduction block accumulates its
// rows into a private length-n buffer, then the buffers are merged by
// the fixed pairwise tree.
template <typename Scatter>
RealVector blocked_column_accumulate(std::size_t n, const Executor& exec, KernelScratch* scratch,
                                     const Scatter& scatter_block) {
  KernelScratch local;
  KernelScratch& ws = scratch ? *scratch : local;
  double* partials = ws.acquire_zeroed(kReductionBlocks * n);
  exec.for_tasks(kReductionBlocks, [&](std::size_t b) { scatter_block(b, partials + b * n); });
  detail::merge_vector_tree(partials, n);
  return RealVector(partials, partials + n);
}

}  // namespace

RealVector matvec_transpose(const FeatureMatrix& X, const RealVector& u,
                            const Executor& exec, KernelScratch* scratch) {
  check_length(u.size(), X.rows(), "matvec_transpose input");
  return blocked_column_accumulate(X.cols(), exec, scratch, [&](std::size_t b, double* buf) {
    auto [begin, end] = reduction_block(X.rows(), b);
    for (std::size_t i = begin; i < end; ++i) X.row_axpy(i, u[i], buf);
  });
}

FeatureMatrix gather_rows(const FeatureMatrix& X, const IndexSet& I) {
  for (std::int64_t i : I.indices()) {
    if (i < 0 || static_cast<std::size_t>(i) >= X.rows()) {
      throw BoundsError("gather_rows: row " + std::to_string(i) + " outside [0, " +
                        std::to_string(X.rows()) + ")");
    }
  }
  if (X.layout() == Layout::DenseRowMajor) {
    std::vector<double> values(I.size() * X.cols());
    for (std::size_t k = 0; k < I.size(); ++k) {
      const double* src = X.values().data() + static_cast<std::size_t>(I[k]) * X.cols();
      std::memcpy(values.data() + k * X.cols(), src, X.cols() * sizeof(double));
    }
    return FeatureMatrix::dense(I.size(), X.cols(), std::move(values));
  }
  std::vector<std::int64_t> offsets(I.size() + 1, 0);
  for (std::size_t k = 0; k < I.size(); ++k) {
    offsets[k + 1] = offsets[k] + static_cast<std::int64_t>(X.row_size(static_cast<std::size_t>(I[k])));
  }
  std::vector<std::int32_t> cols(static_cast<std::size_t>(offsets.back()));
  std::vector<double> values(static_cast<std::size_t>(offsets.back()));
  auto src_offsets = X.row_offsets();
  for (std::size_t k = 0; k < I.size(); ++k) {
    auto i = static_cast<std::size_t>(I[k]);
    auto begin = static_cast<std::size_t>(src_offsets[i]);
    auto len = X.row_size(i);
    std::memcpy(cols.data() + offsets[k], X.col_indices().data() + begin,
                len * sizeof(std::int32_t));
    std::memcpy(values.data() + offsets[k], X.values().data() + begin, len * sizeof(double));
  }
  return FeatureMatrix::csr(I.size(), X.cols(), std::move(offsets), std::move(cols),
                            std::move(values));
}

RealVector masked_matvec_transpose(const FeatureMatrix& X, const IndexSet& I, const RealVector& u,
                                   const Executor& exec, KernelScratch* scratch) {
  check_length(u.size(), X.rows(), "masked_matvec_transpose input");
  for (std::int64_t i : I.indices()) {
    if (i < 0 || static_cast<std::size_t>(i) >= X.rows()) {
      throw BoundsError("masked_matvec_transpose: row " + std::to_string(i) + " out of range");
    }
  }
  return blocked_column_accumulate(X.cols(), exec, scratch, [&](std::size_t b, double* buf) {
    auto [begin, end] = reduction_block(I.size(), b);
    for (std::size_t k = begin; k < end; ++k) {
      auto i = static_cast<std::size_t>(I[k]);
      X.row_axpy(i, u[i], buf);
    }
  });
}

RealVector weighted_sq_col_sums(const FeatureMatrix& X, const RealVector& weights,
                                const Executor& exec, KernelScratch* scratch) {
  check_length(weights.size(), X.rows(), "weighted_sq_col_sums weights");
  return blocked_column_accumulate(X.cols(), exec, scratch, [&](std::size_t b, double* buf) {
    auto [begin, end] = reduction_block(X.rows(), b);
    for (std::size_t i = begin; i < end; ++i) X.row_axpy_squared(i, weights[i], buf);
  });
}

RealVector masked_sq_col_sums(const FeatureMatrix& X, const IndexSet& I,
                              const Executor& exec, KernelScratch* scratch) {
  return blocked_column_accumulate(X.cols(), exec, scratch, [&](std::size_t b, double* buf) {
    auto [begin, end] = reduction_block(I.size(), b);
    for (std::size_t k = begin; k < end; ++k) {
      X.row_axpy_squared(static_cast<std::size_t>(I[k]), 1.0, buf);
    }
  });
}

double dot(const RealVector& a, const RealVector& b) {
  check_length(b.size(), a.size(), "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

RealVector axpy(double alpha, const RealVector& a, const RealVector& b) {
  check_length(b.size(), a.size(), "axpy");
  RealVector out(b);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += alpha * a[i];
  return out;
}

void axpy_inplace(double alpha, const RealVector& a, RealVector& b) {
  check_length(b.size(), a.size(), "axpy");
  for (std::size_t i = 0; i < a.size(); ++i) b[i] += alpha * a[i];
}

double norm2(const RealVector& a) { return std::sqrt(dot(a, a)); }

}  // namespace tron
