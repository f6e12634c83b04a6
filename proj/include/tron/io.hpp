#pragma once

#include <cstddef>
#include <iosfwd>

#include "tron/loss.hpp"

namespace tron {

struct DatasetStats {
  std::size_t instances = 0;
  std::size_t features = 0;
  std::size_t nonzeros = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

/// Parse LIBSVM sparse text: `label idx:val idx:val ...` per line with
/// 1-based strictly ascending indices. Labels must be -1, 0 (mapped to
/// -1) or +1. Blank lines are skipped. The feature count is the largest
/// index seen unless n_override > 0 pins it. C is left at 1.0.
Problem parse_libsvm(std::istream& in, std::size_t n_override = 0);

/// Inverse of parse_libsvm; values are written with shortest
/// round-trip formatting so a parse reproduces them bit-equal.
void write_libsvm(const Problem& p, std::ostream& out);

/// Parse dense whitespace text: `label v1 v2 ... vn` per line.
Problem load_dense(std::istream& in, std::size_t n);

DatasetStats dataset_stats(const Problem& p);

}  // namespace tron
