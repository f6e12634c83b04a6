#pragma once

// Deterministic fixture generation. splitmix64 plus explicit mappings to
// doubles, so fixtures are bit-identical on every platform (the standard
// library's distributions are implementation-defined).

#include <cstdint>
#include <vector>

#include "tron/loss.hpp"

namespace testgen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Uniform integer in [0, bound) by rejection-free scaling (bound small).
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

 private:
  std::uint64_t state_;
};

/// Dense problem with labels from a random separator plus label noise.
tron::Problem dense_problem(std::uint64_t seed, std::size_t l, std::size_t n, double C,
                            double flip_fraction = 0.1);

/// Dense problem with feature values scaled up. With a large C the
/// quadratic model overshoots and the solver rejects some steps, which
/// several schedule tests need to observe.
tron::Problem dense_problem_scaled(std::uint64_t seed, std::size_t l, std::size_t n, double C,
                                   double scale, double flip_fraction = 0.02);

/// CSR problem, expected `density` nonzeros per entry.
tron::Problem sparse_problem(std::uint64_t seed, std::size_t l, std::size_t n, double C,
                             double density = 0.1, double flip_fraction = 0.1);

/// Random weight vector with entries in [-span, span].
tron::RealVector random_vector(std::uint64_t seed, std::size_t n, double span = 1.0);

/// Random strictly ascending index subset of [0, l) with expected size
/// fraction * l (at least 1 when fraction > 0 and l > 0).
tron::IndexSet random_index_set(std::uint64_t seed, std::size_t l, double fraction);

}  // namespace testgen
