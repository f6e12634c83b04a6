#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "tron/backend.hpp"
#include "tron/loss.hpp"
#include "tron/tron.hpp"

namespace tron::cli {

// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical
// failure, 5 memory budget exceeded.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;
inline constexpr int kExitBudget = 5;

int run_train(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_predict(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_bench(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Dispatch on the subcommand (train | predict | bench).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchRow {
  std::string config;
  std::vector<double> run_times;
  double min_time = 0.0;
  double speedup = 1.0;
  double objective = 0.0;
  std::size_t outer_iterations = 0;
  bool converged = false;
};

/// Time `runs` solves per configuration (tags like "seq", "par:4",
/// "staged", "mix:2") and report the minimum, with speedups relative to
/// the sequential baseline (or the first row when none is sequential).
std::vector<BenchRow> bench_sweep(const Problem& p, LossKind loss, const TrustRegionConfig& cfg,
                                  const std::vector<std::string>& configs, std::size_t runs,
                                  std::size_t budget_bytes);

}  // namespace tron::cli
