#pragma once

#include <array>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace tron {

// =============================================================================
// Worker pool and deterministic reduction machinery.
//
// Every instance-dimension reduction in the library runs over a fixed
// partition of kReductionBlocks blocks merged by a fixed-shape pairwise
// tree. The shape depends only on the data length, never on the worker
// count, so sequential and parallel execution produce bit-identical
// results.
// =============================================================================

inline constexpr std::size_t kReductionBlocks = 64;

struct BlockRange {
  std::size_t begin;
  std::size_t end;
};

/// Half-open row range owned by reduction block `b` for `len` items.
inline BlockRange reduction_block(std::size_t len, std::size_t b) {
  return {len * b / kReductionBlocks, len * (b + 1) / kReductionBlocks};
}

/// Long-lived pool of worker threads. run() dispatches `count` task
/// indices to the workers and blocks until all have completed; the
/// calling thread participates.
class WorkerPool {
 public:
  explicit WorkerPool(unsigned workers);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  unsigned workers() const { return static_cast<unsigned>(threads_.size()) + 1; }

  void run(std::size_t count, const std::function<void(std::size_t)>& task);

 private:
  void worker_loop();

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t)>* task_ = nullptr;
  std::size_t task_count_ = 0;
  std::size_t next_task_ = 0;
  std::size_t in_flight_ = 0;
  std::size_t generation_ = 0;
  bool shutdown_ = false;
};

/// Execution context handed to kernels: either inline on the calling
/// thread or fanned out across a pool. The arithmetic performed is
/// identical either way.
class Executor {
 public:
  Executor() = default;
  explicit Executor(WorkerPool* pool) : pool_(pool) {}

  bool parallel() const { return pool_ != nullptr && pool_->workers() > 1; }

  void for_tasks(std::size_t count, const std::function<void(std::size_t)>& task) const {
    if (parallel()) {
      pool_->run(count, task);
    } else {
      for (std::size_t i = 0; i < count; ++i) task(i);
    }
  }

 private:
  WorkerPool* pool_ = nullptr;
};

namespace detail {

/// Pairwise in-place tree merge of the block partials; result in s[0].
inline double merge_scalar_tree(std::array<double, kReductionBlocks>& s) {
  for (std::size_t stride = 1; stride < kReductionBlocks; stride *= 2) {
    for (std::size_t i = 0; i + stride < kReductionBlocks; i += 2 * stride) {
      s[i] += s[i + stride];
    }
  }
  return s[0];
}

/// Same tree over kReductionBlocks contiguous buffers of length n.
inline void merge_vector_tree(double* partials, std::size_t n) {
  for (std::size_t stride = 1; stride < kReductionBlocks; stride *= 2) {
    for (std::size_t i = 0; i + stride < kReductionBlocks; i += 2 * stride) {
      double* dst = partials + i * n;
      const double* src = partials + (i + stride) * n;
      for (std::size_t j = 0; j < n; ++j) dst[j] += src[j];
    }
  }
}

}  // namespace detail

/// Fixed-shape blocked sum of `values`; identical for any worker count.
double reduce_sum(std::span<const double> values, const Executor& exec = {});

/// Scratch buffers reused across kernel invocations by a single flow.
struct KernelScratch {
  std::vector<double> partials;

  double* acquire_zeroed(std::size_t len) {
    partials.assign(len, 0.0);
    return partials.data();
  }
};

}  // namespace tron
