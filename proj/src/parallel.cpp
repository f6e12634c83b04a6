#include "tron/parallel.hpp"

namespace tron {

WorkerPool::WorkerPool(unsigned workers) {
  if (workers < 1) workers = 1;
  threads_.reserve(workers - 1);
  for (unsigned i = 0; i + 1 < workers; ++i) {
    threads_.emplace_back([this] { worker_loop(); });
  }
}

WorkerPool::~WorkerPool() {
  {
    std::unique_lock<std::mutex> lock(mutex_);
    shutdown_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run(std::size_t count, const std::function<void(std::size_t)>& task) {
  if (count == 0) return;
  if (threads_.empty()) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  {
    std::unique_lock<std::mutex> lock(mutex_);
    task_ = &task;
    task_count_ = count;
    next_task_ = 0;
    in_flight_ = 0;
    ++generation_;
  }
  start_cv_.notify_all();

  // The calling thread works alongside the pool.
  for (;;) {
    std::size_t idx;
    {
      std::unique_lock<std::mutex> lock(mutex_);
      if (next_task_ >= task_count_) break;
      idx = next_task_++;
      ++in_flight_;
    }
    task(idx);
    {
      std::unique_lock<std::mutex> lock(mutex_);
      --in_flight_;
      if (next_task_ >= task_count_ && in_flight_ == 0) done_cv_.notify_all();
    }
  }

  std::unique_lock<std::mutex> lock(mutex_);
  done_cv_.wait(lock, [this] { return next_task_ >= task_count_ && in_flight_ == 0; });
  task_ = nullptr;
}

void WorkerPool::worker_loop() {
  std::size_t seen_generation = 0;
  for (;;) {
    const std::function<void(std::size_t)>* task;
    {
      std::unique_lock<std::mutex> lock(mutex_);
      start_cv_.wait(lock, [&] {
        return shutdown_ || (task_ != nullptr && generation_ != seen_generation);
      });
      if (shutdown_) return;
      seen_generation = generation_;
      task = task_;
    }
    for (;;) {
      std::size_t idx;
      {
        std::unique_lock<std::mutex> lock(mutex_);
        if (task_ != task || next_task_ >= task_count_) break;
        idx = next_task_++;
        ++in_flight_;
      }
      (*task)(idx);
      {
        std::unique_lock<std::mutex> lock(mutex_);
        --in_flight_;
        if (next_task_ >= task_count_ && in_flight_ == 0) done_cv_.notify_all();
      }
    }
  }
}

double reduce_sum(std::span<const double> values, const Executor& exec) {
  std::array<double, kReductionBlocks> partials{};
  exec.for_tasks(kReductionBlocks, [&](std::size_t b) {
    auto [begin, end] = reduction_block(values.size(), b);
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += values[i];
    partials[b] = acc;
  });
  return detail::merge_scalar_tree(partials);
}

}  // namespace tron
