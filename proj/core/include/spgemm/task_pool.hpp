#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace spgemm {

// Counts outstanding tasks of one phase; wait() blocks until they all
// finished. add() must happen-before the matching done() (add before
// submitting the task, or from inside a task that has not called done yet).
class WaitGroup {
 public:
  void add(std::int64_t n = 1);
  void done();
  void wait();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::int64_t outstanding_ = 0;
};

// Fixed-size FIFO worker pool. Tasks submitted earlier start earlier,
// which is what the launch-rank scheduling of the pipeline relies on.
class TaskPool {
 public:
  explicit TaskPool(int workers);
  ~TaskPool();

  TaskPool(const TaskPool&) = delete;
  TaskPool& operator=(const TaskPool&) = delete;

  int worker_count() const { return static_cast<int>(threads_.size()); }

  // Runs fn on some worker thread. fn must not block on tasks queued
  // behind it.
  void submit(std::function<void()> fn);

  // Submits body(begin, end) chunks covering [0, n) and waits for all of
  // them. chunk <= 0 picks a balanced default.
  void parallel_for(std::int64_t n, std::int64_t chunk,
                    const std::function<void(std::int64_t, std::int64_t)>& body);

  // Index of the calling pool thread in [0, worker_count()), or -1 when
  // called from a non-pool thread. Used to pick per-worker scratch.
  static int this_worker_index();

  static int default_workers();

 private:
  void worker_main(int index);

  std::vector<std::thread> threads_;
  std::deque<std::function<void()>> queue_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool stop_ = false;
};

}  // namespace spgemm
