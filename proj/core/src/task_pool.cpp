#include "spgemm/task_pool.hpp"

#include <algorithm>
#include <stdexcept>

namespace spgemm {

namespace {
thread_local int tls_worker_index = -1;
}

void WaitGroup::add(std::int64_t n) {
  std::lock_guard lock(mu_);
  outstanding_ += n;
}

void WaitGroup::done() {
  std::lock_guard lock(mu_);
  if (--outstanding_ == 0) {
    cv_.notify_all();
  }
}

void WaitGroup::wait() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return outstanding_ == 0; });
}

TaskPool::TaskPool(int workers) {
  if (workers <= 0) {
    workers = default_workers();
  }
  threads_.reserve(static_cast<std::size_t>(workers));
  for (int i = 0; i < workers; ++i) {
    threads_.emplace_back([this, i] { worker_main(i); });
  }
}

TaskPool::~TaskPool() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  for (std::thread& t : threads_) {
    t.join();
  }
}

int TaskPool::default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

int TaskPool::this_worker_index() { return tls_worker_index; }

void TaskPool::submit(std::function<void()> fn) {
  {
    std::lock_guard lock(mu_);
    queue_.push_back(std::move(fn));
  }
  cv_.notify_one();
}

void TaskPool::parallel_for(std::int64_t n, std::int64_t chunk,
                            const std::function<void(std::int64_t, std::int64_t)>& body) {
  if (n <= 0) {
    return;
  }
  if (chunk <= 0) {
    chunk = std::max<std::int64_t>(1, n / (8 * worker_count()));
  }
  WaitGroup wg;
  for (std::int64_t begin = 0; begin < n; begin += chunk) {
    const std::int64_t end = std::min(n, begin + chunk);
    wg.add();
    submit([&body, &wg, begin, end] {
      body(begin, end);
      wg.done();
    });
  }
  wg.wait();
}

void TaskPool::worker_main(int index) {
  tls_worker_index = index;
  for (;;) {
    std::function<void()> task;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [this] { return stop_ || !queue_.empty(); });
      if (queue_.empty()) {
        return;  // stop_ set and queue drained
      }
      task = std::move(queue_.front());
      queue_.pop_front();
    }
    task();
  }
}

}  // namespace spgemm
