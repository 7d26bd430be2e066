#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace kglit {

/// Persistent worker pool for data-parallel loops. parallel_for partitions
/// [0, n) into static contiguous chunks, one per participant (the calling
/// thread works too). Each output element is computed by exactly one thread
/// with a fixed-order inner loop, so results do not depend on the thread
/// count.
class ThreadPool {
 public:
  explicit ThreadPool(unsigned threads);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  unsigned threads() const { return static_cast<unsigned>(workers_.size()) + 1; }

  void parallel_for(std::size_t n,
                    const std::function<void(std::size_t, std::size_t)>& body);

 private:
  void worker_loop(unsigned index);

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t, std::size_t)>* body_ = nullptr;
  std::size_t job_n_ = 0;
  std::uint64_t generation_ = 0;
  unsigned pending_ = 0;
  bool stop_ = false;
};

/// Process-wide pool. Defaults to KGLIT_THREADS or hardware concurrency;
/// set_global_threads rebuilds it (call before training starts).
ThreadPool& global_pool();
void set_global_threads(unsigned n);
unsigned default_thread_count();

}  // namespace kglit
