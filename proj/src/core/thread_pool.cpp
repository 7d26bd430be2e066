#include "kglit/core/thread_pool.hpp"

#include <cstdlib>
#include <memory>
#include <string>

namespace kglit {

ThreadPool::ThreadPool(unsigned threads) {
  const unsigned extra = threads > 1 ? threads - 1 : 0;
  workers_.reserve(extra);
  for (unsigned i = 0; i < extra; ++i) {
    workers_.emplace_back([this, i] { worker_loop(i); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto& w : workers_) w.join();
}

namespace {

// Chunk w of [0, n) split across p participants.
inline std::pair<std::size_t, std::size_t> chunk(std::size_t n, unsigned p,
                                                 unsigned w) {
  const std::size_t base = n / p;
  const std::size_t rem = n % p;
  const std::size_t begin = w * base + std::min<std::size_t>(w, rem);
  const std::size_t len = base + (w < rem ? 1 : 0);
  return {begin, begin + len};
}

}  // namespace

void ThreadPool::worker_loop(unsigned index) {
  std::uint64_t seen = 0;
  for (;;) {
    const std::function<void(std::size_t, std::size_t)>* body = nullptr;
    std::size_t n = 0;
    {
      std::unique_lock<std::mutex> lock(mu_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      body = body_;
      n = job_n_;
    }
    auto [b, e] = chunk(n, threads(), index + 1);
    if (b < e) (*body)(b, e);
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (--pending_ == 0) done_cv_.notify_all();
    }
  }
}

void ThreadPool::parallel_for(
    std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  if (workers_.empty() || n == 1) {
    body(0, n);
    return;
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    body_ = &body;
    job_n_ = n;
    pending_ = static_cast<unsigned>(workers_.size());
    ++generation_;
  }
  start_cv_.notify_all();
  auto [b, e] = chunk(n, threads(), 0);
  if (b < e) body(b, e);
  {
    std::unique_lock<std::mutex> lock(mu_);
    done_cv_.wait(lock, [&] { return pending_ == 0; });
  }
}

namespace {
std::unique_ptr<ThreadPool> g_pool;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("KGLIT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

ThreadPool& global_pool() {
  if (!g_pool) g_pool = std::make_unique<ThreadPool>(default_thread_count());
  return *g_pool;
}

void set_global_threads(unsigned n) {
  g_pool = std::make_unique<ThreadPool>(n == 0 ? 1 : n);
}

}  // namespace kglit
