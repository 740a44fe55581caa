#include "pulseforge/util/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace pulseforge::util {

int max_threads() {
  static const int n = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    int t = std::min(hw, 8);
    if (const char* env = std::getenv("PULSEFORGE_THREADS")) {
      int cap = std::atoi(env);
      if (cap >= 1) t = std::min(t, cap);
    }
    return t;
  }();
  return n;
}

namespace {

thread_local bool worker_thread = false;

// Persistent pool. Workers pick contiguous chunks off a shared counter;
// chunk contents are computed serially, so any assignment of chunks to
// threads yields the same result.
class Pool {
 public:
  Pool() : nthreads_(max_threads()) {
    for (int t = 0; t < nthreads_ - 1; ++t) {
      workers_.emplace_back([this] { worker_loop(); });
    }
  }

  ~Pool() {
    {
      std::unique_lock<std::mutex> lk(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
  }

  void run(int n, const std::function<void(int, int)>& f) {
    if (n <= 0) return;
    if (nthreads_ == 1 || n == 1) {
      f(0, n);
      return;
    }
    std::unique_lock<std::mutex> lk(mu_);
    job_ = &f;
    job_n_ = n;
    // ~4 chunks per thread keeps load balanced without scheduling overhead.
    chunk_ = std::max(1, n / (nthreads_ * 4));
    next_.store(0);
    pending_ = nthreads_ - 1;
    ++generation_;
    cv_.notify_all();
    lk.unlock();

    drain();

    lk.lock();
    done_cv_.wait(lk, [this] { return pending_ == 0; });
    job_ = nullptr;
  }

 private:
  void drain() {
    const auto& f = *job_;
    int n = job_n_, c = chunk_;
    for (;;) {
      int b = next_.fetch_add(c);
      if (b >= n) break;
      f(b, std::min(b + c, n));
    }
  }

  void worker_loop() {
    worker_thread = true;
    std::uint64_t seen = 0;
    for (;;) {
      std::unique_lock<std::mutex> lk(mu_);
      cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      lk.unlock();

      drain();

      lk.lock();
      if (--pending_ == 0) done_cv_.notify_all();
    }
  }

  int nthreads_;
  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_, done_cv_;
  const std::function<void(int, int)>* job_ = nullptr;
  int job_n_ = 0, chunk_ = 1, pending_ = 0;
  std::uint64_t generation_ = 0;
  std::atomic<int> next_{0};
  bool stop_ = false;
};

Pool& pool() {
  static Pool p;
  return p;
}

thread_local bool in_parallel_region = false;

}  // namespace

void parallel_for_range(int n, const std::function<void(int, int)>& f) {
  if (in_parallel_region || worker_thread) {  // no nesting; run inline
    f(0, n);
    return;
  }
  in_parallel_region = true;
  struct Reset {
    ~Reset() { in_parallel_region = false; }
  } reset;
  pool().run(n, f);
}

void parallel_for(int n, const std::function<void(int)>& f) {
  parallel_for_range(n, [&](int b, int e) {
    for (int i = b; i < e; ++i) f(i);
  });
}

}  // namespace pulseforge::util
