#include "cbf/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <vector>

namespace cbf::par {

namespace {

int g_threads = 1;

// Minimal persistent pool. Work items are contiguous index ranges taken from
// a shared atomic cursor; used only for disjoint-write maps and per-chunk
// reductions, so grab order never influences results.
class Pool {
 public:
  static Pool& instance() {
    static Pool p;
    return p;
  }

  void run(int nworkers, int64_t nchunks,
           const std::function<void(int64_t)>& chunk_fn) {
    std::unique_lock<std::mutex> lk(m_);
    ensure_workers(nworkers - 1);
    chunk_fn_ = &chunk_fn;
    cursor_.store(0, std::memory_order_relaxed);
    nchunks_ = nchunks;
    pending_ = static_cast<int>(workers_.size());
    ++epoch_;
    cv_start_.notify_all();
    lk.unlock();

    drain();  // caller participates

    lk.lock();
    cv_done_.wait(lk, [&] { return pending_ == 0; });
    chunk_fn_ = nullptr;
  }

 private:
  Pool() = default;
  ~Pool() {
    {
      std::lock_guard<std::mutex> lk(m_);
      stop_ = true;
      ++epoch_;
      cv_start_.notify_all();
    }
    for (auto& t : workers_) t.join();
  }

  void ensure_workers(int n) {
    while (static_cast<int>(workers_.size()) < n) {
      workers_.emplace_back([this] { worker_loop(); });
    }
  }

  void drain() {
    const auto* fn = chunk_fn_;
    for (;;) {
      const int64_t c = cursor_.fetch_add(1, std::memory_order_relaxed);
      if (c >= nchunks_) break;
      (*fn)(c);
    }
  }

  void worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
      std::unique_lock<std::mutex> lk(m_);
      cv_start_.wait(lk, [&] { return epoch_ != seen; });
      seen = epoch_;
      if (stop_) return;
      lk.unlock();
      drain();
      lk.lock();
      if (--pending_ == 0) cv_done_.notify_all();
    }
  }

  std::mutex m_;
  std::condition_variable cv_start_, cv_done_;
  std::vector<std::thread> workers_;
  const std::function<void(int64_t)>* chunk_fn_ = nullptr;
  std::atomic<int64_t> cursor_{0};
  int64_t nchunks_ = 0;
  int pending_ = 0;
  std::uint64_t epoch_ = 0;
  bool stop_ = false;
};

}  // namespace

int threads() { return g_threads; }

void set_threads(int n) { g_threads = n < 1 ? 1 : n; }

void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& fn) {
  if (n <= 0) return;
  const int nw = g_threads;
  if (nw == 1 || n == 1) {
    fn(0, n);
    return;
  }
  const int64_t nchunks = std::min<int64_t>(n, int64_t{4} * nw);
  const int64_t chunk = (n + nchunks - 1) / nchunks;
  std::function<void(int64_t)> body = [&](int64_t c) {
    const int64_t b = c * chunk;
    const int64_t e = std::min(n, b + chunk);
    if (b < e) fn(b, e);
  };
  Pool::instance().run(nw, nchunks, body);
}

double ordered_sum(int64_t nchunks, const std::function<double(int64_t)>& fn) {
  std::vector<double> part(static_cast<size_t>(nchunks));
  if (g_threads == 1 || nchunks == 1) {
    for (int64_t c = 0; c < nchunks; ++c) part[c] = fn(c);
  } else {
    std::function<void(int64_t)> body = [&](int64_t c) { part[c] = fn(c); };
    Pool::instance().run(g_threads, nchunks, body);
  }
  double r = 0.0;
  for (int64_t c = 0; c < nchunks; ++c) r += part[c];
  return r;
}

double ordered_max(int64_t nchunks, const std::function<double(int64_t)>& fn) {
  std::vector<double> part(static_cast<size_t>(nchunks));
  if (g_threads == 1 || nchunks == 1) {
    for (int64_t c = 0; c < nchunks; ++c) part[c] = fn(c);
  } else {
    std::function<void(int64_t)> body = [&](int64_t c) { part[c] = fn(c); };
    Pool::instance().run(g_threads, nchunks, body);
  }
  double r = 0.0;
  for (int64_t c = 0; c < nchunks; ++c) r = part[c] > r ? part[c] : r;
  return r;
}

}  // namespace cbf::par
