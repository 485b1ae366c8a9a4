#include "lpl/rng.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>

namespace lpl {

double GaussianStream::normal(std::uint64_t idx) const {
  const double u1 = uniform(2 * idx);
  const double u2 = uniform(2 * idx + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Vector GaussianStream::normal_vector(std::uint64_t step, int d) const {
  Vector z(d);
  const std::uint64_t base = step * static_cast<std::uint64_t>(d);
  for (int i = 0; i < d; ++i) z[i] = normal(base + i);
  return z;
}

Vector GaussianStream::unit_vector(std::uint64_t step, int d) const {
  Vector z = normal_vector(step, d);
  double n = z.norm();
  while (n < 1e-12) {  // virtually impossible; reseed forward deterministically
    step += 0x0f0f0f0f0f0f0f0fULL;
    z = normal_vector(step, d);
    n = z.norm();
  }
  return z / n;
}

int worker_count() {
  static const int n = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("LPL_THREADS")) {
      const int cap = std::atoi(env);
      if (cap >= 1 && cap < hw) hw = cap;
    }
    return hw;
  }();
  return n;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const int workers = std::min(worker_count(), n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr err;
  std::mutex err_mu;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace lpl
