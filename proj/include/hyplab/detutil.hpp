#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace hyplab {

// Neumaier compensated accumulator. Reductions across enumeration chunks are
// merged in a fixed chunk order, so totals are bit-identical for any thread
// count; the compensation keeps them accurate for long sums.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  void merge(const KahanSum& o) {
    add(o.sum);
    comp += o.comp;
  }
  double get() const { return sum + comp; }
};

// splitmix64: tiny counter-based generator. Unlike <random> distributions its
// output is pinned by the algorithm alone, so seeded test vectors are
// bit-reproducible across compilers and across thread counts.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic stream: value i of stream `seed` never depends on how many
// values were drawn before it.
struct DetRng {
  std::uint64_t seed;
  std::uint64_t ctr = 0;
  explicit DetRng(std::uint64_t s) : seed(s) {}
  std::uint64_t next_u64() { return splitmix64(seed * 0x9e3779b97f4a7c15ULL + ctr++); }
  // uniform in [0,1)
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  // uniform integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }
};

// Runs tasks 0..n-1 on up to `threads` workers. Chunking is by task index, so
// any result a task produces can be merged in index order by the caller;
// thread count only affects wall time, never results.
inline void parallel_tasks(std::size_t n, int threads, const std::function<void(std::size_t)>& task) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (n == 0) return;
  if (threads == 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        task(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace hyplab
