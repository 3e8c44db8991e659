#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ergolab {

/// Worker count for parallel reductions: ERGOLAB_THREADS if set, otherwise
/// the hardware concurrency.
inline unsigned default_threads() {
  if (const char* env = std::getenv("ERGOLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline constexpr std::size_t kReduceChunk = 2048;

/// Deterministic parallel reduction over [0, count).
///
/// The index range is cut into fixed chunks independent of the thread count.
/// Each chunk is folded serially into its own accumulator, and the chunk
/// accumulators are merged in chunk order, so the result is bitwise identical
/// for any number of threads.
///
///   make()            -> Acc         fresh accumulator
///   add(Acc&, i)                     fold item i
///   merge(Acc&, const Acc&)          fold a later chunk into an earlier one
template <class Acc, class Make, class Add, class Merge>
Acc ordered_reduce(std::size_t count, Make make, Add add, Merge merge, unsigned threads = 0) {
  if (threads == 0) threads = default_threads();
  const std::size_t chunks = (count + kReduceChunk - 1) / kReduceChunk;
  std::vector<Acc> partial;
  partial.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) partial.push_back(make());

  auto run_chunk = [&](std::size_t c) {
    const std::size_t lo = c * kReduceChunk, hi = std::min(count, lo + kReduceChunk);
    for (std::size_t i = lo; i < hi; ++i) add(partial[c], i);
  };

  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < chunks; c = next++) {
          try {
            run_chunk(c);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  Acc total = make();
  for (auto& p : partial) merge(total, p);
  return total;
}

/// Ordered sum of f(i) for scalar-like T (double, std::complex<double>).
template <class T, class F>
T ordered_sum(std::size_t count, F f, unsigned threads = 0) {
  return ordered_reduce<T>(
      count, [] { return T{}; }, [&](T& acc, std::size_t i) { acc += f(i); },
      [](T& a, const T& b) { a += b; }, threads);
}

/// Runs fn(i) for every i in [0, count). Each index is handled exactly once;
/// fn must only write to slots owned by i.
template <class F>
void parallel_for(std::size_t count, F fn, unsigned threads = 0) {
  struct Nothing {};
  ordered_reduce<Nothing>(
      count, [] { return Nothing{}; }, [&](Nothing&, std::size_t i) { fn(i); }, [](Nothing&, const Nothing&) {},
      threads);
}

}  // namespace ergolab
