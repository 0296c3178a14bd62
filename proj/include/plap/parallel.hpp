#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace plap {

inline std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  const auto hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// out[i] = fn(i) for i < n, evaluated on up to `workers` threads. Results are
/// placed by index, so the output never depends on scheduling. The first
/// exception thrown by fn is rethrown after all workers join.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, std::size_t workers, Fn&& fn) {
  std::vector<T> out(n);
  workers = std::min(resolve_workers(workers), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace plap
