#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace orliczkit {

/// Process-wide worker count used by checkers; 1 means serial.
int worker_count();
void set_worker_count(int n);

/// Runs body(i) for i in [0, n). Each index is executed exactly once and
/// results are stored by index, so any reduction done afterwards is
/// independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace orliczkit
