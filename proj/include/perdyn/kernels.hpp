#pragma once

#include "perdyn/types.hpp"

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <vector>

namespace perdyn {

enum class Execution { serial, parallel };

// sum_j coeffs[j] (x) blocks[j]; coeffs are r x c, blocks are n x n.
Mat kron_accumulate(const std::vector<Mat>& coeffs, const std::vector<Mat>& blocks,
                    Execution exec = Execution::parallel);
Mat kron_accumulate_serial(const std::vector<Mat>& coeffs, const std::vector<Mat>& blocks);
Mat kron_accumulate_parallel(const std::vector<Mat>& coeffs, const std::vector<Mat>& blocks);

int max_threads();

// Calls fn(i) for i in [0, n). Results land in slot i regardless of schedule.
template <class T, class Fn>
std::vector<T> map_indexed(std::size_t n, Fn&& fn, Execution exec = Execution::parallel) {
  std::vector<T> out(n);
  if (exec == Execution::serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::exception_ptr err;
  std::mutex err_mutex;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace perdyn
