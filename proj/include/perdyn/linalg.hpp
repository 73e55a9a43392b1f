#pragma once

#include "perdyn/types.hpp"

#include <cstdint>

namespace perdyn {

inline constexpr Eigen::Index kDenseEigenLimit = 200;
inline constexpr std::uint64_t kPowerIterationSeed = 0x5eed2024ULL;

struct PowerIterationOptions {
  double tolerance = 1e-6;
  int max_iterations = 10000;
  std::uint64_t seed = kPowerIterationSeed;
};

// Dense eigensolve up to kDenseEigenLimit rows, power iteration above.
double spectral_radius(const Mat& a, const PowerIterationOptions& opts = {});
double spectral_radius_dense(const Mat& a);
double spectral_radius_power(const Mat& a, const PowerIterationOptions& opts = {});

// I + B + ... + B^r for even r >= 2, nested so it costs r/2 products.
Mat neumann_sum(const Mat& b, int r);

// Flush-to-zero and denormals-are-zero on the calling thread for the guard's lifetime.
class FlushDenormals {
 public:
  FlushDenormals();
  ~FlushDenormals();
  FlushDenormals(const FlushDenormals&) = delete;
  FlushDenormals& operator=(const FlushDenormals&) = delete;

 private:
  unsigned saved_ = 0;
};

// delta <- 2 delta + delta^2, applied p times.
void double_increment(Mat& delta, int p);

bool all_finite(const Mat& a);

double relative_asymmetry(const Mat& a);

}  // namespace perdyn
