#include "perdyn/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace perdyn {

FlushDenormals::FlushDenormals() {
#if defined(__SSE2__)
  saved_ = _mm_getcsr();
  _mm_setcsr(saved_ | 0x8040u);  // FTZ | DAZ
#endif
}

FlushDenormals::~FlushDenormals() {
#if defined(__SSE2__)
  _mm_setcsr(saved_);
#endif
}

double spectral_radius_dense(const Mat& a) {
  if (a.size() == 0) return 0.0;
  if (a.isZero(0.0)) return 0.0;
  Eigen::EigenSolver<Mat> es(a, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Two-step norm ratio, so a dominant complex pair still gives a stable estimate.
double spectral_radius_power(const Mat& a, const PowerIterationOptions& opts) {
  if (a.size() == 0 || a.isZero(0.0)) return 0.0;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> dist;
  Vec x(a.rows());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = dist(rng);
  x.normalize();
  double prev = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    Vec y = a * (a * x);
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    const double est = std::sqrt(ny);
    x = y / ny;
    if (it > 0 && std::abs(est - prev) <= opts.tolerance * est) return est;
    prev = est;
  }
  return prev;
}

double spectral_radius(const Mat& a, const PowerIterationOptions& opts) {
  if (a.rows() <= kDenseEigenLimit) return spectral_radius_dense(a);
  return spectral_radius_power(a, opts);
}

Mat neumann_sum(const Mat& b, int r) {
  if (r < 2 || r % 2) throw ValidationError("Neumann order must be even and >= 2");
  const Eigen::Index n = b.rows();
  const Mat id = Mat::Identity(n, n);
  const Mat b2 = b * b;
  Mat s = id + b + b2;
  for (int k = 2; k <= r / 2; ++k) s = id + b + b2 * s;
  return s;
}

void double_increment(Mat& delta, int p) {
  // Entries far from the band underflow; subnormal arithmetic would dominate the cost.
  const FlushDenormals guard;
  for (int i = 0; i < p; ++i) {
    Mat sq = delta * delta;
    delta = 2.0 * delta + sq;
  }
}

bool all_finite(const Mat& a) { return a.allFinite(); }

double relative_asymmetry(const Mat& a) {
  const double n = a.norm();
  if (n == 0.0) return 0.0;
  return (a - a.transpose()).norm() / n;
}

}  // namespace perdyn
