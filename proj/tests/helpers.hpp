#pragma once

#include "perdyn/model.hpp"

#include <cmath>
#include <random>

namespace testing_util {

using perdyn::Mat;
using perdyn::SystemModel;
using perdyn::Vec;

inline SystemModel sdof(double omega, double zeta, double u0 = 1.0, double v0 = 0.0,
                        double mass = 1.0) {
  return SystemModel(Mat::Constant(1, 1, mass), Mat::Constant(1, 1, 2.0 * zeta * omega * mass),
                     Mat::Constant(1, 1, omega * omega * mass), {}, Vec::Constant(1, u0),
                     Vec::Constant(1, v0));
}

inline double energy(const SystemModel& m, const Vec& state) {
  const Eigen::Index n = m.dof();
  const Vec u = state.head(n), v = state.tail(n);
  return 0.5 * u.dot(m.stiffness() * u) + 0.5 * v.dot(m.mass() * v);
}

// Random SPD mass, SPD stiffness and PSD damping of rank <= n.
inline SystemModel random_system(int n, unsigned seed, double damping_scale = 1.0) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist;
  auto rnd = [&](int r, int c) {
    Mat x(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) x(i, j) = dist(gen);
    return x;
  };
  const Mat a = rnd(n, n), b = rnd(n, n), c = rnd(n, n / 2);
  const Mat m = a * a.transpose() / n + Mat::Identity(n, n);
  const Mat k = 100.0 * (b * b.transpose() / n + 0.1 * Mat::Identity(n, n));
  const Mat d = damping_scale * c * c.transpose() / n;
  return SystemModel(m, 0.5 * (d + d.transpose()), 0.5 * (k + k.transpose()), {},
                     Vec::Ones(n), Vec::Zero(n));
}

}  // namespace testing_util
