#pragma once

#include "perdyn/kernels.hpp"
#include "perdyn/model.hpp"

#include <complex>
#include <utility>
#include <vector>

namespace perdyn {

struct SigmaEigen {
  int m = 0;
  double tau = 0.0;
  std::complex<double> mu1, mu2;
  double modulus_max = 0.0;
};

// 1 / (2 sqrt 3)
inline const double kSigmaLimit = 1.0 / (2.0 * std::sqrt(3.0));

// Scalar sigma_m(tau); `dt` is a similarity placeholder that does not change the moduli.
Eigen::Matrix2d sigma_matrix(int m, double tau, double dt = 1.0);
SigmaEigen sigma_eigenvalues(int m, double tau, double dt = 1.0);

inline constexpr double kTauScanStep = 0.01;
inline constexpr double kTauScanMax = 100.0;
inline constexpr double kTauTolerance = 1e-8;

// Smallest tau > 0 where rho(sigma_m(tau)) rises through 1/(2 sqrt 3).
// Throws NumericalError when no crossing exists below kTauScanMax.
double tau_limit(int m);

// Crossing of the eigenvalue with the smaller real part alone. Diagnostic only.
double tau_limit_branch_crossing(int m);

struct DtBound {
  double damping_bound = 0.0;
  double truncation_bound = 0.0;
  double dt_max = 0.0;
};

DtBound dt_bound(const SystemModel& model, int m);
DtBound dt_bound(double rho_minv_c, double omega_max, int m);

struct StabilityInterval {
  double lower = 0.0;
  double upper = 0.0;
};

struct StabilityRecord {
  double zeta = 0.0;
  int m_a = 2;
  int r_a = 2;
  std::vector<std::pair<double, double>> grid;  // (dt0 / T, max |lambda|)
  std::vector<StabilityInterval> boundaries;
};

inline constexpr double kStabilityBisectionTol = 1e-9;

// max|lambda|^2 - 1 of the SDOF a(dt0) with omega = 2 pi (T = 1); noise-level
// values are clamped to 0.
double sdof_amplification_excess(double zeta, int m_a, int r_a, double dt0_over_t);

StabilityRecord sdof_stability_map(double zeta, int m_a, int r_a, int p, double grid_max,
                                   double grid_step, Execution exec = Execution::parallel);

std::vector<std::pair<double, double>> beta_radius_map(const SystemModel& model,
                                                       const std::vector<double>& dt_values,
                                                       int m_b,
                                                       Execution exec = Execution::parallel);

}  // namespace perdyn
