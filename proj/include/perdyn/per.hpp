#pragma once

#include "perdyn/integrator.hpp"
#include "perdyn/kernels.hpp"
#include "perdyn/model.hpp"
#include "perdyn/types.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <vector>

namespace perdyn {

inline constexpr int kMaxSeriesOrder = 60;

enum class Propagator {
  precise,  // 2^p increment doubling at dt / 2^p with m_a, r_a
  direct,   // (I - beta_b)^{-1} (T_b + alpha_b) at full dt with m_b
};

struct PerConfig {
  double dt = 0.0;
  int p = 20;
  int m_a = 2;
  int r_a = 2;
  int m_b = 8;
  int r_b = 4;
  Propagator propagator = Propagator::precise;
  Execution exec = Execution::parallel;

  void validate() const;
};

struct SchemeMatrices {
  Mat a;
  Mat neumann_b;
  Mat l_b;
  Mat bl;  // neumann_b * l_b
  double rho_beta_a = 0.0;
  double rho_beta_b = 0.0;
};

enum class SeriesKind { T, L, alpha, beta };

// Coefficients of the four series families. Each is written as
// (-1)^j dt^{2j} / (2j + k)! times a shape matrix, k = 0 for T and 4 otherwise.
int series_factorial_offset(SeriesKind kind);

template <class R>
std::array<R, 8> series_shape(SeriesKind kind, int j, R dt) {
  const R jj = static_cast<R>(j);
  std::array<R, 8> s{};
  switch (kind) {
    case SeriesKind::T:
      s = {R(1), dt / (2 * jj + 1), 2 * jj / dt, R(1)};
      break;
    case SeriesKind::L: {
      const R d = dt / (2 * jj + 5);
      s = {(jj + 1) * (8 * jj * jj + 18 * jj + 13) * d,
           36 * (jj + 1) * (jj + 1) * d,
           -9 * (2 * jj * jj + jj - 1) * d,
           2 * (1 + 2 * jj * jj) * d,
           (2 * jj + 1) * (4 * jj * jj + 5 * jj + 3),
           9 * (2 * jj + 1) * (2 * jj + 1),
           -9 * (jj - 1) * (2 * jj + 1),
           4 * jj * jj - 4 * jj + 3};
      for (int c = 0; c < 8; ++c) s[c] *= dt;
      break;
    }
    case SeriesKind::alpha:
      s = {12 * (jj + 1) * dt, -2 * (2 * jj + 1) * (jj + 1) * dt * dt,
           12 * (2 * jj + 1) * (jj + 2), -4 * jj * (2 * jj + 1) * (jj + 2) * dt};
      break;
    case SeriesKind::beta:
      s = {-12 * (jj + 1) * dt, 2 * (2 * jj + 1) * dt * dt, -12 * (2 * jj + 1) * (jj + 2),
           8 * jj * (jj + 2) * dt};
      break;
  }
  return s;
}

inline int series_cols(SeriesKind kind) { return kind == SeriesKind::L ? 4 : 2; }

Mat coeff_t(int j, double dt);
Mat coeff_l(int j, double dt);
Mat coeff_alpha(int j, double dt);
Mat coeff_beta(int j, double dt);

// Cubic Lagrange basis on nodes {0, 1/3, 2/3, 1}.
std::array<double, 4> lagrange_cubic(double xi);

// sum_{j=0}^{m/2} coeff_j(dt) (x) A^j, right-multiplied by I2 (x) M^{-1}C for
// alpha and beta. Scaled powers (-dt^2 A)^j / (2j + k)! keep large A finite.
Mat assemble_series(const SystemModel& model, double dt, int m, SeriesKind kind,
                    Execution exec = Execution::parallel);

// [[G - I, H], [-A H, G - I]] with G, H truncated at m/2; built without forming
// I + (small) so the increment keeps its digits.
Mat assemble_delta_t(const SystemModel& model, double dt, int m,
                     Execution exec = Execution::parallel);

struct PropagatorResult {
  Mat a;
  double rho_beta = 0.0;
};

PropagatorResult compute_a(const SystemModel& model, const PerConfig& config);

SchemeMatrices compute_b_factors(const SystemModel& model, const PerConfig& config);
SchemeMatrices compute_scheme(const SystemModel& model, const PerConfig& config);

// [M^{-1} f(t_k); M^{-1} f(t_k + dt/3); M^{-1} f(t_k + 2dt/3); M^{-1} f(t_k+1)]
Vec force_samples(const SystemModel& model, std::size_t k, double dt);

Trajectory integrate(const SystemModel& model, const PerConfig& config, double t_max);
Trajectory integrate(const SystemModel& model, const PerConfig& config,
                     const SchemeMatrices& scheme, double t_max);

std::unique_ptr<PreparedIntegrator> prepare_per(const SystemModel& model,
                                                const PerConfig& config);

struct AsymptoticResult {
  Trajectory sum;
  // max_k |X_k^(n)| for n = 0..n_terms
  std::vector<double> term_norms;
  // partial sums sum_{i<=n} X_K^(i) at the final step
  std::vector<Vec> final_partial_sums;
  double tail_ratio = 0.0;  // term_ratio(term_norms)
  bool growing = false;     // tail_ratio > 1
  double rho_beta_b = 0.0;
};

inline constexpr int kGrowthRun = 10;

AsymptoticResult integrate_asymptotic(const SystemModel& model, const PerConfig& config,
                                      double t_max, int n_terms);

// True if v grows strictly over `run` consecutive entries somewhere.
bool has_growth_run(const std::vector<double>& v, int run = kGrowthRun);
// Geometric ratio per term from a least-squares fit of log v over the last `window` entries.
double term_ratio(const std::vector<double>& v, int window = 2 * kGrowthRun);

}  // namespace perdyn
