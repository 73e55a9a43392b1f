#pragma once

#include "perdyn/kernels.hpp"
#include "perdyn/methods.hpp"
#include "perdyn/model.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace perdyn {

struct ErrorReport {
  int dof = 0;
  double e_disp = 0.0;
  double e_vel = 0.0;
  bool disp_defined = true;  // false when the reference norm is zero
  bool vel_defined = true;
  Vec series_disp;  // |y_k - y_ref,k| / |y_ref|
  Vec series_vel;
};

// ||y|| = sqrt(sum_k y_k^2) over the grid; e = ||y - y_ref|| / ||y_ref||.
double grid_norm(const Vec& y);
ErrorReport global_error(const Trajectory& test, const Trajectory& reference, int dof);

struct ReferenceSolution {
  Trajectory trajectory;
  int refine = 500;
};

inline constexpr int kMaxRefine = 8000;
inline constexpr double kRk4RefineLimit = 2.5;

// RK4 at dt / refine sampled every refine-th step. refine doubles until
// omega_max dt / refine < 2.5.
ReferenceSolution reference_solution(const SystemModel& model, double dt, double t_max,
                                     int refine = 500);

struct DtSweepRow {
  double dt = 0.0;
  double dt_over_t = 0.0;
  double e_disp = 0.0;
  double e_vel = 0.0;
  bool diverged = false;
};

std::vector<DtSweepRow> sweep_dt(const SystemModel& model, const MethodSpec& spec,
                                 const std::vector<double>& dt_list, double t_max, int dof,
                                 int refine = 500, Execution exec = Execution::parallel);

struct DampingSweepRow {
  double zeta = 0.0;
  double damping_level = 0.0;
  double e_disp = 0.0;
  double e_vel = 0.0;
  double rho_beta_b = 0.0;
  bool diverged = false;
};

// C is scaled by each zeta; rho(beta_b) is reported for every row.
std::vector<DampingSweepRow> sweep_damping(const SystemModel& model_template,
                                           const std::vector<double>& zeta_list, double dt,
                                           const MethodSpec& spec, int dof, double t_max,
                                           int refine = 500,
                                           Execution exec = Execution::parallel);

struct CostModel {
  Method method = Method::per;
  std::map<std::string, std::int64_t> params;
  std::int64_t n3_coeff = 0;
  std::int64_t n2_coeff = 0;
  std::int64_t n1_coeff = 0;
  std::int64_t total_ops = 0;
};

CostModel cost_per(std::int64_t n, std::int64_t p, std::int64_t m_a, std::int64_t m_b,
                   std::int64_t r_a, std::int64_t r_b, std::int64_t steps);
CostModel cost_mpim(std::int64_t n, std::int64_t p, std::int64_t g, std::int64_t steps);
CostModel cost_rk4(std::int64_t n, std::int64_t steps);

struct PolynomialCoefficients {
  std::int64_t n3 = 0, n2 = 0, n1 = 0;
  bool consistent = true;  // the N = 4 evaluation agrees with the fit
};

// Recovers a N^3 + b N^2 + c N from total(N) at N = 1..4 with integer arithmetic.
template <class Fn>
PolynomialCoefficients extract_coefficients(Fn&& total) {
  std::int64_t q[5];
  for (int n = 1; n <= 4; ++n) q[n] = total(static_cast<std::int64_t>(n)) / n;
  PolynomialCoefficients c;
  const std::int64_t d1 = q[2] - q[1], d2 = q[3] - q[2];
  c.n3 = (d2 - d1) / 2;
  c.n2 = d1 - 3 * c.n3;
  c.n1 = q[1] - c.n3 - c.n2;
  for (int n = 1; n <= 4; ++n) {
    if (total(n) != c.n3 * n * n * n + c.n2 * n * n + c.n1 * n) c.consistent = false;
  }
  return c;
}

// N^3 ratio of the PER and MPIM setup costs.
double setup_cost_ratio(std::int64_t p, std::int64_t m_b, std::int64_t r_a, std::int64_t r_b,
                        std::int64_t g);
// PER setup is cheaper than MPIM iff 23 + m_b + 4 r_b < 160 g (m_a = r_a = 2, p = 20).
bool per_cheaper_than_mpim(std::int64_t m_b, std::int64_t r_b, std::int64_t g);

struct TimingResult {
  double setup_seconds = 0.0;
  double loop_seconds = 0.0;
};

// Best of `repeats` for each phase.
TimingResult timing_run(const SystemModel& model, const MethodSpec& spec, double dt,
                        double t_max, int repeats = 3);

// Least-squares slope of log10(e) against log10(dt).
double fit_slope(const std::vector<double>& dt, const std::vector<double>& e);

}  // namespace perdyn
