#include "perdyn/bench.hpp"

#include "perdyn/baselines.hpp"
#include "perdyn/linalg.hpp"
#include "perdyn/per.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace perdyn {

double grid_norm(const Vec& y) { return y.norm(); }

ErrorReport global_error(const Trajectory& test, const Trajectory& reference, int dof) {
  if (test.size() != reference.size())
    throw ValidationError("trajectories are on different grids (" + std::to_string(test.size()) +
                          " vs " + std::to_string(reference.size()) + " samples)");
  for (std::size_t k = 0; k < test.size(); ++k) {
    const double a = test.times[k], b = reference.times[k];
    if (std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}))
      throw ValidationError("trajectory time grids differ");
  }
  if (dof < 0 || dof >= test.dof() || test.dof() != reference.dof())
    throw ValidationError("dof out of range");
  ErrorReport r;
  r.dof = dof;
  auto one = [](const Vec& y, const Vec& yr, double& e, bool& defined, Vec& series) {
    const double nr = grid_norm(yr);
    if (nr == 0.0) {
      defined = false;
      e = std::numeric_limits<double>::quiet_NaN();
      series = Vec::Constant(y.size(), std::numeric_limits<double>::quiet_NaN());
      return;
    }
    series = (y - yr).cwiseAbs() / nr;
    e = grid_norm(y - yr) / nr;
  };
  one(test.displacement_history(dof), reference.displacement_history(dof), r.e_disp,
      r.disp_defined, r.series_disp);
  one(test.velocity_history(dof), reference.velocity_history(dof), r.e_vel, r.vel_defined,
      r.series_vel);
  return r;
}

ReferenceSolution reference_solution(const SystemModel& model, double dt, double t_max,
                                     int refine) {
  if (refine < 1) throw ValidationError("refine must be >= 1");
  const double w = modal_analysis(model).omega_max();
  while (w * dt / refine >= kRk4RefineLimit) {
    if (refine >= kMaxRefine)
      throw ValidationError("RK4 reference unstable even at refine = " +
                            std::to_string(kMaxRefine));
    refine = std::min(2 * refine, kMaxRefine);
  }
  ReferenceSolution out;
  out.refine = refine;
  out.trajectory =
      rk4_subsampled(state_space(model), {model.u0(), model.v0()}, dt, t_max, refine);
  if (out.trajectory.diverged()) throw NumericalError("RK4 reference diverged");
  return out;
}

namespace {

MethodSpec serial_spec(MethodSpec spec) {
  spec.per.exec = Execution::serial;
  return spec;
}

}  // namespace

std::vector<DtSweepRow> sweep_dt(const SystemModel& model, const MethodSpec& spec,
                                 const std::vector<double>& dt_list, double t_max, int dof,
                                 int refine, Execution exec) {
  for (double dt : dt_list)
    if (!(dt > 0.0)) throw ValidationError("dt values must be > 0");
  const double period = modal_analysis(model).min_period();
  const MethodSpec inner = serial_spec(spec);
  return map_indexed<DtSweepRow>(
      dt_list.size(),
      [&](std::size_t i) {
        const double dt = dt_list[i];
        DtSweepRow row;
        row.dt = dt;
        row.dt_over_t = dt / period;
        const Trajectory test = run_method(model, inner, dt, t_max);
        if (test.diverged()) {
          row.diverged = true;
          row.e_disp = row.e_vel = std::numeric_limits<double>::quiet_NaN();
          return row;
        }
        const ReferenceSolution ref = reference_solution(model, dt, t_max, refine);
        const ErrorReport e = global_error(test, ref.trajectory, dof);
        row.e_disp = e.e_disp;
        row.e_vel = e.e_vel;
        return row;
      },
      exec);
}

std::vector<DampingSweepRow> sweep_damping(const SystemModel& model_template,
                                           const std::vector<double>& zeta_list, double dt,
                                           const MethodSpec& spec, int dof, double t_max,
                                           int refine, Execution exec) {
  for (double z : zeta_list)
    if (!(z >= 0.0)) throw ValidationError("zeta values must be >= 0");
  const MethodSpec inner = serial_spec(spec);
  return map_indexed<DampingSweepRow>(
      zeta_list.size(),
      [&](std::size_t i) {
        const SystemModel model = model_template.scaled_damping(zeta_list[i]);
        DampingSweepRow row;
        row.zeta = zeta_list[i];
        row.damping_level = damping_level(model);
        row.rho_beta_b = spectral_radius(
            assemble_series(model, dt, spec.per.m_b, SeriesKind::beta, Execution::serial));
        const Trajectory test = run_method(model, inner, dt, t_max);
        row.diverged = test.diverged() || (spec.method == Method::per && row.rho_beta_b >= 1.0);
        if (test.diverged()) {
          row.e_disp = row.e_vel = std::numeric_limits<double>::quiet_NaN();
          return row;
        }
        const ReferenceSolution ref = reference_solution(model, dt, t_max, refine);
        const ErrorReport e = global_error(test, ref.trajectory, dof);
        row.e_disp = e.e_disp;
        row.e_vel = e.e_vel;
        return row;
      },
      exec);
}

namespace {

void check_positive(std::int64_t v, const char* name) {
  if (v < 1) throw ValidationError(std::string(name) + " must be a positive integer");
}

void finish(CostModel& c, std::int64_t n) {
  c.params["N"] = n;
  c.total_ops = c.n3_coeff * n * n * n + c.n2_coeff * n * n + c.n1_coeff * n;
}

}  // namespace

CostModel cost_per(std::int64_t n, std::int64_t p, std::int64_t m_a, std::int64_t m_b,
                   std::int64_t r_a, std::int64_t r_b, std::int64_t steps) {
  for (auto [v, name] : {std::pair{n, "N"}, {p, "p"}, {m_a, "m_a"}, {m_b, "m_b"},
                         {r_a, "r_a"}, {r_b, "r_b"}, {steps, "steps"}})
    check_positive(v, name);
  CostModel c;
  c.method = Method::per;
  c.params = {{"p", p}, {"m_a", m_a}, {"m_b", m_b}, {"r_a", r_a}, {"r_b", r_b},
              {"steps", steps}};
  c.n3_coeff = 33 + 4 * (r_a + r_b) + 8 * p + m_b;
  // 11 m_a / 2 is integral for the even m_a the scheme requires
  c.n2_coeff = 11 * m_a / 2 + 8 * m_b + 24 + 4 * steps;
  c.n1_coeff = 8 * steps;
  finish(c, n);
  return c;
}

CostModel cost_mpim(std::int64_t n, std::int64_t p, std::int64_t g, std::int64_t steps) {
  for (auto [v, name] : {std::pair{n, "N"}, {p, "p"}, {g, "g"}, {steps, "steps"}})
    check_positive(v, name);
  CostModel c;
  c.method = Method::mpim;
  c.params = {{"p", p}, {"g", g}, {"steps", steps}};
  c.n3_coeff = 18 + 8 * p * (1 + g);
  c.n2_coeff = 4 * g + 4 * steps;
  c.n1_coeff = 0;
  finish(c, n);
  return c;
}

CostModel cost_rk4(std::int64_t n, std::int64_t steps) {
  check_positive(n, "N");
  check_positive(steps, "steps");
  CostModel c;
  c.method = Method::rk4;
  c.params = {{"steps", steps}};
  c.n3_coeff = 2;
  c.n2_coeff = 16 * steps;
  c.n1_coeff = 8 * steps;
  finish(c, n);
  return c;
}

double setup_cost_ratio(std::int64_t p, std::int64_t m_b, std::int64_t r_a, std::int64_t r_b,
                        std::int64_t g) {
  const double per = static_cast<double>(33 + 4 * (r_a + r_b) + 8 * p + m_b);
  const double mp = static_cast<double>(18 + 8 * (1 + g) * p);
  return per / mp;
}

bool per_cheaper_than_mpim(std::int64_t m_b, std::int64_t r_b, std::int64_t g) {
  return 23 + m_b + 4 * r_b < 160 * g;
}

TimingResult timing_run(const SystemModel& model, const MethodSpec& spec, double dt,
                        double t_max, int repeats) {
  using clock = std::chrono::steady_clock;
  TimingResult best{std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
  for (int r = 0; r < std::max(1, repeats); ++r) {
    const auto t0 = clock::now();
    auto integrator = prepare(model, spec, dt);
    const auto t1 = clock::now();
    double loop = 0.0;
    if (t_max > 0.0) {
      const Trajectory tr = integrator->run(t_max);
      loop = std::chrono::duration<double>(clock::now() - t1).count();
    }
    best.setup_seconds = std::min(best.setup_seconds, std::chrono::duration<double>(t1 - t0).count());
    best.loop_seconds = std::min(best.loop_seconds, loop);
  }
  return best;
}

double fit_slope(const std::vector<double>& dt, const std::vector<double>& e) {
  if (dt.size() != e.size() || dt.size() < 2) throw ValidationError("need >= 2 points to fit");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(dt.size());
  for (std::size_t i = 0; i < dt.size(); ++i) {
    const double x = std::log10(dt[i]), y = std::log10(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace perdyn
