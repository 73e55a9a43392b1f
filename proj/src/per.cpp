#include "perdyn/per.hpp"

#include "perdyn/analysis.hpp"
#include "perdyn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace perdyn {

namespace {

constexpr double kDivergenceFactor = 1e12;

void check_even(int v, const char* name) {
  if (v < 2 || v % 2) throw ValidationError(std::string(name) + " must be even and >= 2");
}

}  // namespace

void PerConfig::validate() const {
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be finite and >= 0");
  if (p < 1) throw ValidationError("p must be >= 1");
  check_even(m_a, "m_a");
  check_even(r_a, "r_a");
  check_even(m_b, "m_b");
  check_even(r_b, "r_b");
  if (m_a > kMaxSeriesOrder || m_b > kMaxSeriesOrder)
    throw ValidationError("series order exceeds the cap of " + std::to_string(kMaxSeriesOrder));
}

PropagatorResult compute_a(const SystemModel& model, const PerConfig& config) {
  config.validate();
  const Eigen::Index n2 = 2 * model.dof();
  const Mat id = Mat::Identity(n2, n2);
  if (config.dt == 0.0) return {id, 0.0};

  if (config.propagator == Propagator::direct) {
    const Mat t = assemble_series(model, config.dt, config.m_b, SeriesKind::T, config.exec);
    const Mat al = assemble_series(model, config.dt, config.m_b, SeriesKind::alpha, config.exec);
    const Mat be = assemble_series(model, config.dt, config.m_b, SeriesKind::beta, config.exec);
    Mat a = (id - be).partialPivLu().solve(t + al);
    if (!a.allFinite()) throw NumericalError("non-finite entries in a(dt)");
    return {a, spectral_radius(be)};
  }

  const double dt0 = std::ldexp(config.dt, -config.p);
  const Mat dtm = assemble_delta_t(model, dt0, config.m_a, config.exec);
  const Mat al = assemble_series(model, dt0, config.m_a, SeriesKind::alpha, config.exec);
  const Mat be = assemble_series(model, dt0, config.m_a, SeriesKind::beta, config.exec);
  Mat dbeta = be;
  for (int k = 2; k <= config.r_a; ++k) dbeta = be + be * dbeta;
  const Mat base = dtm + al;
  Mat da = base + dbeta + dbeta * base;
  double_increment(da, config.p);
  if (!da.allFinite()) throw NumericalError("non-finite entries in a(dt) after doubling");
  return {id + da, spectral_radius(be)};
}

SchemeMatrices compute_b_factors(const SystemModel& model, const PerConfig& config) {
  config.validate();
  const Eigen::Index n2 = 2 * model.dof();
  SchemeMatrices s;
  const Mat be = assemble_series(model, config.dt, config.m_b, SeriesKind::beta, config.exec);
  s.l_b = assemble_series(model, config.dt, config.m_b, SeriesKind::L, config.exec);
  if (config.propagator == Propagator::direct)
    s.neumann_b = (Mat::Identity(n2, n2) - be).partialPivLu().solve(Mat::Identity(n2, n2));
  else
    s.neumann_b = neumann_sum(be, config.r_b);
  s.rho_beta_b = spectral_radius(be);
  s.bl = s.neumann_b * s.l_b;
  return s;
}

SchemeMatrices compute_scheme(const SystemModel& model, const PerConfig& config) {
  SchemeMatrices s = compute_b_factors(model, config);
  PropagatorResult a = compute_a(model, config);
  s.a = std::move(a.a);
  s.rho_beta_a = a.rho_beta;
  return s;
}

namespace {

Vec mass_solved_force(const SystemModel& model, double t) {
  Vec f = model.force(t);
  if (!f.allFinite()) throw NumericalError("non-finite force sample at t = " + std::to_string(t));
  return model.solve_mass(f);
}

// Forces are sampled at t_k + i dt / 3, i = 0..3; the last sample is reused.
class ForceSampler {
 public:
  ForceSampler(const SystemModel& model, double dt) : model_(model), dt_(dt) {}

  const Vec& at(std::size_t k) {
    const Eigen::Index n = model_.dof();
    if (g_.size() == 0) g_.resize(4 * n);
    const double tk = static_cast<double>(k) * dt_;
    if (have_next_ && next_k_ == k) {
      g_.head(n) = g_.tail(n).eval();
    } else {
      g_.head(n) = mass_solved_force(model_, tk);
    }
    g_.segment(n, n) = mass_solved_force(model_, tk + dt_ / 3.0);
    g_.segment(2 * n, n) = mass_solved_force(model_, tk + 2.0 * dt_ / 3.0);
    g_.tail(n) = mass_solved_force(model_, static_cast<double>(k + 1) * dt_);
    have_next_ = true;
    next_k_ = k + 1;
    return g_;
  }

 private:
  const SystemModel& model_;
  double dt_;
  Vec g_;
  bool have_next_ = false;
  std::size_t next_k_ = 0;
};

DtBound safe_dt_bound(const SystemModel& model, int m) {
  try {
    return dt_bound(model, m);
  } catch (const std::exception&) {
    const double inf = std::numeric_limits<double>::infinity();
    return {inf, inf, inf};
  }
}

}  // namespace

Vec force_samples(const SystemModel& model, std::size_t k, double dt) {
  const Eigen::Index n = model.dof();
  Vec g(4 * n);
  const double tk = static_cast<double>(k) * dt;
  g.head(n) = mass_solved_force(model, tk);
  g.segment(n, n) = mass_solved_force(model, tk + dt / 3.0);
  g.segment(2 * n, n) = mass_solved_force(model, tk + 2.0 * dt / 3.0);
  g.tail(n) = mass_solved_force(model, static_cast<double>(k + 1) * dt);
  return g;
}

Trajectory integrate(const SystemModel& model, const PerConfig& config, double t_max) {
  return integrate(model, config, compute_scheme(model, config), t_max);
}

Trajectory integrate(const SystemModel& model, const PerConfig& config,
                     const SchemeMatrices& scheme, double t_max) {
  const std::size_t steps = step_count(config.dt, t_max);
  const Eigen::Index n2 = 2 * model.dof();
  Trajectory tr;
  tr.times.resize(steps + 1);
  tr.states.resize(n2, static_cast<Eigen::Index>(steps + 1));
  if (scheme.rho_beta_b >= 1.0)
    tr.warnings.push_back("rho(beta_b) = " + std::to_string(scheme.rho_beta_b) +
                          " >= 1; the Neumann truncation does not converge");
  Vec u = model.initial_state();
  tr.times[0] = 0.0;
  tr.states.col(0) = u;
  ForceSampler sampler(model, config.dt);
  double scale = u.norm();
  Vec next(n2);
  for (std::size_t k = 0; k < steps; ++k) {
    next.noalias() = scheme.a * u;
    if (model.has_force()) {
      const Vec b = scheme.bl * sampler.at(k);
      scale += b.norm();
      next += b;
    }
    const double nn = next.norm();
    if (!next.allFinite() || nn > kDivergenceFactor * scale) {
      const DtBound bound = safe_dt_bound(model, config.m_b);
      tr.divergence = Divergence{k + 1, static_cast<double>(k + 1) * config.dt,
                                 next.allFinite() ? "state norm exceeded growth limit"
                                                  : "non-finite state",
                                 scheme.rho_beta_b, bound.dt_max};
      tr.times.resize(k + 1);
      tr.states.conservativeResize(n2, static_cast<Eigen::Index>(k + 1));
      return tr;
    }
    u.swap(next);
    tr.times[k + 1] = static_cast<double>(k + 1) * config.dt;
    tr.states.col(static_cast<Eigen::Index>(k + 1)) = u;
  }
  return tr;
}

namespace {

class PerIntegrator final : public PreparedIntegrator {
 public:
  PerIntegrator(const SystemModel& model, const PerConfig& config)
      : model_(model), config_(config), scheme_(compute_scheme(model, config)) {}

  Trajectory run(double t_max) const override {
    return integrate(model_, config_, scheme_, t_max);
  }
  double rho_beta_b() const override { return scheme_.rho_beta_b; }

 private:
  SystemModel model_;
  PerConfig config_;
  SchemeMatrices scheme_;
};

}  // namespace

std::unique_ptr<PreparedIntegrator> prepare_per(const SystemModel& model,
                                                const PerConfig& config) {
  return std::make_unique<PerIntegrator>(model, config);
}

bool has_growth_run(const std::vector<double>& v, int run) {
  int count = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    count = v[i] > v[i - 1] ? count + 1 : 0;
    if (count >= run) return true;
  }
  return false;
}

double term_ratio(const std::vector<double>& v, int window) {
  const std::size_t w = std::min<std::size_t>(v.size(), static_cast<std::size_t>(window));
  if (w < 2) return 0.0;
  const std::size_t start = v.size() - w;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < w; ++i) {
    const double x = static_cast<double>(i);
    const double y = std::log(std::max(v[start + i], std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(w);
  return std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx));
}

AsymptoticResult integrate_asymptotic(const SystemModel& model, const PerConfig& config,
                                      double t_max, int n_terms) {
  config.validate();
  if (n_terms < 0) throw ValidationError("n_terms must be >= 0");
  const std::size_t steps = step_count(config.dt, t_max);
  const Eigen::Index n2 = 2 * model.dof();
  const Eigen::Index cols = static_cast<Eigen::Index>(steps + 1);
  const double dt = config.dt;
  const Mat t = assemble_series(model, dt, config.m_b, SeriesKind::T, config.exec);
  const Mat l = assemble_series(model, dt, config.m_b, SeriesKind::L, config.exec);
  const Mat al = assemble_series(model, dt, config.m_b, SeriesKind::alpha, config.exec);
  const Mat be = assemble_series(model, dt, config.m_b, SeriesKind::beta, config.exec);

  AsymptoticResult res;
  res.rho_beta_b = spectral_radius(be);
  Mat prev(n2, cols), cur(n2, cols);
  Vec next(n2);

  // X^(0): undamped recursion driven by the interpolated force.
  cur.col(0) = model.initial_state();
  ForceSampler sampler(model, dt);
  for (Eigen::Index k = 0; k + 1 < cols; ++k) {
    next.noalias() = t * cur.col(k);
    if (model.has_force()) {
      const Vec b = l * sampler.at(static_cast<std::size_t>(k));
      next += b;
    }
    cur.col(k + 1) = next;
  }
  Mat total = cur;
  auto record = [&](const Mat& level) {
    res.term_norms.push_back(level.colwise().norm().maxCoeff());
    res.final_partial_sums.push_back(total.col(cols - 1));
  };
  record(cur);

  for (int n = 1; n <= n_terms; ++n) {
    prev.swap(cur);
    cur.col(0).setZero();
    for (Eigen::Index k = 0; k + 1 < cols; ++k) {
      next.noalias() = t * cur.col(k);
      next.noalias() += al * prev.col(k);
      next.noalias() += be * prev.col(k + 1);
      cur.col(k + 1) = next;
    }
    total += cur;
    record(cur);
    if (!total.allFinite()) break;
  }
  res.tail_ratio = term_ratio(res.term_norms);
  res.growing = res.tail_ratio > 1.0 || !total.allFinite();
  res.sum.times.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) res.sum.times[k] = static_cast<double>(k) * dt;
  res.sum.states = std::move(total);
  if (res.growing)
    res.sum.warnings.push_back("asymptotic terms grow; rho(beta_b) = " +
                               std::to_string(res.rho_beta_b));
  return res;
}

}  // namespace perdyn
