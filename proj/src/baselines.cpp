#include "perdyn/baselines.hpp"

#include "perdyn/linalg.hpp"

#include "detail.hpp"

#include <cmath>
#include <string>

namespace perdyn {

StateSpaceSystem state_space(const SystemModel& model) {
  const Eigen::Index n = model.dof();
  StateSpaceSystem s;
  s.w = Mat::Zero(2 * n, 2 * n);
  s.w.topRightCorner(n, n).setIdentity();
  s.w.bottomLeftCorner(n, n) = -model.minv_k();
  s.w.bottomRightCorner(n, n) = -model.minv_c();
  if (model.has_force()) {
    s.h = [model, n](double t) {
      Vec h = Vec::Zero(2 * n);
      h.tail(n) = model.solve_mass(model.force(t));
      return h;
    };
  }
  return s;
}

namespace {

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive and finite");
}

Eigen::LDLT<Mat> factor(const Mat& a, const char* what) {
  Eigen::LDLT<Mat> f(a);
  if (f.info() != Eigen::Success || !(f.vectorD().array() > 0.0).all())
    throw NumericalError(std::string("singular effective matrix in ") + what);
  return f;
}

Vec initial_acceleration(const SystemModel& m) {
  return m.solve_mass(Vec(m.force(0.0) - m.damping() * m.v0() - m.stiffness() * m.u0()));
}

Vec stack(const Vec& u, const Vec& v) { return StateVector{u, v}.stacked(); }

class NewmarkIntegrator final : public PreparedIntegrator {
 public:
  NewmarkIntegrator(const SystemModel& model, double dt, NewmarkParams p)
      : model_(model), dt_(dt) {
    check_dt(dt);
    if (!(p.beta > 0.0)) throw ValidationError("newmark beta must be > 0");
    const double g = p.gamma, b = p.beta;
    c_ = {1.0 / (b * dt * dt), g / (b * dt), 1.0 / (b * dt), 1.0 / (2.0 * b) - 1.0,
          g / b - 1.0, dt / 2.0 * (g / b - 2.0), dt * (1.0 - g), g * dt};
    keff_ = factor(model.stiffness() + c_[0] * model.mass() + c_[1] * model.damping(), "newmark");
  }

  Trajectory run(double t_max) const override {
    const std::size_t steps = step_count(dt_, t_max);
    const auto& m = model_;
    detail::TrajectoryBuilder out(2 * m.dof(), steps, dt_);
    Vec u = m.u0(), v = m.v0(), a = initial_acceleration(m);
    detail::DivergenceMonitor mon(stack(u, v).norm());
    out.set(0, stack(u, v));
    std::string why;
    for (std::size_t k = 0; k < steps; ++k) {
      const Vec f = m.force(static_cast<double>(k + 1) * dt_);
      mon.add_input(dt_ * dt_ * m.solve_mass(f).norm());
      const Vec rhs = f + m.mass() * (c_[0] * u + c_[2] * v + c_[3] * a) +
                      m.damping() * (c_[1] * u + c_[4] * v + c_[5] * a);
      const Vec u1 = keff_.solve(rhs);
      const Vec a1 = c_[0] * (u1 - u) - c_[2] * v - c_[3] * a;
      v += c_[6] * a + c_[7] * a1;
      u = u1;
      a = a1;
      const Vec s = stack(u, v);
      if (mon.check(s, why)) return out.diverge(k + 1, why);
      out.set(k + 1, s);
    }
    return out.finish();
  }

 private:
  SystemModel model_;
  double dt_;
  std::array<double, 8> c_{};
  Eigen::LDLT<Mat> keff_;
};

class WilsonIntegrator final : public PreparedIntegrator {
 public:
  WilsonIntegrator(const SystemModel& model, double dt, double theta)
      : model_(model), dt_(dt), theta_(theta) {
    check_dt(dt);
    if (!(theta >= 1.0)) throw ValidationError("wilson theta must be >= 1");
    const double tau = theta * dt;
    a0_ = 6.0 / (tau * tau);
    a1_ = 3.0 / tau;
    a2_ = 2.0 * a1_;
    a3_ = tau / 2.0;
    a4_ = a0_ / theta;
    a5_ = -a2_ / theta;
    a6_ = 1.0 - 3.0 / theta;
    a7_ = dt / 2.0;
    a8_ = dt * dt / 6.0;
    keff_ = factor(model.stiffness() + a0_ * model.mass() + a1_ * model.damping(), "wilson");
  }

  Trajectory run(double t_max) const override {
    const std::size_t steps = step_count(dt_, t_max);
    const auto& m = model_;
    detail::TrajectoryBuilder out(2 * m.dof(), steps, dt_);
    Vec u = m.u0(), v = m.v0(), a = initial_acceleration(m);
    detail::DivergenceMonitor mon(stack(u, v).norm());
    out.set(0, stack(u, v));
    Vec f0 = m.force(0.0);
    std::string why;
    for (std::size_t k = 0; k < steps; ++k) {
      const Vec f1 = m.force(static_cast<double>(k + 1) * dt_);
      mon.add_input(dt_ * dt_ * m.solve_mass(f1).norm());
      const Vec rhs = f0 + theta_ * (f1 - f0) + m.mass() * (a0_ * u + a2_ * v + 2.0 * a) +
                      m.damping() * (a1_ * u + 2.0 * v + a3_ * a);
      const Vec ut = keff_.solve(rhs);
      const Vec a1 = a4_ * (ut - u) + a5_ * v + a6_ * a;
      const Vec v1 = v + a7_ * (a1 + a);
      u += dt_ * v + a8_ * (a1 + 2.0 * a);
      v = v1;
      a = a1;
      f0 = f1;
      const Vec s = stack(u, v);
      if (mon.check(s, why)) return out.diverge(k + 1, why);
      out.set(k + 1, s);
    }
    return out.finish();
  }

 private:
  SystemModel model_;
  double dt_, theta_;
  double a0_, a1_, a2_, a3_, a4_, a5_, a6_, a7_, a8_;
  Eigen::LDLT<Mat> keff_;
};

// Trapezoidal sub-step over gamma dt, then a 3-point backward sub-step.
class BatheIntegrator final : public PreparedIntegrator {
 public:
  BatheIntegrator(const SystemModel& model, double dt, double gamma)
      : model_(model), dt_(dt), gamma_(gamma) {
    check_dt(dt);
    if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("bathe gamma must be in (0, 1)");
    h1_ = gamma * dt;
    c1_ = (1.0 - gamma) / (gamma * dt);
    c2_ = -1.0 / ((1.0 - gamma) * gamma * dt);
    c3_ = (2.0 - gamma) / ((1.0 - gamma) * dt);
    k1_ = factor(model.stiffness() + 4.0 / (h1_ * h1_) * model.mass() +
                     2.0 / h1_ * model.damping(),
                 "bathe trapezoidal sub-step");
    k2_ = factor(model.stiffness() + c3_ * c3_ * model.mass() + c3_ * model.damping(),
                 "bathe backward sub-step");
  }

  Trajectory run(double t_max) const override {
    const std::size_t steps = step_count(dt_, t_max);
    const auto& m = model_;
    detail::TrajectoryBuilder out(2 * m.dof(), steps, dt_);
    Vec u = m.u0(), v = m.v0(), a = initial_acceleration(m);
    detail::DivergenceMonitor mon(stack(u, v).norm());
    out.set(0, stack(u, v));
    std::string why;
    for (std::size_t k = 0; k < steps; ++k) {
      const double tk = static_cast<double>(k) * dt_;
      const Vec fm = m.force(tk + h1_);
      const Vec f1 = m.force(tk + dt_);
      mon.add_input(dt_ * dt_ * m.solve_mass(f1).norm());
      const Vec rhs1 = fm + m.mass() * (4.0 / (h1_ * h1_) * u + 4.0 / h1_ * v + a) +
                       m.damping() * (2.0 / h1_ * u + v);
      const Vec um = k1_.solve(rhs1);
      const Vec vm = 2.0 / h1_ * (um - u) - v;
      const Vec pv = c1_ * u + c2_ * um;
      const Vec pa = c1_ * v + c2_ * vm;
      const Vec rhs2 = f1 - m.mass() * (pa + c3_ * pv) - m.damping() * pv;
      const Vec u1 = k2_.solve(rhs2);
      const Vec v1 = pv + c3_ * u1;
      a = pa + c3_ * v1;
      u = u1;
      v = v1;
      const Vec s = stack(u, v);
      if (mon.check(s, why)) return out.diverge(k + 1, why);
      out.set(k + 1, s);
    }
    return out.finish();
  }

 private:
  SystemModel model_;
  double dt_, gamma_, h1_, c1_, c2_, c3_;
  Eigen::LDLT<Mat> k1_, k2_;
};

Vec eval_h(const StateSpaceSystem& s, double t, Eigen::Index n2) {
  if (!s.h) return Vec::Zero(n2);
  Vec h = s.h(t);
  if (h.size() != n2 || !h.allFinite()) throw NumericalError("invalid h(t) sample");
  return h;
}

void check_system(const StateSpaceSystem& s, const StateVector& u0) {
  if (s.w.rows() != s.w.cols() || s.w.rows() % 2)
    throw ValidationError("W must be square with even size");
  if (u0.displacement.size() != u0.velocity.size() ||
      2 * u0.displacement.size() != s.w.rows())
    throw ValidationError("initial state does not match W");
}

class Rk4Integrator final : public PreparedIntegrator {
 public:
  // Fine steps of dt / every; every `every`-th state is recorded.
  Rk4Integrator(StateSpaceSystem s, StateVector u0, double dt, int every = 1)
      : sys_(std::move(s)), u0_(std::move(u0)), dt_(dt), every_(every) {
    check_dt(dt);
    check_system(sys_, u0_);
    if (every < 1) throw ValidationError("refine must be >= 1");
  }

  Trajectory run(double t_max) const override {
    const std::size_t steps = step_count(dt_, t_max);
    const Eigen::Index n2 = sys_.w.rows();
    detail::TrajectoryBuilder out(n2, steps, dt_);
    Vec u = u0_.stacked();
    detail::DivergenceMonitor mon(u.norm());
    out.set(0, u);
    const bool forced = static_cast<bool>(sys_.h);
    const double h = dt_ / every_;
    std::string why;
    Vec k1(n2), k2(n2), k3(n2), k4(n2);
    const std::size_t fine_steps = steps * static_cast<std::size_t>(every_);
    for (std::size_t k = 0; k < fine_steps; ++k) {
      const double t = static_cast<double>(k) * h;
      Vec h0, hm, h1;
      if (forced) {
        h0 = eval_h(sys_, t, n2);
        hm = eval_h(sys_, t + 0.5 * h, n2);
        h1 = eval_h(sys_, t + h, n2);
        mon.add_input(h * h0.norm());
      }
      k1.noalias() = sys_.w * u;
      if (forced) k1 += h0;
      k2.noalias() = sys_.w * (u + 0.5 * h * k1);
      if (forced) k2 += hm;
      k3.noalias() = sys_.w * (u + 0.5 * h * k2);
      if (forced) k3 += hm;
      k4.noalias() = sys_.w * (u + h * k3);
      if (forced) k4 += h1;
      u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if ((k + 1) % static_cast<std::size_t>(every_)) continue;
      const std::size_t kc = (k + 1) / static_cast<std::size_t>(every_);
      if (mon.check(u, why)) return out.diverge(kc, why);
      out.set(kc, u);
    }
    return out.finish();
  }

 private:
  StateSpaceSystem sys_;
  StateVector u0_;
  double dt_;
  int every_;
};

class MpimIntegrator final : public PreparedIntegrator {
 public:
  MpimIntegrator(StateSpaceSystem s, StateVector u0, double dt, int g, int p)
      : sys_(std::move(s)), u0_(std::move(u0)), dt_(dt) {
    check_dt(dt);
    check_system(sys_, u0_);
    if (p < 1) throw ValidationError("mpim p must be >= 1");
    rule_ = gauss_legendre(g);
    hdt_ = mpim_exponential(sys_.w, dt, p);
    if (sys_.h) {
      for (double eta : rule_.nodes) {
        kernels_.push_back(mpim_exponential(sys_.w, dt / 2.0 * (1.0 - eta), p));
        offsets_.push_back(dt / 2.0 * (1.0 + eta));
      }
    }
  }

  Trajectory run(double t_max) const override {
    const std::size_t steps = step_count(dt_, t_max);
    const Eigen::Index n2 = sys_.w.rows();
    detail::TrajectoryBuilder out(n2, steps, dt_);
    Vec u = u0_.stacked();
    detail::DivergenceMonitor mon(u.norm());
    out.set(0, u);
    std::string why;
    Vec next(n2);
    for (std::size_t k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * dt_;
      next.noalias() = hdt_ * u;
      if (sys_.h) {
        Vec w = Vec::Zero(n2);
        for (std::size_t i = 0; i < kernels_.size(); ++i)
          w.noalias() += rule_.weights[i] * (kernels_[i] * eval_h(sys_, t + offsets_[i], n2));
        w *= dt_ / 2.0;
        mon.add_input(w.norm());
        next += w;
      }
      u.swap(next);
      if (mon.check(u, why)) return out.diverge(k + 1, why);
      out.set(k + 1, u);
    }
    return out.finish();
  }

 private:
  StateSpaceSystem sys_;
  StateVector u0_;
  double dt_;
  GaussRule rule_;
  Mat hdt_;
  std::vector<Mat> kernels_;
  std::vector<double> offsets_;
};

}  // namespace

std::unique_ptr<PreparedIntegrator> prepare_newmark(const SystemModel& model, double dt,
                                                    const NewmarkParams& params) {
  return std::make_unique<NewmarkIntegrator>(model, dt, params);
}
std::unique_ptr<PreparedIntegrator> prepare_wilson(const SystemModel& model, double dt,
                                                   double theta) {
  return std::make_unique<WilsonIntegrator>(model, dt, theta);
}
std::unique_ptr<PreparedIntegrator> prepare_bathe(const SystemModel& model, double dt,
                                                  double gamma) {
  return std::make_unique<BatheIntegrator>(model, dt, gamma);
}
std::unique_ptr<PreparedIntegrator> prepare_rk4(const StateSpaceSystem& system,
                                                const StateVector& u0, double dt) {
  return std::make_unique<Rk4Integrator>(system, u0, dt);
}
std::unique_ptr<PreparedIntegrator> prepare_mpim(const StateSpaceSystem& system,
                                                 const StateVector& u0, double dt, int g,
                                                 int p) {
  return std::make_unique<MpimIntegrator>(system, u0, dt, g, p);
}

Trajectory newmark(const SystemModel& model, double dt, double t_max,
                   const NewmarkParams& params) {
  return NewmarkIntegrator(model, dt, params).run(t_max);
}
Trajectory wilson(const SystemModel& model, double dt, double t_max, double theta) {
  return WilsonIntegrator(model, dt, theta).run(t_max);
}
Trajectory bathe(const SystemModel& model, double dt, double t_max, double gamma) {
  return BatheIntegrator(model, dt, gamma).run(t_max);
}
Trajectory rk4(const StateSpaceSystem& system, const StateVector& u0, double dt,
               double t_max) {
  return Rk4Integrator(system, u0, dt).run(t_max);
}
Trajectory rk4_subsampled(const StateSpaceSystem& system, const StateVector& u0, double dt,
                          double t_max, int refine) {
  return Rk4Integrator(system, u0, dt, refine).run(t_max);
}
Trajectory mpim(const StateSpaceSystem& system, const StateVector& u0, double dt,
                double t_max, int g, int p) {
  return MpimIntegrator(system, u0, dt, g, p).run(t_max);
}

Mat mpim_exponential(const Mat& w, double t, int p) {
  if (p < 1) throw ValidationError("p must be >= 1");
  const Eigen::Index n = w.rows();
  if (t == 0.0) return Mat::Identity(n, n);
  const Mat x = w * std::ldexp(t, -p);
  const Mat x2 = x * x;
  Mat inner = Mat::Identity(n, n) + x / 3.0 + x2 / 12.0;
  Mat delta = x + 0.5 * (x2 * inner);
  double_increment(delta, p);
  if (!delta.allFinite()) throw NumericalError("non-finite exponential");
  return Mat::Identity(n, n) + delta;
}

GaussRule gauss_legendre(int g) {
  switch (g) {
    case 2:
      return {{-0.57735026918962576451, 0.57735026918962576451}, {1.0, 1.0}};
    case 3:
      return {{-0.77459666924148337704, 0.0, 0.77459666924148337704},
              {0.55555555555555555556, 0.88888888888888888889, 0.55555555555555555556}};
    case 4:
      return {{-0.86113631159405257522, -0.33998104358485626480, 0.33998104358485626480,
               0.86113631159405257522},
              {0.34785484513745385737, 0.65214515486254614263, 0.65214515486254614263,
               0.34785484513745385737}};
    case 5:
      return {{-0.90617984593866399280, -0.53846931010568309104, 0.0, 0.53846931010568309104,
               0.90617984593866399280},
              {0.23692688505618908751, 0.47862867049936646804, 0.56888888888888888889,
               0.47862867049936646804, 0.23692688505618908751}};
    case 6:
      return {{-0.93246951420315202781, -0.66120938646626451366, -0.23861918608319690863,
               0.23861918608319690863, 0.66120938646626451366, 0.93246951420315202781},
              {0.17132449237917034504, 0.36076157304813860757, 0.46791393457269104739,
               0.46791393457269104739, 0.36076157304813860757, 0.17132449237917034504}};
    default:
      throw ValidationError("Gauss-Legendre rule available for g = 2..6 only");
  }
}

}  // namespace perdyn
