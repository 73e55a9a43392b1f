#pragma once

#include "perdyn/integrator.hpp"
#include "perdyn/model.hpp"
#include "perdyn/types.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace perdyn {

// U' = W U + h(t), U = [u; v]
struct StateSpaceSystem {
  Mat w;
  std::function<Vec(double)> h;
};

StateSpaceSystem state_space(const SystemModel& model);

struct NewmarkParams {
  double gamma = 0.5;
  double beta = 0.25;
};

Trajectory newmark(const SystemModel& model, double dt, double t_max,
                   const NewmarkParams& params = {});
Trajectory wilson(const SystemModel& model, double dt, double t_max, double theta = 1.4);
Trajectory bathe(const SystemModel& model, double dt, double t_max, double gamma = 0.5);
Trajectory rk4(const StateSpaceSystem& system, const StateVector& u0, double dt,
               double t_max);
// RK4 with step dt / refine, keeping every refine-th state (coarse grid dt).
Trajectory rk4_subsampled(const StateSpaceSystem& system, const StateVector& u0, double dt,
                          double t_max, int refine);
Trajectory mpim(const StateSpaceSystem& system, const StateVector& u0, double dt,
                double t_max, int g = 4, int p = 20);

std::unique_ptr<PreparedIntegrator> prepare_newmark(const SystemModel& model, double dt,
                                                    const NewmarkParams& params = {});
std::unique_ptr<PreparedIntegrator> prepare_wilson(const SystemModel& model, double dt,
                                                   double theta = 1.4);
std::unique_ptr<PreparedIntegrator> prepare_bathe(const SystemModel& model, double dt,
                                                  double gamma = 0.5);
std::unique_ptr<PreparedIntegrator> prepare_rk4(const StateSpaceSystem& system,
                                                const StateVector& u0, double dt);
std::unique_ptr<PreparedIntegrator> prepare_mpim(const StateSpaceSystem& system,
                                                 const StateVector& u0, double dt, int g = 4,
                                                 int p = 20);

// exp(W t) by a 4th order Taylor increment at t / 2^p followed by p doublings.
Mat mpim_exponential(const Mat& w, double t, int p = 20);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Hardcoded nodes and weights on [-1, 1] for g = 2..6.
GaussRule gauss_legendre(int g);

}  // namespace perdyn
