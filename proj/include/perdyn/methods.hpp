#pragma once

#include "perdyn/baselines.hpp"
#include "perdyn/integrator.hpp"
#include "perdyn/model.hpp"
#include "perdyn/per.hpp"

#include <memory>
#include <optional>
#include <string>

namespace perdyn {

enum class Method { per, newmark, wilson, bathe, rk4, mpim };

std::string method_name(Method m);
std::optional<Method> parse_method(const std::string& name);

struct MethodSpec {
  Method method = Method::per;
  PerConfig per;  // dt is overridden by the run
  NewmarkParams newmark;
  double wilson_theta = 1.4;
  double bathe_gamma = 0.5;
  int mpim_g = 4;
  int mpim_p = 20;

  void validate() const;
};

std::unique_ptr<PreparedIntegrator> prepare(const SystemModel& model, const MethodSpec& spec,
                                            double dt);

Trajectory run_method(const SystemModel& model, const MethodSpec& spec, double dt,
                      double t_max);

}  // namespace perdyn
