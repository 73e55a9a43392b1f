#include "perdyn/methods.hpp"

namespace perdyn {

std::string method_name(Method m) {
  switch (m) {
    case Method::per: return "per";
    case Method::newmark: return "newmark";
    case Method::wilson: return "wilson";
    case Method::bathe: return "bathe";
    case Method::rk4: return "rk4";
    case Method::mpim: return "mpim";
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& name) {
  for (Method m : {Method::per, Method::newmark, Method::wilson, Method::bathe, Method::rk4,
                   Method::mpim})
    if (method_name(m) == name) return m;
  return std::nullopt;
}

void MethodSpec::validate() const {
  switch (method) {
    case Method::per: {
      PerConfig c = per;
      c.dt = 0.0;
      c.validate();
      break;
    }
    case Method::newmark:
      if (!(newmark.beta > 0.0) || !(newmark.gamma >= 0.0))
        throw ValidationError("newmark requires beta > 0 and gamma >= 0");
      break;
    case Method::wilson:
      if (!(wilson_theta >= 1.0)) throw ValidationError("wilson theta must be >= 1");
      break;
    case Method::bathe:
      if (!(bathe_gamma > 0.0 && bathe_gamma < 1.0))
        throw ValidationError("bathe gamma must be in (0, 1)");
      break;
    case Method::rk4:
      break;
    case Method::mpim:
      gauss_legendre(mpim_g);
      if (mpim_p < 1) throw ValidationError("mpim p must be >= 1");
      break;
  }
}

std::unique_ptr<PreparedIntegrator> prepare(const SystemModel& model, const MethodSpec& spec,
                                            double dt) {
  spec.validate();
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  const StateVector u0{model.u0(), model.v0()};
  switch (spec.method) {
    case Method::per: {
      PerConfig c = spec.per;
      c.dt = dt;
      return prepare_per(model, c);
    }
    case Method::newmark: return prepare_newmark(model, dt, spec.newmark);
    case Method::wilson: return prepare_wilson(model, dt, spec.wilson_theta);
    case Method::bathe: return prepare_bathe(model, dt, spec.bathe_gamma);
    case Method::rk4: return prepare_rk4(state_space(model), u0, dt);
    case Method::mpim: return prepare_mpim(state_space(model), u0, dt, spec.mpim_g, spec.mpim_p);
  }
  throw ValidationError("unknown method");
}

Trajectory run_method(const SystemModel& model, const MethodSpec& spec, double dt,
                      double t_max) {
  return prepare(model, spec, dt)->run(t_max);
}

}  // namespace perdyn
