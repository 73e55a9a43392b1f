#include "perdyn/types.hpp"

#include <cmath>

namespace perdyn {

Vec StateVector::stacked() const {
  Vec u(displacement.size() + velocity.size());
  u << displacement, velocity;
  return u;
}

StateVector StateVector::split(const Vec& u) {
  if (u.size() % 2) throw ValidationError("stacked state must have even length");
  const Eigen::Index n = u.size() / 2;
  return {u.head(n), u.tail(n)};
}

StateVector Trajectory::state(std::size_t k) const {
  return StateVector::split(states.col(static_cast<Eigen::Index>(k)));
}

Vec Trajectory::displacement_history(Eigen::Index d) const {
  return states.row(d).transpose();
}

Vec Trajectory::velocity_history(Eigen::Index d) const {
  return states.row(dof() + d).transpose();
}

std::size_t step_count(double dt, double t_max) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive and finite");
  if (!(t_max >= dt)) throw ValidationError("t_max must be >= dt");
  return static_cast<std::size_t>(std::llround(t_max / dt));
}

}  // namespace perdyn
