#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace perdyn {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// f(t) -> N-vector of nodal forces
using ForceFunction = std::function<Vec(double)>;

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StateVector {
  Vec displacement;
  Vec velocity;

  Vec stacked() const;
  static StateVector split(const Vec& u);
};

struct Divergence {
  std::size_t step = 0;  // first step whose state was rejected
  double time = 0.0;
  std::string reason;
  double rho_beta_b = 0.0;
  double dt_bound = 0.0;
};

// States are stored column-wise as [u; v], one column per time instant.
struct Trajectory {
  std::vector<double> times;
  Mat states;
  std::optional<Divergence> divergence;
  std::vector<std::string> warnings;

  std::size_t size() const { return times.size(); }
  Eigen::Index dof() const { return states.rows() / 2; }
  bool diverged() const { return divergence.has_value(); }
  StateVector state(std::size_t k) const;
  Vec displacement_history(Eigen::Index dof) const;
  Vec velocity_history(Eigen::Index dof) const;
};

std::size_t step_count(double dt, double t_max);

}  // namespace perdyn
