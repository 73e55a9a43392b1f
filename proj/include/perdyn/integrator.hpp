#pragma once

#include "perdyn/types.hpp"

namespace perdyn {

// Setup happens at construction; run() only executes the step loop.
class PreparedIntegrator {
 public:
  virtual ~PreparedIntegrator() = default;
  virtual Trajectory run(double t_max) const = 0;
  // rho(beta_b) for PER, 0 otherwise
  virtual double rho_beta_b() const { return 0.0; }
};

}  // namespace perdyn
