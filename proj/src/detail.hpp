#pragma once

#include "perdyn/types.hpp"

#include <string>

namespace perdyn::detail {

inline constexpr double kDivergenceFactor = 1e12;

// Flags non-finite states or norms beyond 1e12 times the accumulated input scale.
class DivergenceMonitor {
 public:
  explicit DivergenceMonitor(double initial_scale) : scale_(initial_scale) {}
  void add_input(double norm) { scale_ += norm; }
  bool check(const Vec& u, std::string& reason) const {
    if (!u.allFinite()) {
      reason = "non-finite state";
      return true;
    }
    if (u.norm() > kDivergenceFactor * scale_) {
      reason = "state norm exceeded growth limit";
      return true;
    }
    return false;
  }

 private:
  double scale_;
};

// Uniform-grid trajectory that can be cut short on divergence.
class TrajectoryBuilder {
 public:
  TrajectoryBuilder(Eigen::Index rows, std::size_t steps, double dt) : dt_(dt) {
    tr_.times.resize(steps + 1);
    tr_.states.resize(rows, static_cast<Eigen::Index>(steps + 1));
  }
  void set(std::size_t k, const Vec& u) {
    tr_.times[k] = static_cast<double>(k) * dt_;
    tr_.states.col(static_cast<Eigen::Index>(k)) = u;
  }
  Trajectory diverge(std::size_t k, std::string reason) {
    tr_.divergence = Divergence{k, static_cast<double>(k) * dt_, std::move(reason), 0.0, 0.0};
    tr_.times.resize(k);
    tr_.states.conservativeResize(tr_.states.rows(), static_cast<Eigen::Index>(k));
    return std::move(tr_);
  }
  Trajectory finish() { return std::move(tr_); }

 private:
  double dt_;
  Trajectory tr_;
};

}  // namespace perdyn::detail
