#pragma once

#include "perdyn/types.hpp"

#include <memory>
#include <vector>

namespace perdyn {

// M u'' + C u' + K u = f(t), u(0) = u0, u'(0) = v0
class SystemModel {
 public:
  SystemModel(Mat mass, Mat damping, Mat stiffness, ForceFunction force = {}, Vec u0 = {},
              Vec v0 = {});

  Eigen::Index dof() const { return mass_.rows(); }
  const Mat& mass() const { return mass_; }
  const Mat& damping() const { return damping_; }
  const Mat& stiffness() const { return stiffness_; }
  const Vec& u0() const { return u0_; }
  const Vec& v0() const { return v0_; }
  bool has_force() const { return static_cast<bool>(force_); }
  bool is_undamped() const { return damping_.isZero(0.0); }

  Vec force(double t) const;
  Vec initial_state() const;

  // M^{-1} x through the cached Cholesky factor; M^{-1} is never formed.
  Mat solve_mass(const Mat& x) const;
  Vec solve_mass(const Vec& x) const;
  const Mat& minv_k() const { return minv_k_; }
  const Mat& minv_c() const { return minv_c_; }

  SystemModel with_damping(Mat damping) const;
  SystemModel with_force(ForceFunction force) const;
  SystemModel with_initial_state(Vec u0, Vec v0) const;
  SystemModel scaled_damping(double factor) const;

 private:
  Mat mass_, damping_, stiffness_;
  ForceFunction force_;
  Vec u0_, v0_;
  std::shared_ptr<const Eigen::LLT<Mat>> mass_llt_;
  Mat minv_k_, minv_c_;
};

struct ModalData {
  Vec frequencies;   // ascending, rad/s
  Mat mode_shapes;   // mass-normalised columns
  Mat modal_damping; // Phi^T C Phi

  double omega_max() const { return frequencies.size() ? frequencies.maxCoeff() : 0.0; }
  double min_period() const;
};

ModalData modal_analysis(const SystemModel& model);

// rho(M^{-1} C) / rho(sqrt(M^{-1} K))
double damping_level(const SystemModel& model);
double rho_minv_c(const SystemModel& model);

inline constexpr int kGround = -1;

struct Damper {
  int i = 0;
  int j = kGround;
  double c = 0.0;
};

struct Spring {
  int i = 0;
  int j = kGround;
  double k = 0.0;
};

// Fixed-base chain: dof 0 tied to ground, dof i tied to dof i+1.
SystemModel build_chain(int n_dof, double mass_coeff, double stiffness_coeff,
                        const std::vector<Damper>& dampers,
                        const std::vector<Spring>& extra_springs = {});

// 12-dof chain, M = 1 kg, K = 100 N/m, two cross springs and five dampers
// whose coefficients are scaled by `damper_scale`.
struct SubstituteChain {
  static constexpr int n_dof = 12;
  static constexpr double mass = 1.0;
  static constexpr double stiffness = 100.0;
  static std::vector<Spring> extra_springs();
  static std::vector<Damper> dampers(double damper_scale);
};

SystemModel substitute_chain(double damper_scale);
// damper_scale giving a requested damping_level; the level is linear in the scale.
double substitute_chain_scale_for_level(double level);

enum class LoadDirection { deflection = 0, rotation = 1 };

struct BeamSupport {
  int node = 0;
  double spring = 0.0;
  double damper = 0.0;
};

struct PointLoad {
  int node = 0;
  LoadDirection direction = LoadDirection::deflection;
  std::function<double(double)> history;
};

struct BeamSpec {
  double length = 3.0;
  double bending_stiffness = 437.5e3;
  double total_mass = 235.5;
  int n_elements = 24;
  std::vector<BeamSupport> supports;
  std::vector<PointLoad> loads;
};

// Cantilever clamped at node 0; free dof ordering [w1, th1, w2, th2, ...].
SystemModel build_beam(const BeamSpec& spec);

// Elastic supports at the interior third points with K_A = 20EI/l^3,
// K_B = 10EI/l^3 and c = 2 m0 omega_r zeta, omega_r = sqrt(EI / (m0 l^3)).
std::vector<BeamSupport> default_beam_supports(const BeamSpec& spec, double zeta_a,
                                               double zeta_b);

struct BeamMatrices {
  Mat stiffness;
  Mat mass;
};

// Free-free assembly including node 0, size 2(n_e + 1).
BeamMatrices assemble_beam_unconstrained(double length, double bending_stiffness,
                                         double total_mass, int n_elements);

Mat beam_element_stiffness(double ei, double le);
Mat beam_element_mass(double rho_a, double le);

}  // namespace perdyn
