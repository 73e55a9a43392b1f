#include "perdyn/model.hpp"

#include "perdyn/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <string>

namespace perdyn {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdTol = 1e-10;

void check_square(const Mat& a, Eigen::Index n, const char* what) {
  if (a.rows() != n || a.cols() != n)
    throw ValidationError(std::string(what) + " has inconsistent dimensions");
  if (!a.allFinite()) throw ValidationError(std::string(what) + " has non-finite entries");
  if (relative_asymmetry(a) > kSymmetryTol)
    throw ValidationError(std::string(what) + " is not symmetric");
}

void check_psd(const Mat& a, const char* what) {
  if (a.isZero(0.0)) return;
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol * a.norm())
    throw ValidationError(std::string(what) + " is not positive semidefinite");
}

}  // namespace

SystemModel::SystemModel(Mat mass, Mat damping, Mat stiffness, ForceFunction force, Vec u0,
                         Vec v0)
    : mass_(std::move(mass)),
      damping_(std::move(damping)),
      stiffness_(std::move(stiffness)),
      force_(std::move(force)),
      u0_(std::move(u0)),
      v0_(std::move(v0)) {
  const Eigen::Index n = mass_.rows();
  if (n == 0) throw ValidationError("model has no degrees of freedom");
  check_square(mass_, n, "mass");
  check_square(damping_, n, "damping");
  check_square(stiffness_, n, "stiffness");
  check_psd(damping_, "damping");
  check_psd(stiffness_, "stiffness");
  if (u0_.size() == 0) u0_ = Vec::Zero(n);
  if (v0_.size() == 0) v0_ = Vec::Zero(n);
  if (u0_.size() != n || v0_.size() != n)
    throw ValidationError("initial state length does not match the model");
  auto llt = std::make_shared<Eigen::LLT<Mat>>(mass_);
  if (llt->info() != Eigen::Success) throw ValidationError("mass is not positive definite");
  mass_llt_ = std::move(llt);
  minv_k_ = mass_llt_->solve(stiffness_);
  minv_c_ = mass_llt_->solve(damping_);
}

Vec SystemModel::force(double t) const {
  if (!force_) return Vec::Zero(dof());
  Vec f = force_(t);
  if (f.size() != dof()) throw ValidationError("force vector length does not match the model");
  return f;
}

Vec SystemModel::initial_state() const { return StateVector{u0_, v0_}.stacked(); }

Mat SystemModel::solve_mass(const Mat& x) const { return mass_llt_->solve(x); }
Vec SystemModel::solve_mass(const Vec& x) const { return mass_llt_->solve(x); }

SystemModel SystemModel::with_damping(Mat damping) const {
  return SystemModel(mass_, std::move(damping), stiffness_, force_, u0_, v0_);
}

SystemModel SystemModel::with_force(ForceFunction force) const {
  return SystemModel(mass_, damping_, stiffness_, std::move(force), u0_, v0_);
}

SystemModel SystemModel::with_initial_state(Vec u0, Vec v0) const {
  return SystemModel(mass_, damping_, stiffness_, force_, std::move(u0), std::move(v0));
}

SystemModel SystemModel::scaled_damping(double factor) const {
  if (!(factor >= 0.0)) throw ValidationError("damping scale must be >= 0");
  return with_damping(damping_ * factor);
}

double ModalData::min_period() const {
  const double w = omega_max();
  return w > 0.0 ? 2.0 * std::numbers::pi / w : std::numeric_limits<double>::infinity();
}

ModalData modal_analysis(const SystemModel& model) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(model.stiffness(), model.mass());
  if (es.info() != Eigen::Success) throw NumericalError("generalized eigensolve failed");
  ModalData md;
  md.frequencies = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  md.mode_shapes = es.eigenvectors();
  md.modal_damping = md.mode_shapes.transpose() * model.damping() * md.mode_shapes;
  return md;
}

double rho_minv_c(const SystemModel& model) {
  if (model.is_undamped()) return 0.0;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(model.damping(), model.mass(),
                                                   Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("generalized eigensolve failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double damping_level(const SystemModel& model) {
  if (model.stiffness().isZero(0.0)) throw ValidationError("stiffness is identically zero");
  const double w = modal_analysis(model).omega_max();
  if (w == 0.0) throw ValidationError("stiffness has no positive frequency");
  return rho_minv_c(model) / w;
}

namespace {

void add_link(Mat& a, int i, int j, double v) {
  a(i, i) += v;
  if (j == kGround) return;
  a(j, j) += v;
  a(i, j) -= v;
  a(j, i) -= v;
}

void check_link(int n, int i, int j, double v, const char* what) {
  if (i < 0 || i >= n || j < kGround || j >= n || i == j)
    throw ValidationError(std::string(what) + " index out of range");
  if (!(v >= 0.0) || !std::isfinite(v))
    throw ValidationError(std::string(what) + " coefficient must be finite and >= 0");
}

}  // namespace

SystemModel build_chain(int n_dof, double mass_coeff, double stiffness_coeff,
                        const std::vector<Damper>& dampers,
                        const std::vector<Spring>& extra_springs) {
  if (n_dof < 1) throw ValidationError("n_dof must be >= 1");
  if (!(mass_coeff > 0.0)) throw ValidationError("mass coefficient must be > 0");
  if (!(stiffness_coeff >= 0.0)) throw ValidationError("stiffness coefficient must be >= 0");
  Mat m = Mat::Identity(n_dof, n_dof) * mass_coeff;
  Mat k = Mat::Zero(n_dof, n_dof);
  Mat c = Mat::Zero(n_dof, n_dof);
  add_link(k, 0, kGround, stiffness_coeff);
  for (int i = 0; i + 1 < n_dof; ++i) add_link(k, i, i + 1, stiffness_coeff);
  for (const auto& s : extra_springs) {
    check_link(n_dof, s.i, s.j, s.k, "spring");
    add_link(k, s.i, s.j, s.k);
  }
  for (const auto& d : dampers) {
    check_link(n_dof, d.i, d.j, d.c, "damper");
    add_link(c, d.i, d.j, d.c);
  }
  return SystemModel(m, c, k);
}

std::vector<Spring> SubstituteChain::extra_springs() {
  return {{2, 7, 0.5 * stiffness}, {11, kGround, 2.0 * stiffness}};
}

std::vector<Damper> SubstituteChain::dampers(double damper_scale) {
  return {{0, kGround, 1.0 * damper_scale},
          {3, 4, 0.6 * damper_scale},
          {5, 9, 0.8 * damper_scale},
          {8, kGround, 0.5 * damper_scale},
          {11, kGround, 1.2 * damper_scale}};
}

SystemModel substitute_chain(double damper_scale) {
  return build_chain(SubstituteChain::n_dof, SubstituteChain::mass, SubstituteChain::stiffness,
                     SubstituteChain::dampers(damper_scale), SubstituteChain::extra_springs());
}

double substitute_chain_scale_for_level(double level) {
  return level / damping_level(substitute_chain(1.0));
}

Mat beam_element_stiffness(double ei, double le) {
  Mat k(4, 4);
  const double l2 = le * le;
  k << 12, 6 * le, -12, 6 * le,
       6 * le, 4 * l2, -6 * le, 2 * l2,
       -12, -6 * le, 12, -6 * le,
       6 * le, 2 * l2, -6 * le, 4 * l2;
  return k * (ei / (le * l2));
}

Mat beam_element_mass(double rho_a, double le) {
  Mat m(4, 4);
  const double l2 = le * le;
  m << 156, 22 * le, 54, -13 * le,
       22 * le, 4 * l2, 13 * le, -3 * l2,
       54, 13 * le, 156, -22 * le,
       -13 * le, -3 * l2, -22 * le, 4 * l2;
  return m * (rho_a * le / 420.0);
}

BeamMatrices assemble_beam_unconstrained(double length, double bending_stiffness,
                                         double total_mass, int n_elements) {
  if (n_elements < 1) throw ValidationError("n_elements must be >= 1");
  if (!(length > 0.0) || !(bending_stiffness > 0.0) || !(total_mass > 0.0))
    throw ValidationError("beam length, EI and mass must be > 0");
  const int n = 2 * (n_elements + 1);
  const double le = length / n_elements;
  const Mat ke = beam_element_stiffness(bending_stiffness, le);
  const Mat me = beam_element_mass(total_mass / length, le);
  BeamMatrices out{Mat::Zero(n, n), Mat::Zero(n, n)};
  for (int e = 0; e < n_elements; ++e) {
    out.stiffness.block(2 * e, 2 * e, 4, 4) += ke;
    out.mass.block(2 * e, 2 * e, 4, 4) += me;
  }
  return out;
}

SystemModel build_beam(const BeamSpec& spec) {
  const BeamMatrices full = assemble_beam_unconstrained(spec.length, spec.bending_stiffness,
                                                        spec.total_mass, spec.n_elements);
  const int n = 2 * spec.n_elements;
  Mat k = full.stiffness.bottomRightCorner(n, n);
  Mat m = full.mass.bottomRightCorner(n, n);
  Mat c = Mat::Zero(n, n);
  auto free_index = [&](int node, LoadDirection dir, const char* what) {
    if (node < 1 || node > spec.n_elements)
      throw ValidationError(std::string(what) + " node out of range (node 0 is clamped)");
    return 2 * (node - 1) + static_cast<int>(dir);
  };
  for (const auto& s : spec.supports) {
    if (!(s.spring >= 0.0) || !(s.damper >= 0.0))
      throw ValidationError("support coefficients must be >= 0");
    const int i = free_index(s.node, LoadDirection::deflection, "support");
    k(i, i) += s.spring;
    c(i, i) += s.damper;
  }
  ForceFunction force;
  if (!spec.loads.empty()) {
    std::vector<std::pair<int, std::function<double(double)>>> entries;
    for (const auto& l : spec.loads) {
      if (!l.history) throw ValidationError("point load without a time history");
      entries.emplace_back(free_index(l.node, l.direction, "load"), l.history);
    }
    force = [entries, n](double t) {
      Vec f = Vec::Zero(n);
      for (const auto& [i, h] : entries) f[i] += h(t);
      return f;
    };
  }
  return SystemModel(m, c, k, force);
}

std::vector<BeamSupport> default_beam_supports(const BeamSpec& spec, double zeta_a,
                                               double zeta_b) {
  const double ei = spec.bending_stiffness, l = spec.length, m0 = spec.total_mass;
  const double l3 = l * l * l;
  const double omega_r = std::sqrt(ei / (m0 * l3));
  const int ne = spec.n_elements;
  const int node_a = std::max(1, static_cast<int>(std::lround(ne / 3.0)));
  const int node_b = std::max(1, static_cast<int>(std::lround(2.0 * ne / 3.0)));
  return {{node_a, 20.0 * ei / l3, 2.0 * m0 * omega_r * zeta_a},
          {node_b, 10.0 * ei / l3, 2.0 * m0 * omega_r * zeta_b}};
}

}  // namespace perdyn
