#pragma once

#include "perdyn/methods.hpp"
#include "perdyn/model.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace perdyn {

inline constexpr int kConfigVersion = 1;

struct ChainModelSpec {
  int n_dof = 12;
  double mass = 1.0;
  double stiffness = 100.0;
  std::vector<Damper> dampers;
  std::vector<Spring> springs;
};

struct BeamModelSpec {
  double length = 3.0;
  double bending_stiffness = 437.5e3;
  double total_mass = 235.5;
  int n_elements = 24;
  double zeta_a = 0.5;
  double zeta_b = 0.5;
  // Empty means the default third-point supports built from zeta_a / zeta_b.
  std::vector<BeamSupport> supports;
};

struct MatricesModelSpec {
  Mat mass, damping, stiffness;
};

enum class ModelKind { chain, beam, matrices };

enum class ForceKind { zero, step, gaussian };

struct HarmonicTerm {
  double amplitude = 0.0;
  double omega = 0.0;
};

struct ForceSpec {
  ForceKind kind = ForceKind::zero;
  double t_c = 0.0;
  double f0 = 0.0;
  int dof = 0;  // 0-based; a beam without an explicit dof loads the tip deflection
  double t0 = 0.0;
  double s = 1.0;
  std::vector<HarmonicTerm> terms;
  std::vector<int> dofs;  // gaussian load pattern; empty means every dof
};

struct RunConfig {
  ModelKind model_kind = ModelKind::chain;
  ChainModelSpec chain;
  BeamModelSpec beam;
  MatricesModelSpec matrices;
  std::vector<double> u0, v0;
  ForceSpec force;
  MethodSpec method;
  double dt = 0.0;
  double t_max = 0.0;
  std::string output;
  int reference_refine = 500;
  int dof = 0;  // dof reported by error sweeps
  std::vector<double> dt_list;
  std::vector<double> zeta_list;
  std::vector<std::string> compare_methods;

  void validate() const;
  SystemModel build_model() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);

ForceFunction make_force(const ForceSpec& spec, Eigen::Index n_dof);

}  // namespace perdyn
