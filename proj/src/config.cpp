#include "perdyn/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace perdyn {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ValidationError(std::string("unknown key '") + it.key() + "' in " + where);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Mat matrix_from(const json& j, const char* name) {
  if (!j.is_array() || j.empty()) throw ValidationError(std::string(name) + " must be a 2-D array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols)
      throw ValidationError(std::string(name) + " rows have different lengths");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json matrix_to(const Mat& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

std::string propagator_name(Propagator p) { return p == Propagator::direct ? "direct" : "precise"; }

void parse_method_into(const json& j, MethodSpec& m) {
  reject_unknown(j, {"name", "p", "m_a", "r_a", "m_b", "r_b", "propagator", "newmark_gamma",
                     "newmark_beta", "wilson_theta", "bathe_gamma", "mpim_g", "mpim_p"},
                 "method");
  const std::string name = get_or<std::string>(j, "name", "per");
  const auto parsed = parse_method(name);
  if (!parsed) throw ValidationError("unknown method '" + name + "'");
  m.method = *parsed;
  m.per.p = get_or(j, "p", m.per.p);
  m.per.m_a = get_or(j, "m_a", m.per.m_a);
  m.per.r_a = get_or(j, "r_a", m.per.r_a);
  m.per.m_b = get_or(j, "m_b", m.per.m_b);
  m.per.r_b = get_or(j, "r_b", m.per.r_b);
  const std::string prop = get_or<std::string>(j, "propagator", "precise");
  if (prop == "precise")
    m.per.propagator = Propagator::precise;
  else if (prop == "direct")
    m.per.propagator = Propagator::direct;
  else
    throw ValidationError("unknown propagator '" + prop + "'");
  m.newmark.gamma = get_or(j, "newmark_gamma", m.newmark.gamma);
  m.newmark.beta = get_or(j, "newmark_beta", m.newmark.beta);
  m.wilson_theta = get_or(j, "wilson_theta", m.wilson_theta);
  m.bathe_gamma = get_or(j, "bathe_gamma", m.bathe_gamma);
  m.mpim_g = get_or(j, "mpim_g", m.mpim_g);
  m.mpim_p = get_or(j, "mpim_p", m.mpim_p);
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  reject_unknown(j, {"version", "model", "initial", "force", "method", "dt", "t_max", "output",
                     "reference", "dof", "sweep"},
                 "config");
  if (!j.contains("version") || get_or<int>(j, "version", 0) != kConfigVersion)
    throw ValidationError("config must carry \"version\": 1");
  RunConfig c;
  if (!j.contains("model")) throw ValidationError("config has no model");
  const json& mj = j.at("model");
  const std::string type = get_or<std::string>(mj, "type", "");
  if (type == "chain") {
    reject_unknown(mj, {"type", "preset", "damper_scale", "n_dof", "mass", "stiffness",
                        "dampers", "springs"},
                   "chain model");
    c.model_kind = ModelKind::chain;
    const std::string preset = get_or<std::string>(mj, "preset", "");
    if (preset == "substitute12") {
      const double scale = get_or(mj, "damper_scale", 1.0);
      c.chain.n_dof = SubstituteChain::n_dof;
      c.chain.mass = SubstituteChain::mass;
      c.chain.stiffness = SubstituteChain::stiffness;
      c.chain.dampers = SubstituteChain::dampers(scale);
      c.chain.springs = SubstituteChain::extra_springs();
    } else if (!preset.empty()) {
      throw ValidationError("unknown chain preset '" + preset + "'");
    } else {
      c.chain.n_dof = get_or(mj, "n_dof", 0);
      c.chain.mass = get_or(mj, "mass", 1.0);
      c.chain.stiffness = get_or(mj, "stiffness", 0.0);
      for (const auto& d : get_or(mj, "dampers", json::array()))
        c.chain.dampers.push_back({get_or(d, "i", 0), get_or(d, "j", kGround), get_or(d, "c", 0.0)});
      for (const auto& s : get_or(mj, "springs", json::array()))
        c.chain.springs.push_back({get_or(s, "i", 0), get_or(s, "j", kGround), get_or(s, "k", 0.0)});
    }
  } else if (type == "beam") {
    reject_unknown(mj, {"type", "length", "EI", "mass", "n_elements", "zeta_a", "zeta_b",
                        "supports"},
                   "beam model");
    c.model_kind = ModelKind::beam;
    auto& b = c.beam;
    b.length = get_or(mj, "length", b.length);
    b.bending_stiffness = get_or(mj, "EI", b.bending_stiffness);
    b.total_mass = get_or(mj, "mass", b.total_mass);
    b.n_elements = get_or(mj, "n_elements", b.n_elements);
    b.zeta_a = get_or(mj, "zeta_a", b.zeta_a);
    b.zeta_b = get_or(mj, "zeta_b", b.zeta_b);
    for (const auto& s : get_or(mj, "supports", json::array()))
      b.supports.push_back({get_or(s, "node", 0), get_or(s, "spring", 0.0), get_or(s, "damper", 0.0)});
  } else if (type == "matrices") {
    reject_unknown(mj, {"type", "M", "C", "K"}, "matrices model");
    c.model_kind = ModelKind::matrices;
    if (!mj.contains("M") || !mj.contains("K")) throw ValidationError("matrices model needs M and K");
    c.matrices.mass = matrix_from(mj.at("M"), "M");
    c.matrices.stiffness = matrix_from(mj.at("K"), "K");
    c.matrices.damping = mj.contains("C") ? matrix_from(mj.at("C"), "C")
                                           : Mat::Zero(c.matrices.mass.rows(), c.matrices.mass.cols());
  } else {
    throw ValidationError("model.type must be chain, beam or matrices");
  }

  if (j.contains("initial")) {
    const json& ij = j.at("initial");
    reject_unknown(ij, {"u0", "v0"}, "initial");
    c.u0 = get_or(ij, "u0", std::vector<double>{});
    c.v0 = get_or(ij, "v0", std::vector<double>{});
  }

  if (j.contains("force")) {
    const json& fj = j.at("force");
    reject_unknown(fj, {"type", "t_c", "f0", "dof", "t0", "s", "terms", "dofs"}, "force");
    const std::string ft = get_or<std::string>(fj, "type", "zero");
    auto& f = c.force;
    if (ft == "zero") {
      f.kind = ForceKind::zero;
    } else if (ft == "step") {
      f.kind = ForceKind::step;
      f.t_c = get_or(fj, "t_c", 0.0);
      f.f0 = get_or(fj, "f0", 0.0);
    } else if (ft == "gaussian") {
      f.kind = ForceKind::gaussian;
      f.t0 = get_or(fj, "t0", 0.0);
      f.s = get_or(fj, "s", 1.0);
      for (const auto& t : get_or(fj, "terms", json::array()))
        f.terms.push_back({get_or(t, "a", 0.0), get_or(t, "omega", 0.0)});
      f.dofs = get_or(fj, "dofs", std::vector<int>{});
    } else {
      throw ValidationError("force.type must be zero, step or gaussian");
    }
    const int default_dof = c.model_kind == ModelKind::beam ? 2 * (c.beam.n_elements - 1) : 0;
    f.dof = get_or(fj, "dof", default_dof);
  } else if (c.model_kind == ModelKind::beam) {
    c.force.dof = 2 * (c.beam.n_elements - 1);
  }

  if (j.contains("method")) parse_method_into(j.at("method"), c.method);
  c.dt = get_or(j, "dt", 0.0);
  c.t_max = get_or(j, "t_max", 0.0);
  c.output = get_or<std::string>(j, "output", "");
  c.dof = get_or(j, "dof", 0);
  if (j.contains("reference")) {
    reject_unknown(j.at("reference"), {"refine"}, "reference");
    c.reference_refine = get_or(j.at("reference"), "refine", 500);
  }
  if (j.contains("sweep")) {
    const json& sj = j.at("sweep");
    reject_unknown(sj, {"dt_list", "zeta_list", "methods"}, "sweep");
    c.dt_list = get_or(sj, "dt_list", std::vector<double>{});
    c.zeta_list = get_or(sj, "zeta_list", std::vector<double>{});
    c.compare_methods = get_or(sj, "methods", std::vector<std::string>{});
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j;
  j["version"] = kConfigVersion;
  json m;
  switch (c.model_kind) {
    case ModelKind::chain: {
      m["type"] = "chain";
      m["n_dof"] = c.chain.n_dof;
      m["mass"] = c.chain.mass;
      m["stiffness"] = c.chain.stiffness;
      m["dampers"] = json::array();
      for (const auto& d : c.chain.dampers) m["dampers"].push_back({{"i", d.i}, {"j", d.j}, {"c", d.c}});
      m["springs"] = json::array();
      for (const auto& s : c.chain.springs) m["springs"].push_back({{"i", s.i}, {"j", s.j}, {"k", s.k}});
      break;
    }
    case ModelKind::beam: {
      const auto& b = c.beam;
      m = {{"type", "beam"}, {"length", b.length}, {"EI", b.bending_stiffness},
           {"mass", b.total_mass}, {"n_elements", b.n_elements}, {"zeta_a", b.zeta_a},
           {"zeta_b", b.zeta_b}};
      m["supports"] = json::array();
      for (const auto& s : b.supports)
        m["supports"].push_back({{"node", s.node}, {"spring", s.spring}, {"damper", s.damper}});
      break;
    }
    case ModelKind::matrices:
      m = {{"type", "matrices"}, {"M", matrix_to(c.matrices.mass)},
           {"C", matrix_to(c.matrices.damping)}, {"K", matrix_to(c.matrices.stiffness)}};
      break;
  }
  j["model"] = m;
  j["initial"] = {{"u0", c.u0}, {"v0", c.v0}};
  json f;
  switch (c.force.kind) {
    case ForceKind::zero: f["type"] = "zero"; break;
    case ForceKind::step: f = {{"type", "step"}, {"t_c", c.force.t_c}, {"f0", c.force.f0}}; break;
    case ForceKind::gaussian: {
      f = {{"type", "gaussian"}, {"t0", c.force.t0}, {"s", c.force.s}, {"dofs", c.force.dofs}};
      f["terms"] = json::array();
      for (const auto& t : c.force.terms) f["terms"].push_back({{"a", t.amplitude}, {"omega", t.omega}});
      break;
    }
  }
  f["dof"] = c.force.dof;
  j["force"] = f;
  const auto& ms = c.method;
  j["method"] = {{"name", method_name(ms.method)}, {"p", ms.per.p}, {"m_a", ms.per.m_a},
                 {"r_a", ms.per.r_a}, {"m_b", ms.per.m_b}, {"r_b", ms.per.r_b},
                 {"propagator", propagator_name(ms.per.propagator)},
                 {"newmark_gamma", ms.newmark.gamma}, {"newmark_beta", ms.newmark.beta},
                 {"wilson_theta", ms.wilson_theta}, {"bathe_gamma", ms.bathe_gamma},
                 {"mpim_g", ms.mpim_g}, {"mpim_p", ms.mpim_p}};
  j["dt"] = c.dt;
  j["t_max"] = c.t_max;
  j["output"] = c.output;
  j["dof"] = c.dof;
  j["reference"] = {{"refine", c.reference_refine}};
  j["sweep"] = {{"dt_list", c.dt_list}, {"zeta_list", c.zeta_list}, {"methods", c.compare_methods}};
  return j;
}

void RunConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be > 0");
  if (!(t_max >= dt)) throw ValidationError("t_max must be >= dt");
  if (reference_refine < 1) throw ValidationError("reference.refine must be >= 1");
  method.validate();
  for (const auto& name : compare_methods)
    if (!parse_method(name)) throw ValidationError("unknown method '" + name + "' in sweep.methods");
  for (double d : dt_list)
    if (!(d > 0.0)) throw ValidationError("sweep.dt_list entries must be > 0");
  for (double z : zeta_list)
    if (!(z >= 0.0)) throw ValidationError("sweep.zeta_list entries must be >= 0");
  if (force.kind == ForceKind::gaussian && !(force.s > 0.0))
    throw ValidationError("gaussian force needs s > 0");
}

ForceFunction make_force(const ForceSpec& spec, Eigen::Index n) {
  switch (spec.kind) {
    case ForceKind::zero:
      return {};
    case ForceKind::step: {
      if (spec.dof < 0 || spec.dof >= n) throw ValidationError("force dof out of range");
      const double tc = spec.t_c, f0 = spec.f0;
      const int dof = spec.dof;
      return [n, tc, f0, dof](double t) {
        Vec f = Vec::Zero(n);
        if (t >= tc) f[dof] = f0;
        return f;
      };
    }
    case ForceKind::gaussian: {
      Vec pattern = Vec::Zero(n);
      if (spec.dofs.empty()) pattern.setOnes();
      for (int d : spec.dofs) {
        if (d < 0 || d >= n) throw ValidationError("force dof out of range");
        pattern[d] = 1.0;
      }
      const auto terms = spec.terms;
      const double t0 = spec.t0, s = spec.s;
      return [pattern, terms, t0, s](double t) {
        double sum = 0.0;
        for (const auto& h : terms) sum += h.amplitude * std::sin(h.omega * t);
        const double w = std::exp(-(t - t0) * (t - t0) / (2.0 * s * s));
        return Vec(pattern * (w * sum));
      };
    }
  }
  return {};
}

SystemModel RunConfig::build_model() const {
  SystemModel base = [&]() {
    switch (model_kind) {
      case ModelKind::chain:
        return build_chain(chain.n_dof, chain.mass, chain.stiffness, chain.dampers, chain.springs);
      case ModelKind::beam: {
        BeamSpec spec;
        spec.length = beam.length;
        spec.bending_stiffness = beam.bending_stiffness;
        spec.total_mass = beam.total_mass;
        spec.n_elements = beam.n_elements;
        spec.supports = beam.supports.empty()
                            ? default_beam_supports(spec, beam.zeta_a, beam.zeta_b)
                            : beam.supports;
        return build_beam(spec);
      }
      case ModelKind::matrices:
        return SystemModel(matrices.mass, matrices.damping, matrices.stiffness);
    }
    throw ValidationError("unknown model kind");
  }();
  const Eigen::Index n = base.dof();
  auto to_vec = [n](const std::vector<double>& v, const char* name) {
    if (v.empty()) return Vec(Vec::Zero(n));
    if (static_cast<Eigen::Index>(v.size()) != n)
      throw ValidationError(std::string(name) + " length does not match the model");
    return Vec(Eigen::Map<const Vec>(v.data(), n));
  };
  if (dof < 0 || dof >= n) throw ValidationError("dof out of range");
  return SystemModel(base.mass(), base.damping(), base.stiffness(), make_force(force, n),
                     to_vec(u0, "u0"), to_vec(v0, "v0"));
}

}  // namespace perdyn
