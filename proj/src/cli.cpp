#include "perdyn/cli.hpp"

#include "perdyn/analysis.hpp"
#include "perdyn/bench.hpp"
#include "perdyn/config.hpp"
#include "perdyn/csv.hpp"
#include "perdyn/linalg.hpp"
#include "perdyn/per.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

namespace perdyn {

namespace {

struct Overrides {
  std::string method;
  std::optional<double> dt;
  std::optional<int> m_b, r_b, g;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw ValidationError("cannot open output '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

RunConfig load_with_overrides(const std::string& path, const Overrides& o) {
  if (path.empty()) throw ValidationError("--config is required");
  RunConfig c = load_config(path);
  if (!o.method.empty()) {
    const auto m = parse_method(o.method);
    if (!m) throw ValidationError("unknown method '" + o.method + "'");
    c.method.method = *m;
  }
  if (o.dt) c.dt = *o.dt;
  if (o.m_b) c.method.per.m_b = *o.m_b;
  if (o.r_b) c.method.per.r_b = *o.r_b;
  if (o.g) c.method.mpim_g = *o.g;
  c.validate();
  return c;
}

void add_overrides(CLI::App* cmd, std::string& config, std::string& out, Overrides& o) {
  cmd->add_option("--config", config, "JSON run configuration")->required();
  cmd->add_option("--out", out, "output CSV path (default: config output or stdout)");
  cmd->add_option("--method", o.method, "per | newmark | wilson | bathe | rk4 | mpim");
  cmd->add_option("--dt", o.dt, "time step override");
  cmd->add_option("--mb", o.m_b, "PER truncation order m_b");
  cmd->add_option("--rb", o.r_b, "PER Neumann order r_b");
  cmd->add_option("--g", o.g, "MPIM Gauss points");
}

std::string pick_out(const std::string& flag, const RunConfig& c) {
  return flag.empty() ? c.output : flag;
}

void check_m(int m) {
  if (m < 2 || m % 2 || m > kMaxSeriesOrder)
    throw ValidationError("invalid m = " + std::to_string(m) + " (even, 2.." +
                          std::to_string(kMaxSeriesOrder) + ")");
}

int cmd_simulate(const std::string& config_path, const std::string& out_flag,
                 const std::string& summary_path, const Overrides& o) {
  const RunConfig c = load_with_overrides(config_path, o);
  const SystemModel model = c.build_model();
  auto integrator = prepare(model, c.method, c.dt);
  const Trajectory tr = integrator->run(c.t_max);

  Output out(pick_out(out_flag, c));
  CsvWriter w(out.stream());
  const Eigen::Index n = model.dof();
  std::vector<std::string> cols{"t"};
  for (Eigen::Index i = 1; i <= n; ++i) cols.push_back("u_" + std::to_string(i));
  for (Eigen::Index i = 1; i <= n; ++i) cols.push_back("v_" + std::to_string(i));
  w.header(cols);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    w.field(tr.times[k]);
    for (Eigen::Index i = 0; i < 2 * n; ++i) w.field(tr.states(i, static_cast<Eigen::Index>(k)));
    w.end_row();
  }

  double bound = std::numeric_limits<double>::infinity();
  try {
    bound = dt_bound(model, c.method.per.m_b).dt_max;
  } catch (const std::exception&) {
  }
  nlohmann::json summary = {{"method", method_name(c.method.method)},
                            {"dt", c.dt},
                            {"steps", tr.size() ? tr.size() - 1 : 0},
                            {"rho_beta_b", integrator->rho_beta_b()},
                            {"dt_bound", std::isfinite(bound) ? nlohmann::json(bound) : nlohmann::json("inf")},
                            {"diverged", tr.diverged()},
                            {"power_iteration_seed", kPowerIterationSeed}};
  if (tr.diverged()) {
    summary["divergence_step"] = tr.divergence->step;
    summary["divergence_reason"] = tr.divergence->reason;
  }
  for (const auto& warn : tr.warnings) std::cerr << "warning: " << warn << '\n';
  if (!summary_path.empty()) {
    std::ofstream s(summary_path, std::ios::binary);
    if (!s) throw ValidationError("cannot open summary '" + summary_path + "'");
    s << summary.dump(2) << '\n';
  } else {
    std::cerr << summary.dump() << '\n';
  }
  if (tr.diverged()) {
    std::cerr << "error: diverged at step " << tr.divergence->step << " ("
              << tr.divergence->reason << ")\n";
    return kExitDivergence;
  }
  return kExitOk;
}

int cmd_stability_map(double zeta, int m_a, int r_a, int p, double grid_max, double grid_step,
                      const std::string& grid_out) {
  check_m(m_a);
  const StabilityRecord rec = sdof_stability_map(zeta, m_a, r_a, p, grid_max, grid_step);
  if (!grid_out.empty()) {
    Output g(grid_out);
    CsvWriter w(g.stream());
    w.header({"dt0_over_T", "max_abs_lambda"});
    for (const auto& [x, l] : rec.grid) {
      w.field(x).field(l);
      w.end_row();
    }
  }
  CsvWriter w(std::cout);
  w.header({"zeta", "m_a", "r_a", "lower", "upper"});
  for (const auto& iv : rec.boundaries) {
    w.field(zeta).field(m_a).field(r_a).field(iv.lower).field(iv.upper);
    w.end_row();
  }
  return kExitOk;
}

int cmd_tau_limit(const std::vector<int>& ms, const std::string& curve_out, int curve_m,
                  double tau_max, double tau_step) {
  for (int m : ms) check_m(m);
  Output out("");
  CsvWriter w(out.stream());
  w.header({"m", "tau_L", "tau_L_over_2pi"});
  for (int m : ms) {
    const double t = tau_limit(m);
    w.field(m).field(t).field(t / (2.0 * std::numbers::pi));
    w.end_row();
  }
  if (!curve_out.empty()) {
    if (curve_m < 0 || curve_m % 2 || curve_m > kMaxSeriesOrder)
      throw ValidationError("invalid --curve-m");
    if (!(tau_max > 0.0) || !(tau_step > 0.0)) throw ValidationError("invalid curve grid");
    Output c(curve_out);
    CsvWriter cw(c.stream());
    cw.header({"tau", "abs_mu1", "abs_mu2"});
    const auto n = static_cast<long long>(std::floor(tau_max / tau_step + 1e-9));
    for (long long i = 0; i <= n; ++i) {
      const SigmaEigen e = sigma_eigenvalues(curve_m, static_cast<double>(i) * tau_step);
      cw.field(e.tau).field(std::abs(e.mu1)).field(std::abs(e.mu2));
      cw.end_row();
    }
  }
  return kExitOk;
}

int cmd_sweep_dt(const std::string& config_path, const std::string& out_flag,
                 const Overrides& o) {
  const RunConfig c = load_with_overrides(config_path, o);
  const SystemModel model = c.build_model();
  const std::vector<double> dts = c.dt_list.empty() ? std::vector<double>{c.dt} : c.dt_list;
  const auto rows = sweep_dt(model, c.method, dts, c.t_max, c.dof, c.reference_refine);
  Output out(pick_out(out_flag, c));
  CsvWriter w(out.stream());
  w.header({"dt", "dt_over_T", "e_disp", "e_vel", "diverged"});
  for (const auto& r : rows) {
    w.field(r.dt).field(r.dt_over_t).field(r.e_disp).field(r.e_vel).field(r.diverged);
    w.end_row();
  }
  return kExitOk;
}

int cmd_sweep_damping(const std::string& config_path, const std::string& out_flag,
                      const Overrides& o) {
  const RunConfig c = load_with_overrides(config_path, o);
  const SystemModel model = c.build_model();
  if (c.zeta_list.empty()) throw ValidationError("sweep.zeta_list is empty");
  const auto rows =
      sweep_damping(model, c.zeta_list, c.dt, c.method, c.dof, c.t_max, c.reference_refine);
  Output out(pick_out(out_flag, c));
  CsvWriter w(out.stream());
  w.header({"zeta", "damping_level", "e_disp", "e_vel", "rho_beta_b", "diverged"});
  for (const auto& r : rows) {
    w.field(r.zeta).field(r.damping_level).field(r.e_disp).field(r.e_vel).field(r.rho_beta_b)
        .field(r.diverged);
    w.end_row();
  }
  return kExitOk;
}

struct CostArgs {
  std::string method = "all";
  long long n = 1, p = 20, m_a = 2, m_b = 4, r_a = 2, r_b = 2, g = 4, steps = 1;
};

int cmd_cost(const CostArgs& a, const std::string& out_flag) {
  std::vector<CostModel> models;
  const bool all = a.method == "all";
  if (all || a.method == "per") models.push_back(cost_per(a.n, a.p, a.m_a, a.m_b, a.r_a, a.r_b, a.steps));
  if (all || a.method == "mpim") models.push_back(cost_mpim(a.n, a.p, a.g, a.steps));
  if (all || a.method == "rk4") models.push_back(cost_rk4(a.n, a.steps));
  if (models.empty()) throw ValidationError("cost-model --method must be per, mpim, rk4 or all");
  Output out(out_flag);
  CsvWriter w(out.stream());
  w.header({"method", "N", "steps", "n3_coeff", "n2_coeff", "n1_coeff", "total_ops",
            "per_mpim_setup_ratio"});
  const double ratio = setup_cost_ratio(a.p, a.m_b, a.r_a, a.r_b, a.g);
  for (const auto& c : models) {
    w.field(method_name(c.method)).field(static_cast<long long>(a.n))
        .field(static_cast<long long>(a.steps)).field(static_cast<long long>(c.n3_coeff))
        .field(static_cast<long long>(c.n2_coeff)).field(static_cast<long long>(c.n1_coeff))
        .field(static_cast<long long>(c.total_ops)).field(ratio);
    w.end_row();
  }
  return kExitOk;
}

int cmd_compare(const std::string& config_path, const std::string& out_flag,
                const std::vector<std::string>& methods_flag, const Overrides& o) {
  const RunConfig c = load_with_overrides(config_path, o);
  const SystemModel model = c.build_model();
  std::vector<std::string> names = methods_flag.empty() ? c.compare_methods : methods_flag;
  if (names.empty()) names = {"per", "newmark", "wilson", "bathe", "rk4", "mpim"};
  const ReferenceSolution ref = reference_solution(model, c.dt, c.t_max, c.reference_refine);
  Output out(pick_out(out_flag, c));
  CsvWriter w(out.stream());
  w.header({"method", "dt", "e_disp", "e_vel", "diverged", "setup_seconds", "loop_seconds"});
  for (const auto& name : names) {
    const auto m = parse_method(name);
    if (!m) throw ValidationError("unknown method '" + name + "'");
    MethodSpec spec = c.method;
    spec.method = *m;
    const TimingResult t = timing_run(model, spec, c.dt, c.t_max, 1);
    const Trajectory tr = run_method(model, spec, c.dt, c.t_max);
    double ed = std::numeric_limits<double>::quiet_NaN(), ev = ed;
    if (!tr.diverged()) {
      const ErrorReport e = global_error(tr, ref.trajectory, c.dof);
      ed = e.e_disp;
      ev = e.e_vel;
    }
    w.field(name).field(c.dt).field(ed).field(ev).field(tr.diverged()).field(t.setup_seconds)
        .field(t.loop_seconds);
    w.end_row();
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"perdyn: damping-perturbation explicit integrator and baselines"};
  app.require_subcommand(1);

  std::string config, out, summary;
  Overrides ov;

  auto* sim = app.add_subcommand("simulate", "integrate one configuration and write the trajectory");
  add_overrides(sim, config, out, ov);
  sim->add_option("--summary", summary, "write the JSON run summary here instead of stderr");

  double zeta = 0.0, grid_max = 1.0, grid_step = 0.001;
  int m_a = 2, r_a = 2, p = 20;
  auto* stab = app.add_subcommand("stability-map", "SDOF amplification map and stable intervals");
  stab->add_option("--zeta", zeta, "damping ratio");
  stab->add_option("--ma", m_a, "truncation order m_a");
  stab->add_option("--ra", r_a, "Neumann order r_a");
  stab->add_option("--p", p, "doubling count p");
  stab->add_option("--grid-max", grid_max, "largest dt0/T on the grid");
  stab->add_option("--grid-step", grid_step, "grid spacing in dt0/T");
  stab->add_option("--out", out, "CSV of (dt0_over_T, max_abs_lambda)");

  std::vector<int> ms{2, 4, 6, 8, 10, 20, 30, 40};
  std::string curve_out;
  int curve_m = 2;
  double tau_max = 20.0, tau_step = 0.01;
  auto* tau = app.add_subcommand("tau-limit", "tau_L(m) table");
  tau->add_option("--m", ms, "even truncation orders")->delimiter(',');
  tau->add_option("--curve-out", curve_out, "CSV of (tau, abs_mu1, abs_mu2)");
  tau->add_option("--curve-m", curve_m, "order used for the curve");
  tau->add_option("--tau-max", tau_max, "curve range");
  tau->add_option("--tau-step", tau_step, "curve spacing");

  auto* sdt = app.add_subcommand("sweep-dt", "global error against the RK4 reference per dt");
  add_overrides(sdt, config, out, ov);
  auto* sdz = app.add_subcommand("sweep-damping", "global error and rho(beta_b) per damping scale");
  add_overrides(sdz, config, out, ov);

  CostArgs ca;
  auto* cost = app.add_subcommand("cost-model", "operation-count models");
  cost->add_option("--method", ca.method, "per | mpim | rk4 | all");
  cost->add_option("--N", ca.n, "degrees of freedom");
  cost->add_option("--p", ca.p, "doubling count");
  cost->add_option("--ma", ca.m_a, "m_a");
  cost->add_option("--mb", ca.m_b, "m_b");
  cost->add_option("--ra", ca.r_a, "r_a");
  cost->add_option("--rb", ca.r_b, "r_b");
  cost->add_option("--g", ca.g, "Gauss points");
  cost->add_option("--steps", ca.steps, "t_max / dt");
  cost->add_option("--out", out, "output CSV path");

  std::vector<std::string> methods;
  auto* cmp = app.add_subcommand("compare", "run several methods and report joined errors");
  add_overrides(cmp, config, out, ov);
  cmp->add_option("--methods", methods, "methods to run")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*sim) return cmd_simulate(config, out, summary, ov);
    if (*stab) return cmd_stability_map(zeta, m_a, r_a, p, grid_max, grid_step, out);
    if (*tau) return cmd_tau_limit(ms, curve_out, curve_m, tau_max, tau_step);
    if (*sdt) return cmd_sweep_dt(config, out, ov);
    if (*sdz) return cmd_sweep_damping(config, out, ov);
    if (*cost) return cmd_cost(ca, out);
    if (*cmp) return cmd_compare(config, out, methods, ov);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitValidation;
}

}  // namespace perdyn
