#include "helpers.hpp"
#include "perdyn/cli.hpp"
#include "perdyn/config.hpp"
#include "perdyn/csv.hpp"
#include "perdyn/linalg.hpp"
#include "perdyn/per.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace perdyn;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code = 0;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "perdyn");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  CliResult r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("perdyn_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_config(const std::string& name, const json& j) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << j.dump(2);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

using Table = std::vector<std::vector<std::string>>;

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    t.push_back(row);
  }
  return t;
}

json sdof_config(double zeta) {
  const double w = 2 * M_PI;
  return {{"version", 1},
          {"model", {{"type", "matrices"}, {"M", {{1.0}}}, {"C", {{2 * zeta * w}}}, {"K", {{w * w}}}}},
          {"initial", {{"u0", {1.0}}, {"v0", {0.0}}}},
          {"method", {{"name", "per"}}},
          {"dt", 0.02},
          {"t_max", 1.0}};
}

// every numeric field finite, or the row is flagged diverged
void check_csv_rows(const Table& t) {
  REQUIRE(!t.empty());
  const auto& head = t[0];
  int div = -1;
  for (std::size_t i = 0; i < head.size(); ++i)
    if (head[i] == "diverged") div = static_cast<int>(i);
  for (std::size_t r = 1; r < t.size(); ++r) {
    REQUIRE(t[r].size() == head.size());
    const bool diverged = div >= 0 && t[r][static_cast<std::size_t>(div)] == "true";
    for (const auto& cell : t[r]) {
      if (cell == "true" || cell == "false" || cell.empty() || std::isalpha(static_cast<unsigned char>(cell[0])) && cell != "nan" && cell != "inf")
        continue;
      if (!diverged) CHECK(std::isfinite(std::stod(cell)));
    }
  }
}

}  // namespace

TEST_CASE("csv writer format") {
  std::ostringstream s;
  CsvWriter w(s);
  w.header({"a", "b", "c", "d"});
  w.field(0.1).field(3).field(true).field(std::nan(""));
  w.end_row();
  CHECK(s.str() == "a,b,c,d\n0.10000000000000001,3,true,nan\n");
  CHECK(format_number(1.0) == "1");
  CHECK(std::stod(format_number(M_PI)) == M_PI);
}

TEST_CASE("simulate: zero load and zero initial state gives zeros") {
  json j = {{"version", 1},
            {"model", {{"type", "chain"}, {"preset", "substitute12"}}},
            {"dt", 0.05},
            {"t_max", 1.0}};
  const std::string cfg = write_config("zero.json", j);
  const CliResult r = run({"simulate", "--config", cfg});
  REQUIRE(r.code == kExitOk);
  const Table t = parse_csv(r.out);
  REQUIRE(t.size() == 22);
  CHECK(t[0].size() == 25);
  CHECK(t[0][0] == "t");
  CHECK(t[0][1] == "u_1");
  CHECK(t[0][13] == "v_1");
  for (std::size_t k = 1; k < t.size(); ++k)
    for (std::size_t c = 1; c < t[k].size(); ++c) CHECK(std::stod(t[k][c]) == 0.0);
  const json summary = json::parse(r.err.substr(r.err.find('{')));
  CHECK(summary.at("diverged") == false);
  CHECK(summary.at("power_iteration_seed") == kPowerIterationSeed);
}

TEST_CASE("simulate matches the library call") {
  const json j = sdof_config(0.05);
  const std::string cfg = write_config("sdof.json", j);
  const std::string out = (scratch() / "sdof.csv").string();
  const std::string summ = (scratch() / "sdof_summary.json").string();
  const CliResult r = run({"simulate", "--config", cfg, "--out", out, "--summary", summ});
  REQUIRE(r.code == kExitOk);
  const Table t = parse_csv(slurp(out));

  const RunConfig c = parse_config(j);
  PerConfig pc = c.method.per;
  pc.dt = c.dt;
  const Trajectory tr = integrate(c.build_model(), pc, c.t_max);
  REQUIRE(t.size() == tr.size() + 1);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    CHECK(std::stod(t[k + 1][0]) == tr.times[k]);
    CHECK(std::abs(std::stod(t[k + 1][1]) - tr.states(0, static_cast<Eigen::Index>(k))) <= 1e-15);
    CHECK(std::abs(std::stod(t[k + 1][2]) - tr.states(1, static_cast<Eigen::Index>(k))) <= 1e-15);
  }
  const json s = json::parse(slurp(summ));
  CHECK(s.at("rho_beta_b").get<double>() >= 0.0);
  CHECK(s.at("dt_bound").get<double>() > 0.0);
}

TEST_CASE("config round trip gives identical output") {
  json j = sdof_config(0.1);
  j["force"] = {{"type", "gaussian"}, {"t0", 0.5}, {"s", 0.2}, {"terms", {{{"a", 1.0}, {"omega", 3.0}}, {{"a", 0.5}, {"omega", 7.0}}}}};
  const RunConfig first = parse_config(j);
  const json again = to_json(first);
  const RunConfig second = parse_config(again);
  CHECK(to_json(second) == again);

  for (const std::string method : {"per", "newmark", "mpim"}) {
    const std::string a = write_config("rt_a.json", j), b = write_config("rt_b.json", again);
    const CliResult ra = run({"simulate", "--config", a, "--method", method});
    const CliResult rb = run({"simulate", "--config", b, "--method", method});
    CHECK(ra.code == 0);
    CHECK(ra.out == rb.out);
  }
}

TEST_CASE("config parsing covers every model kind") {
  json beam = {{"version", 1},
               {"model", {{"type", "beam"}, {"n_elements", 6}, {"supports", {{{"node", 2}, {"spring", 1e5}, {"damper", 50.0}}}}}},
               {"force", {{"type", "step"}, {"t_c", 0.001}, {"f0", -10.0}}},
               {"dt", 1e-4},
               {"t_max", 1e-3}};
  const RunConfig b = parse_config(beam);
  CHECK(b.force.dof == 10);
  CHECK(b.build_model().dof() == 12);
  const SystemModel bm = b.build_model();
  CHECK(bm.force(0.0).isZero(0.0));
  CHECK(bm.force(0.002)[10] == -10.0);

  json chain = {{"version", 1},
                {"model", {{"type", "chain"}, {"n_dof", 3}, {"mass", 2.0}, {"stiffness", 50.0},
                           {"dampers", {{{"i", 0}, {"j", -1}, {"c", 1.0}}}},
                           {"springs", {{{"i", 0}, {"j", 2}, {"k", 5.0}}}}}},
                {"dt", 0.01},
                {"t_max", 0.1}};
  CHECK(parse_config(chain).build_model().dof() == 3);
  CHECK(to_json(parse_config(chain)) == to_json(parse_config(to_json(parse_config(chain)))));
}

TEST_CASE("validation errors exit with code 2") {
  json j = sdof_config(0.05);
  j["bogus"] = 1;
  CHECK(run({"simulate", "--config", write_config("bad1.json", j)}).code == kExitValidation);

  j = sdof_config(0.05);
  j["version"] = 2;
  CHECK(run({"simulate", "--config", write_config("bad2.json", j)}).code == kExitValidation);

  j = sdof_config(0.05);
  j["dt"] = -1.0;
  CHECK(run({"simulate", "--config", write_config("bad3.json", j)}).code == kExitValidation);

  j = sdof_config(0.05);
  j["t_max"] = 0.001;
  CHECK(run({"simulate", "--config", write_config("bad4.json", j)}).code == kExitValidation);

  j = sdof_config(0.05);
  j["model"]["K"] = {{1.0, 2.0}};
  CHECK(run({"simulate", "--config", write_config("bad5.json", j)}).code == kExitValidation);

  j = sdof_config(0.05);
  j["method"]["m_b"] = 7;
  CHECK(run({"simulate", "--config", write_config("bad6.json", j)}).code == kExitValidation);

  CHECK(run({"simulate", "--config", (scratch() / "missing.json").string()}).code == kExitValidation);
  {
    std::ofstream(scratch() / "garbage.json") << "{ not json";
  }
  CHECK(run({"simulate", "--config", (scratch() / "garbage.json").string()}).code == kExitValidation);
  CHECK(run({"simulate"}).code == kExitValidation);
  CHECK(run({"nope"}).code == kExitValidation);
  CHECK(run({"simulate", "--config", write_config("ok.json", sdof_config(0.05)), "--method", "euler"}).code ==
        kExitValidation);
  CHECK(run({"tau-limit", "--m", "3"}).code == kExitValidation);
  CHECK(run({"tau-limit", "--m", "0"}).code == kExitValidation);
  CHECK(run({"tau-limit", "--m", "62"}).code == kExitValidation);
}

TEST_CASE("divergence exits with code 3") {
  json j = sdof_config(0.0);
  j["method"] = {{"name", "rk4"}};
  j["dt"] = 0.5;
  j["t_max"] = 500.0;
  const CliResult r = run({"simulate", "--config", write_config("div.json", j)});
  CHECK(r.code == kExitDivergence);
  CHECK(r.err.find("diverged") != std::string::npos);
}

TEST_CASE("tau-limit output") {
  const CliResult r = run({"tau-limit", "--m", "2,10"});
  REQUIRE(r.code == 0);
  const Table t = parse_csv(r.out);
  REQUIRE(t.size() == 3);
  CHECK(t[0] == std::vector<std::string>{"m", "tau_L", "tau_L_over_2pi"});
  CHECK(std::abs(std::stod(t[1][1]) - 2.64303) <= 1e-4);
  CHECK(std::abs(std::stod(t[2][1]) - 7.38332) <= 1e-4);
  CHECK(std::abs(std::stod(t[1][2]) - 0.42065) <= 1e-5);

  const std::string curve = (scratch() / "curve.csv").string();
  CHECK(run({"tau-limit", "--m", "2", "--curve-out", curve, "--curve-m", "0", "--tau-max", "1", "--tau-step", "0.5"}).code == 0);
  const Table c = parse_csv(slurp(curve));
  REQUIRE(c.size() == 4);
  CHECK(std::abs(std::stod(c[3][1]) - 1 / (2 * std::sqrt(3.0))) <= 1e-12);
}

TEST_CASE("stability-map output") {
  const std::string grid = (scratch() / "grid.csv").string();
  const CliResult r = run({"stability-map", "--zeta", "0", "--ma", "2", "--grid-step", "0.01", "--out", grid});
  REQUIRE(r.code == 0);
  const Table t = parse_csv(r.out);
  REQUIRE(t.size() == 2);
  CHECK(t[0] == std::vector<std::string>{"zeta", "m_a", "r_a", "lower", "upper"});
  CHECK(std::abs(std::stod(t[1][4]) - 0.2757) <= 5e-4);
  const Table g = parse_csv(slurp(grid));
  CHECK(g[0] == std::vector<std::string>{"dt0_over_T", "max_abs_lambda"});
  CHECK(g.size() > 90);
  check_csv_rows(g);
}

TEST_CASE("cost-model output") {
  const CliResult r = run({"cost-model", "--method", "per", "--N", "1"});
  REQUIRE(r.code == 0);
  const Table t = parse_csv(r.out);
  REQUIRE(t.size() == 2);
  CHECK(t[1][0] == "per");
  CHECK(t[1][3] == "213");
  const Table all = parse_csv(run({"cost-model"}).out);
  REQUIRE(all.size() == 4);
  CHECK(all[2][3] == "818");
  CHECK(std::abs(std::stod(all[1][7]) - 213.0 / 818.0) <= 1e-15);
  CHECK(run({"cost-model", "--method", "bogus"}).code == kExitValidation);
  CHECK(run({"cost-model", "--N", "0"}).code == kExitValidation);
}

TEST_CASE("sweep commands") {
  json j = sdof_config(0.05);
  j["t_max"] = 2.0;
  j["sweep"] = {{"dt_list", {0.1, 0.05, 0.5}}, {"zeta_list", {0.0, 1.0, 2.0}}};
  const std::string cfg = write_config("sweep.json", j);

  const CliResult d = run({"sweep-dt", "--config", cfg, "--method", "rk4"});
  REQUIRE(d.code == 0);
  const Table td = parse_csv(d.out);
  CHECK(td[0] == std::vector<std::string>{"dt", "dt_over_T", "e_disp", "e_vel", "diverged"});
  CHECK(td.size() == 4);
  check_csv_rows(td);

  const CliResult z = run({"sweep-damping", "--config", cfg});
  REQUIRE(z.code == 0);
  const Table tz = parse_csv(z.out);
  CHECK(tz[0] == std::vector<std::string>{"zeta", "damping_level", "e_disp", "e_vel", "rho_beta_b", "diverged"});
  CHECK(tz.size() == 4);
  CHECK(std::stod(tz[1][4]) == 0.0);
  check_csv_rows(tz);

  const CliResult c = run({"compare", "--config", cfg, "--methods", "per,newmark,rk4"});
  REQUIRE(c.code == 0);
  const Table tc = parse_csv(c.out);
  CHECK(tc[0] == std::vector<std::string>{"method", "dt", "e_disp", "e_vel", "diverged", "setup_seconds", "loop_seconds"});
  REQUIRE(tc.size() == 4);
  CHECK(std::stod(tc[1][2]) < std::stod(tc[2][2]));
  check_csv_rows(tc);
}

TEST_CASE("beam with a step load agrees with the RK4 reference") {
  json j = {{"version", 1},
            {"model", {{"type", "beam"}}},
            {"force", {{"type", "step"}, {"t_c", 0.0}, {"f0", -1000.0}}},
            {"method", {{"name", "per"}}},
            {"dt", 1e-5},
            {"t_max", 0.02},
            {"dof", 46},
            {"reference", {{"refine", 20}}}};
  const std::string cfg = write_config("beam.json", j);
  const std::string out = (scratch() / "beam.csv").string();
  const CliResult s = run({"simulate", "--config", cfg, "--out", out});
  REQUIRE(s.code == 0);
  const Table t = parse_csv(slurp(out));
  CHECK(t.size() == 2002);
  check_csv_rows(t);
  const CliResult c = run({"compare", "--config", cfg, "--methods", "per"});
  REQUIRE(c.code == 0);
  const Table tc = parse_csv(c.out);
  CHECK(tc[1][4] == "false");
  CHECK(std::stod(tc[1][2]) <= 1e-3);
}
