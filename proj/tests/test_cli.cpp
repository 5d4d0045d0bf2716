#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "r2dnet/cli.hpp"

using namespace r2dnet;
using namespace r2dnet::cli;

namespace {

const std::string kConfig = R2DNET_SOURCE_DIR "/configs/heat_exchanger.cfg";

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("r2dnet_cli_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig heat(const std::string& dir, int n2 = 300) {
  auto c = load_config(kConfig);
  c.out_dir = dir;
  c.n2 = n2;
  return c;
}

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST_CASE("config file loads the heat exchanger run") {
  const auto c = load_config(kConfig);
  CHECK(c.plant_kind == PlantKind::Pde);
  CHECK(c.sampling.h1 == 0.1);
  REQUIRE(c.rho_p.has_value());
  CHECK(*c.rho_p == -1.317);
  CHECK(c.beta1 == 36);
  CHECK(c.n1 == 40);
  CHECK(c.n2 == 300);
}

TEST_CASE("dump and reload is exact") {
  auto c = load_config(kConfig);
  c.sampling.h1 = 0.1 + 1e-17 * 3;
  c.delta_p = 1.0 / 3.0 * 0.1;
  c.rho_c.reset();
  const auto text = dump_config(c);
  CHECK(dump_config(parse(text)) == text);
  const auto back = parse(text);
  CHECK(back.sampling.h1 == c.sampling.h1);
  CHECK(back.delta_p == c.delta_p);
  CHECK_FALSE(back.rho_c.has_value());

  auto r = c;
  r.plant_kind = PlantKind::Roesser;
  r.a = (Matrix(2, 2) << 0.5, 0.1, -0.2, 0.3).finished();
  r.bmat = (Matrix(2, 1) << 1, 0).finished();
  r.c = (Matrix(1, 2) << 1, 1).finished();
  r.d = Matrix::Zero(1, 1);
  r.nh = 1;
  r.boundary_xh0 = Vector::Ones(1);
  r.boundary_xv0 = Vector::Constant(1, 0.25);
  r.beta_search = true;
  const auto rtext = dump_config(r);
  CHECK(dump_config(parse(rtext)) == rtext);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse("plant.a0 = x\n"), ConfigError);
  CHECK_THROWS_AS(parse("no.such.key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("just text\n"), ConfigError);
  CHECK_THROWS_AS(parse("quant.delta_p = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("plant.kind = roesser\n"), ConfigError);
  CHECK_THROWS_AS(parse("grid.n1 = 2.5\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
  CHECK_NOTHROW(parse("# only a comment\n\n"));
}

TEST_CASE("ranges and modes") {
  const auto r = parse_range("0.02:0.3:7");
  CHECK(r.count == 7);
  CHECK(r.at(0) == 0.02);
  CHECK(r.at(6) == doctest::Approx(0.3));
  CHECK(parse_range("0.5:0.5:1").at(0) == 0.5);
  CHECK_THROWS_AS(parse_range("1:2"), ConfigError);
  CHECK_THROWS_AS(parse_range("1:2:0"), ConfigError);
  CHECK(parse_mode("closed-triggered") == SimulationMode::ClosedTriggered);
  CHECK_THROWS_AS(parse_mode("sideways"), ConfigError);
  CHECK(format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("discretize writes the sampled blocks") {
  const auto dir = scratch("disc");
  std::ostringstream log;
  CHECK(cmd_discretize(heat(dir.string()), log) == kSuccess);
  const auto text = slurp(dir / "discrete_model.csv");
  CHECK(text.find("block,A11,1,1\n1.1051709180756477\n") != std::string::npos);
  CHECK(text.find("block,B2,1,1\n0\n") != std::string::npos);

  auto zero = heat(dir.string());
  zero.sampling = {0.0, 0.0};
  CHECK(cmd_discretize(zero, log) == kSuccess);
  CHECK(slurp(dir / "discrete_model.csv").find("block,A11,1,1\n1\n") != std::string::npos);
}

TEST_CASE("sweep-rho writes one row per point") {
  const auto dir = scratch("sweep");
  std::ostringstream log;
  CHECK(cmd_sweep_rho(heat(dir.string()), {0.1, 0.3, 2}, {0.1, 3.0, 2}, log) == kSuccess);
  std::ifstream in(dir / "fig4.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "h1,h2,rho_max,status");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 4);
  const double rho = std::stod(rows[0].substr(rows[0].find(',', rows[0].find(',') + 1) + 1));
  CHECK(rho == doctest::Approx(-1.317).epsilon(0.05 / 1.317));
  CHECK(rows[3].ends_with(",clamped"));
}

TEST_CASE("simulate modes") {
  const auto dir = scratch("sim");
  for (auto mode : {SimulationMode::Open, SimulationMode::ClosedQuantized, SimulationMode::ClosedTriggered}) {
    std::ostringstream log;
    CHECK(cmd_simulate(heat(dir.string(), 100), mode, log) == kSuccess);
    const auto summary = log.str();
    if (mode == SimulationMode::Open) CHECK(summary.find("trend=diverging") != std::string::npos);
    if (mode == SimulationMode::ClosedQuantized) CHECK(summary.find("trend=decaying") != std::string::npos);
  }
  std::ifstream trig(dir / "triggers.csv");
  std::string header, first;
  std::getline(trig, header);
  std::getline(trig, first);
  CHECK(header == "j_k");
  CHECK(first == "0");
  std::ifstream traj(dir / "traj.csv");
  std::getline(traj, header);
  CHECK(header == "i,j,y,y_transmitted,u_p,triggered");
}

TEST_CASE("simulate output is reproducible through a dumped config") {
  const auto a = scratch("repro_a");
  const auto b = scratch("repro_b");
  std::ostringstream log;
  auto c = heat(a.string(), 60);
  CHECK(cmd_simulate(c, SimulationMode::ClosedTriggered, log) == kSuccess);
  auto reloaded = parse(dump_config(c));
  reloaded.out_dir = b.string();
  CHECK(cmd_simulate(reloaded, SimulationMode::ClosedTriggered, log) == kSuccess);
  CHECK(slurp(a / "traj.csv") == slurp(b / "traj.csv"));
}

TEST_CASE("check exit codes") {
  std::ostringstream log;
  CHECK(cmd_check(heat("."), log) == kSuccess);
  CHECK(log.str().find("stable=1") != std::string::npos);
  CHECK(log.str().find("eps_sq=27.01") != std::string::npos);

  auto doubled = heat(".");
  doubled.delta_p = 0.08;
  doubled.delta_c = 0.08;
  std::ostringstream log2;
  CHECK(cmd_check(doubled, log2) == kConditionFailed);
  CHECK(log2.str().find("stable=0") != std::string::npos);

  auto search = heat(".");
  search.beta_search = true;
  std::ostringstream log3;
  CHECK(cmd_check(search, log3) == kSuccess);

  auto hopeless = search;
  hopeless.nu_c = -1.0;
  std::ostringstream log4;
  CHECK(cmd_check(hopeless, log4) == kSearchExhausted);
}
