#include "roentgen/cli.hpp"
#include "roentgen/errors.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace roentgen;
using namespace roentgen::cli;

namespace {

std::filesystem::path work(const std::string &name) {
  const auto p = std::filesystem::path(ROENTGEN_TEST_WORK) / name;
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path &p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(r);
  }
  return rows;
}

const char *kRestYaml = R"(
atom:
  dimensionless: {epsilon: 0.0, gamma_tilde: 0.001}
coupling: standard
distribution: point
geometry: perpendicular
x_grid: {min: 0.99, max: 1.01, points: 2001}
seed: 3
)";

} // namespace

TEST_CASE("yaml and json configs are interchangeable") {
  const auto y = parse_config(R"(
atom: {dimensionless: {epsilon: 0.01, gamma_tilde: 0.002}}
coupling: {model: roentgen, recoil_term: false, momentum_shift: true}
distribution: {kind: gaussian, mean: [0.001, 0, 0], sigma: 1.0e-5}
geometry: {theta: 1.0, phi: 0.5}
formfactor: {kind: gaussian, cutoff: 10}
tolerance: 1.0e-9
)", false);
  const auto j = parse_config(R"({
"atom": {"dimensionless": {"epsilon": 0.01, "gamma_tilde": 0.002}},
"coupling": {"model": "roentgen", "recoil_term": false, "momentum_shift": true},
"distribution": {"kind": "gaussian", "mean": [0.001, 0, 0], "sigma": 1e-5},
"geometry": {"theta": 1.0, "phi": 0.5},
"formfactor": {"kind": "gaussian", "cutoff": 10},
"tolerance": 1e-9
})", true);
  CHECK(y.scenario.params.epsilon == j.scenario.params.epsilon);
  CHECK(y.scenario.params.gamma_tilde == j.scenario.params.gamma_tilde);
  CHECK(y.scenario.coupling.describe() == "roentgen-recoil+shift");
  CHECK(j.scenario.coupling.describe() == "roentgen-recoil+shift");
  CHECK(y.direction.vec() == j.direction.vec());
  CHECK(y.direction.dot(y.scenario.dipole) == doctest::Approx(std::cos(1.0)));
  CHECK(y.formfactor.describe() == j.formfactor.describe());
  CHECK(y.tolerance == 1e-9);
  CHECK(y.scenario.distribution.kind_name() == "gaussian");
}

TEST_CASE("perpendicular direction is exactly orthogonal") {
  const auto c = parse_config(kRestYaml, false);
  CHECK(c.direction.dot(c.scenario.dipole) == 0.0);
}

TEST_CASE("field-level config errors") {
  const auto fails_with = [](const std::string &text, const std::string &field) {
    CAPTURE(text);
    CHECK_THROWS_WITH_AS(parse_config(text, false), doctest::Contains(field.c_str()), ConfigError);
  };
  fails_with("atom: {dimensionless: {epsilon: 0.1}}", "atom.dimensionless.gamma_tilde");
  fails_with("atom: {dimensionless: {epsilon: -0.1, gamma_tilde: 0.1}}", "atom.dimensionless.epsilon");
  fails_with("atom: {dimensionless: {epsilon: 0.1, gamma_tilde: 0.1}, physical: {omega0: 1}}", "atom");
  fails_with("atom: {dimensionless: {epsilon: 0.1, gamma_tilde: 0.1}}\ncoupling: dipole", "coupling");
  fails_with("atom: {dimensionless: {epsilon: 0.1, gamma_tilde: 0.1}}\nscan: {points: 16, lamda_max: 5}",
             "scan.lamda_max");
  fails_with("atom: {dimensionless: {epsilon: 0.1, gamma_tilde: 0.1}}\n"
             "distribution: {kind: tabulated, file: missing.csv}",
             "distribution.file");
  fails_with("atom: {dimensionless: {epsilon: 0.1, gamma_tilde: 0.1}}\n"
             "distribution: {kind: gaussian, covariance: [[1, 0, 0], [0, -1, 0], [0, 0, 1]]}",
             "distribution.covariance");
  fails_with("atom: {physical: {mass: 1.0e-26, omega0: 1.0e15, gamma0: -3}}", "atom.physical.gamma0");
  fails_with("atom: {dimensionless: {epsilon: 0.1, gamma_tilde: 0.1}}\nformfactor: {kind: lorentz, cutoff: 3}",
             "formfactor.kind");
  CHECK_THROWS_AS(parse_config("{", true), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), ConfigError);
}

TEST_CASE("physical input resolves to dimensionless parameters") {
  const auto c = parse_config(R"(
atom: {physical: {mass: 1.443160648e-25, omega0: 2.4e15, gamma0: 3.8e7}}
)", false);
  PhysicalInput in{1.443160648e-25, 2.4e15, 3.8e7, {}, false};
  const auto d = to_dimensionless(in);
  CHECK(c.scenario.params.epsilon == d.epsilon);
  CHECK(c.scenario.params.gamma_tilde == d.gamma_tilde);

  const auto dir = work("physical");
  auto cfg = c;
  cfg.output = dir;
  cfg.rates.limit_ordering = false;
  std::ostringstream err;
  REQUIRE(run("rates", cfg, err) == ExitCode::ok);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m["dimensionless"]["epsilon"].get<double>() == d.epsilon);
  CHECK(m["dimensionless"]["gamma_tilde"].get<double>() == d.gamma_tilde);
  CHECK(m["physical"]["mass"].get<double>() == 1.443160648e-25);
}

TEST_CASE("tabulated files resolve relative to the config") {
  const auto c = load_config(std::filesystem::path(ROENTGEN_TEST_DATA) / "tabulated.yaml");
  CHECK(c.scenario.distribution.kind_name() == "tabulated");
  CHECK(project(c.scenario.distribution, c.direction).nodes.size() == 3);
}

TEST_CASE("number formatting keeps 17 significant digits") {
  for (double v : {1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.1}) {
    const std::string s = format_number(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_number(1.0) == "1.0000000000000000e+00");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("spectrum run on the rest atom") {
  auto cfg = parse_config(kRestYaml, false);
  cfg.output = work("rest");
  std::ostringstream err;
  REQUIRE(run("spectrum", cfg, err) == ExitCode::ok);
  const auto rows = read_csv(cfg.output / "spectrum.csv");
  REQUIRE(rows.size() == 2001);
  std::size_t k = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i][1] > rows[k][1]) k = i;
  CHECK(std::abs(rows[k][0] - 1.0) <= 1e-5 + 1e-15);
  const auto m = nlohmann::json::parse(slurp(cfg.output / "manifest.json"));
  CHECK(m["outputs"]["spectrum.csv"].get<std::string>() == sha256_file(cfg.output / "spectrum.csv"));
  CHECK(m["seed"].get<std::uint64_t>() == 3);
}

TEST_CASE("repeated runs are byte-identical") {
  auto cfg = parse_config(R"(
atom: {dimensionless: {epsilon: 0.01, gamma_tilde: 0.01}}
coupling: roentgen
distribution: {kind: gaussian, sigma: 1.0e-3}
geometry: {theta: 1.1, phi: 0.2}
x_grid: {points: 101}
scan: {lambda_min: 100, lambda_max: 1000, points: 6}
checks: {structural_samples: 50}
)", false);
  for (const std::string sub : {"spectrum", "rates"}) {
    cfg.output = work("det_a_" + sub);
    cfg.threads = 1;
    std::ostringstream err;
    REQUIRE(run(sub, cfg, err) == ExitCode::ok);
    auto other = cfg;
    other.output = work("det_b_" + sub);
    other.threads = 3;
    REQUIRE(run(sub, other, err) == ExitCode::ok);
    for (const auto &entry : std::filesystem::directory_iterator(cfg.output))
      CHECK(slurp(entry.path()) == slurp(other.output / entry.path().filename()));
  }
}

TEST_CASE("seed changes only the structural check") {
  auto cfg = parse_config(kRestYaml, false);
  cfg.structural_samples = 20;
  cfg.output = work("seed_a");
  std::ostringstream err;
  REQUIRE(run("spectrum", cfg, err) == ExitCode::ok);
  auto other = cfg;
  apply_overrides(other, {work("seed_b"), {}, {}, 99});
  REQUIRE(run("spectrum", other, err) == ExitCode::ok);
  CHECK(slurp(cfg.output / "spectrum.csv") == slurp(other.output / "spectrum.csv"));
  CHECK(slurp(cfg.output / "manifest.json") != slurp(other.output / "manifest.json"));
}

TEST_CASE("exit codes") {
  std::ostringstream err;
  auto cfg = parse_config(R"(
atom: {dimensionless: {epsilon: 0.01, gamma_tilde: 0.01}}
coupling: roentgen
pattern: {mode: formfactor}
)", false);
  cfg.output = work("rejected");
  CHECK(run("pattern", cfg, err) == ExitCode::rejected);
  CHECK(err.str() == unregularized_rejection_message(cfg.scenario) + "\n");

  std::ostringstream err2;
  cfg.output = work("unknown");
  CHECK(run("lifetime", cfg, err2) == ExitCode::config);

  std::ostringstream err3;
  CHECK(run_file("spectrum", "/nonexistent.yaml", {}, err3) == ExitCode::config);
  CHECK(err3.str().find("/nonexistent.yaml") != std::string::npos);

  // A zero-epsilon divergence comparison is a configuration error.
  std::ostringstream err4;
  auto rest = parse_config(kRestYaml, false);
  rest.output = work("div_zero");
  CHECK(run("divergence", rest, err4) == ExitCode::config);

  // A panel budget too small for the requested tolerance is a numerical failure.
  std::ostringstream err5;
  auto tight = parse_config(R"(
atom: {dimensionless: {epsilon: 0.0, gamma_tilde: 1.0e-6}}
coupling: standard
probability: {upper: 50}
tolerance: 1.0e-15
)", false);
  tight.output = work("tight");
  CHECK(run("probability", tight, err5) == ExitCode::numerical);
}

TEST_CASE("oracle run writes its report") {
  auto cfg = parse_config(R"(
atom: {dimensionless: {epsilon: 0.0, gamma_tilde: 0.01}}
oracle: {modes: 300, gamma: 0.02, half_width: 40, duration: 12, time_step: 0.1}
)", false);
  cfg.output = work("oracle");
  std::ostringstream err;
  REQUIRE(run("oracle", cfg, err) == ExitCode::ok);
  const auto j = nlohmann::json::parse(slurp(cfg.output / "oracle.json"));
  CHECK(j["rate_relative_error"].get<double>() < 0.05);
  CHECK_FALSE(j["flagged"].get<bool>());
}
