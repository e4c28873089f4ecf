#include "oracles/voigt.hpp"

#include "roentgen/errors.hpp"
#include "roentgen/spectra.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace roentgen;

namespace {
const UnitVector3 kZ = UnitVector3::checked({0, 0, 1});
const UnitVector3 kX = UnitVector3::checked({1, 0, 0});

Scenario rest(double eps, double gamma, CouplingModel m = CouplingModel::roentgen()) {
  Scenario s;
  s.params = {eps, gamma};
  s.coupling = m;
  return s;
}

std::size_t argmax(const std::vector<double> &v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}
} // namespace

TEST_CASE("formfactor values") {
  CHECK(Formfactor::none()(1e9) == 1.0);
  CHECK(Formfactor::sharp(10)(9.99) == 1.0);
  CHECK(Formfactor::sharp(10)(10.01) == 0.0);
  CHECK(Formfactor::gaussian(10)(10) == doctest::Approx(std::exp(-1.0)));
  CHECK(Formfactor::exponential(10)(20) == doctest::Approx(std::exp(-2.0)));
  for (const auto &f : {Formfactor::gaussian(3), Formfactor::exponential(3), Formfactor::sharp(3)}) {
    CHECK(f(0.0) == 1.0);
    for (double x : {0.1, 1.0, 5.0, 50.0}) CHECK((f(x) >= 0.0 && f(x) <= 1.0));
  }
  CHECK_THROWS_AS(Formfactor::gaussian(-1).validate(), ConfigError);
}

TEST_CASE("rest-atom line") {
  const double g = 1e-3;
  auto s = rest(0.0, g, CouplingModel::standard());
  std::vector<double> grid;
  for (int i = -2000; i <= 2000; ++i) grid.push_back(1.0 + 1e-5 * i);
  const auto r = directional_spectrum(s, kX, grid);
  CHECK(r.warnings.empty());
  const std::size_t k = argmax(r.w);
  CHECK(std::abs(grid[k] - 1.0) <= 1e-5);
  // Half maximum crossings.
  const double half = 0.5 * r.w[k];
  std::size_t lo = k, hi = k;
  while (lo > 0 && r.w[lo] > half) --lo;
  while (hi + 1 < grid.size() && r.w[hi] > half) ++hi;
  CHECK(grid[hi] - grid[lo] == doctest::Approx(g).epsilon(0.03));
  CHECK(spectral_density(s, kX, 0.0).value == 0.0);
}

TEST_CASE("Doppler-shifted peak") {
  auto s = rest(0.0, 1e-4);
  s.distribution = MomentumDistribution::point_mass(0.1 * kX.vec());
  const double step = 1e-5;
  std::vector<double> grid;
  for (int i = 0; i <= 4000; ++i) grid.push_back(1.09 + step * i);
  const auto r = directional_spectrum(s, kX, grid, 2);
  CHECK(std::abs(grid[argmax(r.w)] - 1.0 / 0.9) <= step);
}

TEST_CASE("peak shift with recoil stays at first order") {
  for (double delta : {-0.05, 0.0, 0.05}) {
    auto s = rest(1e-4, 1e-5);
    s.distribution = MomentumDistribution::point_mass(delta * kX.vec());
    const auto grid = resonance_grid(s, kX, 2001, 30.0);
    const auto r = directional_spectrum(s, kX, grid);
    const double step = grid[1] - grid[0];
    CHECK(std::abs(grid[argmax(r.w)] - resonance_frequency(delta, 1e-4).x_star) <= step);
    CHECK(std::abs(grid[argmax(r.w)] - 1.0 / (1.0 - delta)) <= 3e-4);
  }
}

TEST_CASE("uncovered resonance produces a warning") {
  const auto s = rest(0.0, 1e-3);
  const auto r = directional_spectrum(s, kX, {0.5, 0.6, 0.7});
  CHECK_FALSE(r.warnings.empty());
  CHECK_THROWS_AS(directional_spectrum(s, kX, {0.5, 0.5}), ConfigError);
}

TEST_CASE("Voigt line shape") {
  auto s = rest(0.0, 1e-6);
  const double sigma = 1e-5;
  s.distribution = MomentumDistribution::isotropic_gaussian(Vec3::Zero(), sigma);
  std::vector<double> grid;
  for (int i = -60; i <= 60; ++i) grid.push_back(1.0 + 5e-7 * i);
  const auto r = directional_spectrum(s, kX, grid, 2);
  const std::size_t k = argmax(r.w);
  const double peak = oracle::voigt_convolution(grid[k], 1.0, sigma, 0.5e-6);
  CHECK(std::abs(r.w[k] / peak - 1.0) < 1e-3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (r.w[i] < 0.5 * r.w[k]) continue;
    const double v = oracle::voigt_convolution(grid[i], 1.0, sigma, 0.5e-6);
    CHECK(std::abs(r.w[i] / v - 1.0) < 1e-2);
  }
}

TEST_CASE("conditional Doppler path equals the full tensor") {
  for (const auto &model : {CouplingModel::roentgen(), CouplingModel::standard(),
                            CouplingModel::roentgen(false, true)}) {
    Scenario s = rest(1e-3, 0.05, model);
    Eigen::Matrix3d cov;
    cov << 4e-6, 1e-6, 0, 1e-6, 2e-6, 5e-7, 0, 5e-7, 3e-6;
    s.distribution = MomentumDistribution::gaussian(Vec3(0.01, -0.005, 0.002), cov);
    for (const auto &n : {kX, UnitVector3::normalized({1, 0.3, 0.6})}) {
      for (double x : {0.97, 1.0, 1.02, 1.3}) {
        Scenario full = s;
        full.method = DopplerMethod::full_tensor;
        full.expectation.order = 40;
        const double a = spectral_density(s, n, x).value;
        const double b = spectral_density(full, n, x).value;
        CHECK(std::abs(a - b) <= 1e-8 * std::abs(b));
      }
    }
  }
}

TEST_CASE("gaussian equals its node mixture bit for bit") {
  Scenario s = rest(1e-3, 1e-2);
  Eigen::Matrix3d cov = Eigen::Vector3d(1e-6, 4e-6, 2e-6).asDiagonal();
  const GaussianPacket packet{Vec3(0.003, 0, 0), cov};
  s.distribution = MomentumDistribution::gaussian(packet.mean, packet.covariance);
  s.method = DopplerMethod::full_tensor;
  s.expectation = {10, false};
  const auto nodes = gaussian_nodes(packet, 10);
  Scenario m = s;
  m.distribution = MomentumDistribution::mixture(nodes.beta, nodes.weight);
  const auto n = UnitVector3::normalized({1, 0.2, 0.1});
  const auto grid = resonance_grid(s, n, 41);
  const auto a = directional_spectrum(s, n, grid);
  const auto b = directional_spectrum(m, n, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(a.w[i] == b.w[i]);
}

TEST_CASE("window integral of the line matches the golden-rule rate") {
  for (double delta : {0.0, 0.05}) {
    Scenario s = rest(0.01, 1e-4);
    s.distribution = MomentumDistribution::point_mass(delta * kX.vec());
    const auto rate = golden_rule_rate(RateVariant::F_prime, delta * kX.vec(), kX, kZ, s.params);
    const double half = 2000 * s.params.gamma_tilde;
    const auto p = directional_probability(s, kX, Formfactor::none(), rate.x_star + half, {},
                                           rate.x_star - half);
    const double expected = 2 * std::numbers::pi / s.params.gamma_tilde * rate.value;
    CHECK(p.value == doctest::Approx(expected).epsilon(2e-3));
  }
}

TEST_CASE("probability examples") {
  // Standard coupling at rest, infinite mass: w -> x^3 / (x - 1)^2 away from the
  // line, whose antiderivative is x^2/2 + 2x + 3 ln(x - 1) - 1/(x - 1).
  const auto s = rest(0.0, 1e-2, CouplingModel::standard());
  QuadratureOptions opt;
  opt.rel_tol = 1e-12;
  const auto p50 = directional_probability(s, kX, Formfactor::none(), 50.0, opt);
  const auto p100 = directional_probability(s, kX, Formfactor::none(), 100.0, opt);
  const auto anti = [](double x) { return x * x / 2 + 2 * x + 3 * std::log(x - 1) - 1 / (x - 1); };
  CHECK(std::isfinite(p50.value));
  CHECK(p100.value - p50.value == doctest::Approx(anti(100) - anti(50)).epsilon(1e-6));

  const auto r = rest(0.01, 1e-2);
  const auto g50 = directional_probability(r, kX, Formfactor::gaussian(10), 50, opt);
  const auto g100 = directional_probability(r, kX, Formfactor::gaussian(10), 100, opt);
  CHECK(std::abs(g100.value - g50.value) < 1e-8 * g100.value);

  const auto f5 = directional_probability(r, kX, Formfactor::gaussian(5), 100, opt);
  const auto f50 = directional_probability(r, kX, Formfactor::gaussian(50), 1000, opt);
  CHECK(std::abs(f5.value - f50.value) > 10 * (f5.error_estimate + f50.error_estimate));
  CHECK(f5.value < g100.value);
  CHECK(g100.value < f50.value);

  CHECK_THROWS_AS(directional_probability(r, kX, Formfactor::none(), 0.5), ConfigError);
}

TEST_CASE("roentgen scans increase with growing increments") {
  const auto s = rest(0.01, 1e-2);
  QuadratureOptions opt;
  opt.rel_tol = 1e-10;
  const auto lambdas = geometric_lambdas(1e2, 1e4, 9);
  const auto scan = cutoff_scan([&](double x) { return spectral_density(s, kX, x).value; }, 0.0,
                                lambdas, opt);
  for (std::size_t k = 1; k < scan.points.size(); ++k) {
    CHECK(scan.points[k].cumulative > scan.points[k - 1].cumulative);
    if (k > 1)
      CHECK(scan.points[k].cumulative - scan.points[k - 1].cumulative >
            scan.points[k - 1].cumulative - scan.points[k - 2].cumulative);
  }
}

TEST_CASE("divergence comparison") {
  const auto s = rest(0.01, 1e-2);
  const auto report = divergence_comparison(s, kX);
  CHECK(report.asymptotic_start == doctest::Approx(1000.0));
  const auto &a = report.entry("roentgen");
  const auto &b = report.entry("standard");
  const auto &c = report.entry("roentgen_no_recoil");
  CHECK(a.tail.kind == TailKind::power);
  CHECK(a.tail.exponent == doctest::Approx(2.0).epsilon(0.05));
  CHECK(b.tail.kind == TailKind::logarithmic);
  CHECK(b.tail.log_r_squared > 0.999);
  CHECK(c.tail.kind == TailKind::power);
  CHECK(c.tail.exponent == doctest::Approx(2.0).epsilon(0.05));
  REQUIRE(report.verdict.has_value());
  CHECK(report.verdict->find("roentgen: power(2.0") == 0);
  CHECK(report.verdict->find("vs standard: logarithmic") != std::string::npos);
  CHECK(report.roentgen_more_divergent == true);
  CHECK(report.recoil_removal_cures == false);
  CHECK_THROWS_AS(divergence_comparison(rest(0.0, 1e-2), kX), ConfigError);
}

TEST_CASE("growth ordering") {
  TailClassification p2{TailKind::power, 2.0}, p1{TailKind::power, 1.0}, p205{TailKind::power, 2.05};
  TailClassification lg{TailKind::logarithmic, 0.0}, cv{TailKind::convergent, -1.0};
  CHECK(compare_growth(p2, lg) > 0);
  CHECK(compare_growth(lg, cv) > 0);
  CHECK(compare_growth(p1, p2) < 0);
  CHECK(compare_growth(p2, p205) == 0);
  CHECK(compare_growth(cv, cv) == 0);
}

TEST_CASE("dipole pattern") {
  PatternMode mode;
  const auto s = rest(0.0, 1e-2);
  std::vector<double> thetas{0.0, 0.3, 0.9, std::numbers::pi / 2, 2.2};
  const auto rows = angular_pattern(s, thetas, 0.4, mode);
  CHECK(rows[0].value == doctest::Approx(0.0));
  for (const auto &r : rows)
    CHECK(r.value == doctest::Approx(3.0 / (8 * std::numbers::pi) * std::pow(std::sin(r.theta), 2)).epsilon(1e-12));
  CHECK(pattern_sphere_integral(s, mode) == doctest::Approx(1.0).epsilon(1e-10));

  PatternMode ff;
  ff.kind = PatternMode::Kind::formfactor;
  ff.formfactor = Formfactor::gaussian(20);
  // The formfactor scales the line by f(1); the off-resonant background adds
  // a relative gamma Lambda_f^2 / (4 pi).
  const auto s0 = rest(0.0, 1e-6, CouplingModel::standard());
  const auto frows = angular_pattern(s0, {std::numbers::pi / 2}, 0.0, ff);
  CHECK(frows[0].value == doctest::Approx(3.0 / (8 * std::numbers::pi) * std::exp(-1.0 / 400)).epsilon(1e-4));
}

TEST_CASE("moving atom pattern is asymmetric at order beta") {
  auto s = rest(0.0, 1e-2);
  const double beta = 0.01;
  s.distribution = MomentumDistribution::point_mass(beta * kX.vec());
  PatternMode mode;
  // Forward (n along beta) and backward, both perpendicular to e_d.
  const auto rows = angular_pattern(s, {std::numbers::pi / 2}, 0.0, mode);
  const auto back = angular_pattern(s, {std::numbers::pi / 2}, std::numbers::pi, mode);
  const double asym = (rows[0].value - back[0].value) / (rows[0].value + back[0].value);
  CHECK(asym > 0.0);
  CHECK(asym / beta > 0.5);
  CHECK(asym / beta < 5.0);
}

TEST_CASE("unregularized pattern requests are rejected") {
  PatternMode mode;
  mode.kind = PatternMode::Kind::formfactor;
  const auto s = rest(0.01, 1e-2);
  CHECK_THROWS_AS(angular_pattern(s, {1.0}, 0.0, mode), PhysicsRejection);
  CHECK_FALSE(unregularized_rejection_message(s).empty());
}
