#include "roentgen/spectra.hpp"

#include "roentgen/errors.hpp"
#include "roentgen/gauss_rules.hpp"
#include "roentgen/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace roentgen {

namespace {

constexpr double kPerpendicularTol = 1e-12;
// Conditional gaussian orders: the polarization sum is a quadratic in beta.
constexpr std::size_t kConditionalOrder = 4;
constexpr std::size_t kMaxNodeFeatures = 256;
// Doppler tolerance floor in units of eps_mach / gamma_tilde.
constexpr double kRoundoffFloor = 256.0;

bool is_perpendicular(const Scenario &s, const UnitVector3 &n) {
  return std::abs(n.dot(s.dipole)) <= kPerpendicularTol;
}

bool is_full_roentgen(const CouplingModel &m) {
  return !m.is_standard() && m.include_recoil_term && m.apply_momentum_shift;
}

double point_density(const Scenario &s, const UnitVector3 &n, double x, const Vec3 &beta) {
  return x * x * spectral_kernel(s.coupling, x, n, beta, s.params, s.dipole).value;
}

Expectation gaussian_density(const Scenario &s, const GaussianPacket &packet,
                             const UnitVector3 &n, double x) {
  const ConditionalGaussian cond = condition_on_projection(packet, n);
  const double eps = s.params.epsilon;
  const double quarter_gamma2 = 0.25 * s.params.gamma_tilde * s.params.gamma_tilde;
  const bool perpendicular = is_perpendicular(s, n);

  const auto density_at = [&](double delta) -> double {
    if (perpendicular && is_full_roentgen(s.coupling))
      return x * x * perpendicular_closed_form(x, delta, s.params);
    if (perpendicular)
      return point_density(s, n, x, delta * n.vec());
    const Mixture nodes = gaussian_nodes(cond.at(delta), kConditionalOrder);
    const double mean_sum = mixture_sum(nodes, [&](const Vec3 &beta) {
      return polarization_sum(s.coupling, beta, x, n, s.dipole, eps);
    });
    const double d = detuning(x, delta, eps);
    return x * x * x * mean_sum / (d * d + quarter_gamma2);
  };

  if (cond.delta_sigma == 0.0)
    return {density_at(cond.delta_mean), 0.0, 1};

  ProjectedDistribution proj;
  proj.kind = ProjectedDistribution::Kind::gaussian;
  proj.mean = cond.delta_mean;
  proj.sigma = cond.delta_sigma;
  std::vector<Feature> features;
  if (x > 0.0)
    features.push_back({1.0 - (1.0 - eps * x * x) / x, 0.5 * s.params.gamma_tilde / x});
  // The detuning is formed near x = 1 with absolute resolution ~1e-16, so
  // the kernel carries rounding noise of relative size ~eps_mach / gamma.
  QuadratureOptions opts = s.doppler;
  opts.rel_tol = std::max(opts.rel_tol, kRoundoffFloor * std::numeric_limits<double>::epsilon() /
                                            s.params.gamma_tilde);
  return expectation_1d_adaptive(proj, density_at, features, opts);
}

std::string format_number(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

} // namespace

//==============================================================================

double Formfactor::operator()(double x) const {
  switch (kind) {
  case Kind::none:
    return 1.0;
  case Kind::sharp:
    return x <= cutoff ? 1.0 : 0.0;
  case Kind::gaussian:
    return std::exp(-(x * x) / (cutoff * cutoff));
  case Kind::exponential:
    return std::exp(-x / cutoff);
  }
  return 1.0;
}

std::string Formfactor::describe() const {
  switch (kind) {
  case Kind::none:
    return "none";
  case Kind::sharp:
    return "sharp(" + format_number(cutoff) + ")";
  case Kind::gaussian:
    return "gaussian(" + format_number(cutoff) + ")";
  case Kind::exponential:
    return "exponential(" + format_number(cutoff) + ")";
  }
  return "none";
}

void Formfactor::validate() const {
  if (kind != Kind::none && (!(cutoff > 0.0) || !std::isfinite(cutoff)))
    throw ConfigError("formfactor cutoff must be finite and > 0");
}

//==============================================================================

Expectation spectral_density(const Scenario &scenario, const UnitVector3 &n, double x) {
  if (!(x >= 0.0) || !std::isfinite(x))
    throw ConfigError("spectral_density: x must be finite and >= 0");
  if (x == 0.0)
    return {0.0, 0.0, 0};
  const auto f = [&](const Vec3 &beta) { return point_density(scenario, n, x, beta); };
  if (const auto *g = std::get_if<GaussianPacket>(&scenario.distribution.variant())) {
    if (scenario.method == DopplerMethod::automatic)
      return gaussian_density(scenario, *g, n, x);
    return expectation(scenario.distribution, f, scenario.expectation);
  }
  return expectation(scenario.distribution, f, scenario.expectation);
}

std::vector<Feature> LineFeatures::features() const {
  std::vector<Feature> out{{x_star, natural_width}};
  if (doppler_width > 0.0)
    out.push_back({x_star, doppler_width});
  return out;
}

LineFeatures line_features(const Scenario &scenario, const UnitVector3 &n) {
  validate(scenario.params);
  ExpectationOptions moments{2, false};
  const double mean =
      expectation(scenario.distribution, [&](const Vec3 &b) { return n.dot(b); }, moments).value;
  const double second =
      expectation(scenario.distribution, [&](const Vec3 &b) { return n.dot(b) * n.dot(b); },
                  moments)
          .value;
  const double sigma = std::sqrt(std::max(0.0, second - mean * mean));

  LineFeatures out;
  const double eps = scenario.params.epsilon;
  out.x_star = resonance_frequency(mean, eps).x_star;
  const double jac = resonance_jacobian(mean, eps, out.x_star);
  out.natural_width = scenario.params.gamma_tilde / jac;
  out.doppler_width = sigma * out.x_star / jac;
  return out;
}

namespace {

// Resonance seeds for every node of a discrete distribution.
std::vector<Feature> node_features(const Scenario &s, const UnitVector3 &n) {
  std::vector<double> deltas;
  const auto &v = s.distribution.variant();
  if (const auto *t = std::get_if<TabulatedProjection>(&v))
    for (double d : t->delta)
      deltas.push_back(d * n.dot(t->direction));
  else if (const auto *m = std::get_if<Mixture>(&v))
    for (const Vec3 &b : m->beta)
      deltas.push_back(n.dot(b));
  if (deltas.size() > kMaxNodeFeatures)
    return {};
  std::vector<Feature> out;
  for (double d : deltas) {
    if (s.params.epsilon == 0.0 && d >= 1.0)
      continue;
    const double xs = resonance_frequency(d, s.params.epsilon).x_star;
    out.push_back({xs, s.params.gamma_tilde / resonance_jacobian(d, s.params.epsilon, xs)});
  }
  return out;
}

} // namespace

SpectralResult directional_spectrum(const Scenario &scenario, const UnitVector3 &n,
                                    const std::vector<double> &x_grid, std::size_t threads) {
  validate(scenario.params);
  if (x_grid.empty())
    throw ConfigError("spectrum grid is empty");
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!(x_grid[i] >= 0.0) || !std::isfinite(x_grid[i]))
      throw ConfigError("spectrum grid values must be finite and >= 0");
    if (i > 0 && !(x_grid[i] > x_grid[i - 1]))
      throw ConfigError("spectrum grid must be strictly increasing");
  }

  SpectralResult out;
  out.direction = n;
  out.x = x_grid;
  out.w.assign(x_grid.size(), 0.0);
  out.error.assign(x_grid.size(), 0.0);
  out.kappa = normalization_kappa(scenario.params);
  out.line = line_features(scenario, n);

  const double reach = 10.0 * std::max(scenario.params.gamma_tilde, out.line.doppler_width);
  if (x_grid.front() > out.line.x_star - reach || x_grid.back() < out.line.x_star + reach) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "grid [" << x_grid.front() << ", " << x_grid.back()
        << "] does not cover the resonance x* = " << out.line.x_star << " +- " << reach;
    out.warnings.push_back(msg.str());
  }

  parallel_for(x_grid.size(), threads, [&](std::size_t i) {
    const Expectation e = spectral_density(scenario, n, x_grid[i]);
    out.w[i] = e.value;
    out.error[i] = e.error;
  });
  return out;
}

std::vector<double> resonance_grid(const Scenario &scenario, const UnitVector3 &n,
                                   std::size_t points, double half_widths) {
  if (points < 2)
    throw ConfigError("resonance grid needs at least two points");
  const LineFeatures line = line_features(scenario, n);
  const double reach = half_widths * line.width();
  const double lo = std::max(0.0, line.x_star - reach);
  const double hi = line.x_star + reach;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  grid.back() = hi;
  return grid;
}

QuadratureResult directional_probability(const Scenario &scenario, const UnitVector3 &n,
                                         const Formfactor &formfactor, double upper_limit,
                                         const QuadratureOptions &options, double lower_limit) {
  formfactor.validate();
  const LineFeatures line = line_features(scenario, n);
  if (!(upper_limit > line.x_star) || !std::isfinite(upper_limit))
    throw ConfigError("upper integration limit must exceed the resonance frequency x* = " +
                      format_number(line.x_star));
  if (!(lower_limit >= 0.0) || !(lower_limit < upper_limit))
    throw ConfigError("lower integration limit must satisfy 0 <= lower < upper");

  double upper = upper_limit;
  if (formfactor.kind == Formfactor::Kind::sharp)
    upper = std::min(upper, formfactor.cutoff);
  if (!(upper > lower_limit))
    return {0.0, 0.0, 0, 0, true};

  QuadratureOptions opts = options;
  for (const Feature &f : line.features())
    opts.features.push_back(f);
  for (const Feature &f : node_features(scenario, n))
    opts.features.push_back(f);

  const auto integrand = [&](double x) {
    return spectral_density(scenario, n, x).value * formfactor(x);
  };
  return integrate_adaptive(integrand, lower_limit, upper, opts);
}

//==============================================================================

const DivergenceEntry &DivergenceReport::entry(const std::string &name) const {
  for (const auto &e : entries)
    if (e.name == name)
      return e;
  throw std::out_of_range("no divergence entry named " + name);
}

int compare_growth(const TailClassification &a, const TailClassification &b) {
  const auto rank = [](TailKind k) {
    switch (k) {
    case TailKind::convergent:
      return 0;
    case TailKind::logarithmic:
      return 1;
    case TailKind::power:
      return 2;
    case TailKind::ambiguous:
      return -1;
    }
    return -1;
  };
  const int ra = rank(a.kind);
  const int rb = rank(b.kind);
  if (ra != rb)
    return ra > rb ? 1 : -1;
  if (a.kind == TailKind::power) {
    if (a.exponent > b.exponent + 0.1)
      return 1;
    if (b.exponent > a.exponent + 0.1)
      return -1;
  }
  return 0;
}

DivergenceReport divergence_comparison(const Scenario &base, const UnitVector3 &n,
                                       const DivergenceOptions &options) {
  validate(base.params);
  if (!(base.params.epsilon > 0.0))
    throw ConfigError("divergence comparison needs a finite mass (epsilon > 0)");

  DivergenceReport report;
  const LineFeatures line = line_features(base, n);
  report.asymptotic_start = std::isnan(options.asymptotic_start)
                                ? std::max(10.0 / base.params.epsilon, 10.0 * line.x_star)
                                : options.asymptotic_start;

  const std::vector<std::pair<std::string, CouplingModel>> models{
      {"roentgen", CouplingModel::roentgen(true, true)},
      {"standard", CouplingModel::standard()},
      {"roentgen_no_recoil", CouplingModel::roentgen(false, true)}};

  QuadratureOptions quad = options.quadrature;
  for (const Feature &f : line.features())
    quad.features.push_back(f);
  TailOptions tail = options.tail;
  tail.asymptotic_start = report.asymptotic_start;

  for (const auto &[name, model] : models) {
    Scenario s = base;
    s.coupling = model;
    const auto f = [&](double x) { return spectral_density(s, n, x).value; };
    DivergenceEntry entry;
    entry.name = name;
    entry.model = model;
    entry.scan = cutoff_scan(f, 0.0, options.lambdas, quad);
    entry.tail = classify_tail(entry.scan, tail);
    report.entries.push_back(std::move(entry));
  }

  const auto &a = report.entry("roentgen").tail;
  const auto &b = report.entry("standard").tail;
  const auto &c = report.entry("roentgen_no_recoil").tail;
  if (a.kind != TailKind::ambiguous && b.kind != TailKind::ambiguous &&
      c.kind != TailKind::ambiguous) {
    const int ab = compare_growth(a, b);
    report.roentgen_more_divergent = ab > 0;
    report.recoil_removal_cures = compare_growth(c, a) < 0;
    std::string verdict = "roentgen: " + a.label() + " vs standard: " + b.label() + "; ";
    verdict += ab > 0 ? "roentgen strictly more divergent"
                      : (ab == 0 ? "same growth class" : "standard more divergent");
    verdict += "; without recoil term: " + c.label();
    verdict += *report.recoil_removal_cures ? " (removing the recoil term cures the divergence)"
                                            : " (removing the recoil term does not cure it)";
    report.verdict = verdict;
  }
  return report;
}

//==============================================================================

std::string unregularized_rejection_message(const Scenario &scenario) {
  std::ostringstream msg;
  if (!scenario.coupling.is_standard() && scenario.params.epsilon > 0.0) {
    msg << "rejected: unregularized emission probability for a finite-mass atom (epsilon = "
        << scenario.params.epsilon
        << ") with the Roentgen coupling. The direction-resolved frequency integral diverges "
           "(integrand grows linearly in x); supply a formfactor or use golden-rule mode.";
  } else {
    msg << "rejected: unregularized emission probability. The direction-resolved frequency "
           "integral diverges without a formfactor; supply a formfactor or use golden-rule "
           "mode.";
  }
  return msg.str();
}

std::vector<PatternRow> angular_pattern(const Scenario &scenario,
                                        const std::vector<double> &thetas, double phi,
                                        const PatternMode &mode, std::size_t threads) {
  validate(scenario.params);
  if (mode.kind == PatternMode::Kind::formfactor) {
    mode.formfactor.validate();
    if (!mode.formfactor.regularizes())
      throw PhysicsRejection(unregularized_rejection_message(scenario));
  }

  std::vector<PatternRow> rows(thetas.size());
  const double reference_sphere = 8.0 * std::numbers::pi / 3.0;
  const double kappa = normalization_kappa(scenario.params);

  parallel_for(thetas.size(), threads, [&](std::size_t i) {
    const UnitVector3 n = direction_about_dipole(scenario.dipole, thetas[i], phi);
    PatternRow row{thetas[i], phi, 0.0, 0.0};
    if (mode.kind == PatternMode::Kind::golden_rule) {
      const Expectation e = expectation(
          scenario.distribution,
          [&](const Vec3 &beta) {
            return golden_rule_rate(mode.variant, beta, n, scenario.dipole, scenario.params,
                                    scenario.coupling)
                .value;
          },
          scenario.expectation);
      row.value = e.value / reference_sphere;
      row.error = e.error / reference_sphere;
    } else {
      double upper = mode.upper_limit;
      if (!(upper > 0.0)) {
        const double c = mode.formfactor.cutoff;
        upper = mode.formfactor.kind == Formfactor::Kind::gaussian      ? 20.0 * c
                : mode.formfactor.kind == Formfactor::Kind::exponential ? 40.0 * c
                                                                        : c;
      }
      const QuadratureResult r =
          directional_probability(scenario, n, mode.formfactor, upper, mode.quadrature);
      if (!r.converged)
        throw NumericalError("directional probability did not converge at theta = " +
                             format_number(thetas[i]));
      row.value = kappa * r.value;
      row.error = kappa * r.error_estimate;
    }
    rows[i] = row;
  });
  return rows;
}

double pattern_sphere_integral(const Scenario &scenario, const PatternMode &mode,
                               std::size_t theta_points, std::size_t phi_points,
                               std::size_t threads) {
  if (theta_points == 0 || phi_points == 0)
    throw ConfigError("sphere integral needs at least one point per axis");
  const GaussLegendreRule rule = gauss_legendre(theta_points);
  std::vector<double> thetas(theta_points);
  for (std::size_t i = 0; i < theta_points; ++i)
    thetas[i] = std::acos(rule.nodes[i]);
  const double dphi = 2.0 * std::numbers::pi / static_cast<double>(phi_points);
  double total = 0.0;
  for (std::size_t j = 0; j < phi_points; ++j) {
    const auto rows = angular_pattern(scenario, thetas, dphi * static_cast<double>(j), mode,
                                      threads);
    for (std::size_t i = 0; i < theta_points; ++i)
      total += rule.weights[i] * dphi * rows[i].value;
  }
  return total;
}

} // namespace roentgen
