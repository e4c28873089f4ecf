#include "output.hpp"

#include "roentgen/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace roentgen::cli {

using nlohmann::json;

namespace {

using Rows = std::vector<std::vector<std::string>>;

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = b;
  return out;
}

QuadratureOptions frequency_quadrature(const ScenarioConfig &cfg) {
  QuadratureOptions q;
  q.rel_tol = cfg.tolerance;
  return q;
}

json quadrature_json(const QuadratureResult &r) {
  return {{"value", r.value},
          {"error_estimate", r.error_estimate},
          {"evaluations", r.evaluations},
          {"panels", r.panels},
          {"converged", r.converged}};
}

// Uniform in [0, 1) from the top 53 bits, so the stream is fixed by the seed
// alone and not by the standard library's distribution code.
double unit_draw(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Closed form against the general engine over a rotated basis, on random
// perpendicular configurations.
json structural_check(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto ed = UnitVector3::checked({0.0, 0.0, 1.0});
  const auto n = UnitVector3::checked({1.0, 0.0, 0.0});
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = 10.0 * unit_draw(rng);
    const double delta = 0.6 * (unit_draw(rng) - 0.5);
    const DimensionlessParams p{0.05 * unit_draw(rng), 1e-4 + 0.1 * unit_draw(rng)};
    const double angle = 2.0 * std::numbers::pi * unit_draw(rng);
    const Vec3 beta = delta * n.vec() + Vec3(0.0, 0.2 * unit_draw(rng) - 0.1, 0.2 * unit_draw(rng) - 0.1);
    const auto basis = rotate_basis(polarization_basis(n), angle);
    const double engine = spectral_kernel(CouplingModel::roentgen(), x, basis, beta, p, ed).value;
    const double closed = perpendicular_closed_form(x, delta, p);
    const double err = closed == 0.0 ? std::abs(engine) : std::abs(engine - closed) / std::abs(closed);
    worst = std::max(worst, err);
  }
  return {{"samples", samples}, {"seed", seed}, {"max_relative_error", worst}};
}

//------------------------------------------------------------------------------

ExitCode run_spectrum(const ScenarioConfig &cfg, OutputSet &out, json &extra, std::ostream &err) {
  const auto grid = cfg.grid.around_resonance
                        ? resonance_grid(cfg.scenario, cfg.direction, cfg.grid.points, cfg.grid.half_widths)
                        : linspace(cfg.grid.min, cfg.grid.max, cfg.grid.points);
  const auto r = directional_spectrum(cfg.scenario, cfg.direction, grid, cfg.threads);
  Rows rows;
  for (std::size_t i = 0; i < r.x.size(); ++i)
    rows.push_back({format_number(r.x[i]), format_number(r.w[i]), format_number(r.error[i])});
  out.write_csv("spectrum.csv", {"x", "w", "error"}, rows);
  extra["line"] = {{"x_star", r.line.x_star},
                   {"natural_width", r.line.natural_width},
                   {"doppler_width", r.line.doppler_width}};
  if (!r.warnings.empty()) {
    extra["spectrum_warnings"] = r.warnings;
    for (const auto &w : r.warnings)
      err << "warning: " << w << "\n";
  }
  return ExitCode::ok;
}

ExitCode run_probability(const ScenarioConfig &cfg, OutputSet &out, json &, std::ostream &err) {
  const auto r = directional_probability(cfg.scenario, cfg.direction, cfg.formfactor,
                                         cfg.probability.upper, frequency_quadrature(cfg),
                                         cfg.probability.lower);
  const double kappa = normalization_kappa(cfg.scenario.params);
  json j = quadrature_json(r);
  j["lower"] = cfg.probability.lower;
  j["upper"] = cfg.probability.upper;
  j["formfactor"] = cfg.formfactor.describe();
  j["kappa"] = kappa;
  j["probability_per_steradian"] = kappa * r.value;
  out.write_json("probability.json", j);
  if (!r.converged) {
    err << "error: frequency integral did not converge (estimate " << format_number(r.value)
        << ", error " << format_number(r.error_estimate) << ")\n";
    return ExitCode::numerical;
  }
  return ExitCode::ok;
}

ExitCode run_divergence(const ScenarioConfig &cfg, OutputSet &out, json &, std::ostream &err) {
  DivergenceOptions opt;
  opt.lambdas = geometric_lambdas(cfg.scan.lambda_min, cfg.scan.lambda_max, cfg.scan.points);
  if (cfg.scan.asymptotic_start)
    opt.asymptotic_start = *cfg.scan.asymptotic_start;
  opt.quadrature.rel_tol = cfg.tolerance;
  const auto report = divergence_comparison(cfg.scenario, cfg.direction, opt);

  json models = json::object();
  bool converged = true;
  for (const auto &e : report.entries) {
    Rows rows;
    for (const auto &p : e.scan.points)
      rows.push_back({format_number(p.lambda), format_number(p.cumulative), format_number(p.error)});
    out.write_csv("scan_" + e.name + ".csv", {"lambda", "cumulative_integral", "error_estimate"}, rows);
    converged = converged && e.scan.converged;
    models[e.name] = {{"coupling", e.model.describe()},
                      {"class", to_string(e.tail.kind)},
                      {"label", e.tail.label()},
                      {"exponent", e.tail.exponent},
                      {"fit_residual", e.tail.fit_residual},
                      {"log_r_squared", e.tail.log_r_squared},
                      {"correction", e.tail.correction},
                      {"points_used", e.tail.points_used},
                      {"reason", e.tail.reason},
                      {"scan_converged", e.scan.converged},
                      {"evaluations", e.scan.evaluations}};
  }
  json j;
  j["asymptotic_start"] = report.asymptotic_start;
  j["models"] = models;
  j["verdict"] = report.verdict ? json(*report.verdict) : json(nullptr);
  j["roentgen_more_divergent"] =
      report.roentgen_more_divergent ? json(*report.roentgen_more_divergent) : json(nullptr);
  j["recoil_removal_cures"] =
      report.recoil_removal_cures ? json(*report.recoil_removal_cures) : json(nullptr);
  out.write_json("divergence.json", j);
  if (!report.verdict)
    err << "note: verdict withheld (ambiguous classification)\n";
  if (!converged) {
    err << "error: at least one cutoff scan did not converge\n";
    return ExitCode::numerical;
  }
  return ExitCode::ok;
}

ExitCode run_rates(const ScenarioConfig &cfg, OutputSet &out, json &extra, std::ostream &) {
  std::vector<double> thetas = cfg.rates.thetas;
  if (thetas.empty())
    thetas.push_back(cfg.perpendicular ? std::numbers::pi / 2 : cfg.theta);
  Rows rows;
  for (RateVariant v : {RateVariant::F, RateVariant::F_prime})
    for (double theta : thetas) {
      const auto n = direction_about_dipole(cfg.scenario.dipole, theta, cfg.phi);
      for (double delta : cfg.rates.deltas) {
        const auto r = golden_rule_rate(v, delta * n.vec(), n, cfg.scenario.dipole,
                                        cfg.scenario.params, cfg.scenario.coupling);
        rows.push_back({to_string(v), format_number(cfg.scenario.params.epsilon), format_number(delta),
                        format_number(theta), format_number(r.value), format_number(r.x_star)});
      }
    }
  out.write_csv("rates.csv", {"variant", "epsilon", "delta", "theta", "rate", "x_star"}, rows);

  if (cfg.rates.limit_ordering) {
    LimitOrderingOptions opt = cfg.rates.ordering;
    opt.rel_tol = cfg.tolerance;
    const auto t = limit_ordering_demo(opt, cfg.direction, cfg.scenario.dipole);
    Rows summary, scan;
    for (const auto &row : t.rows) {
      summary.push_back({format_number(row.epsilon), format_number(row.x_star), format_number(row.rate_f),
                         format_number(row.rate_f_prime), format_number(row.relative_difference)});
      for (std::size_t k = 0; k < row.cutoffs.size(); ++k)
        scan.push_back({format_number(row.epsilon), format_number(row.cutoffs[k]),
                        format_number(row.mode_sum_first[k]), format_number(row.mode_sum_first_error[k]),
                        k == 0 ? "nan" : format_number(row.growth_exponents[k - 1])});
    }
    out.write_csv("limit_ordering.csv",
                  {"epsilon", "x_star", "rate_F", "rate_F_prime", "relative_difference"}, summary);
    out.write_csv("limit_ordering_scan.csv",
                  {"epsilon", "cutoff", "mode_sum_first", "error_estimate", "growth_exponent"}, scan);
    extra["rate_at_zero_epsilon"] = t.rate_at_zero_epsilon;
    extra["recoil_scaled_cutoffs"] = opt.recoil_scaled_cutoffs;
  }
  return ExitCode::ok;
}

ExitCode run_pattern(const ScenarioConfig &cfg, OutputSet &out, json &, std::ostream &) {
  PatternMode mode;
  mode.kind = cfg.pattern.mode;
  mode.variant = cfg.pattern.variant;
  mode.formfactor = cfg.formfactor;
  mode.upper_limit = cfg.pattern.upper;
  mode.quadrature.rel_tol = cfg.tolerance;
  const auto thetas = linspace(0.0, std::numbers::pi, cfg.pattern.theta_points);
  const auto rows = angular_pattern(cfg.scenario, thetas, cfg.pattern.phi, mode, cfg.threads);
  const double sphere = pattern_sphere_integral(cfg.scenario, mode, cfg.pattern.sphere_theta_points,
                                                cfg.pattern.sphere_phi_points, cfg.threads);
  Rows csv;
  for (const auto &r : rows)
    csv.push_back({format_number(r.theta), format_number(r.phi), format_number(r.value), format_number(r.error)});
  out.write_csv("pattern.csv", {"theta", "phi", "value", "error"}, csv);
  out.write_json("pattern.json",
                 {{"mode", mode.kind == PatternMode::Kind::golden_rule ? "golden_rule" : "formfactor"},
                  {"variant", to_string(mode.variant)},
                  {"formfactor", cfg.formfactor.describe()},
                  {"sphere_integral", sphere},
                  {"sphere_theta_points", cfg.pattern.sphere_theta_points},
                  {"sphere_phi_points", cfg.pattern.sphere_phi_points}});
  return ExitCode::ok;
}

ExitCode run_oracle(const ScenarioConfig &cfg, OutputSet &out, json &, std::ostream &err) {
  const auto &o = cfg.oracle;
  auto sys = flat_band_system(o.modes, o.gamma, o.half_width * o.gamma, o.duration / o.gamma, o.time_step);
  sys.record_every = o.record_every;
  const auto res = discrete_mode_evolution(sys);
  const auto cmp = compare_with_pole_approximation(sys, res);

  Rows pop;
  for (std::size_t i = 0; i < res.times.size(); ++i)
    pop.push_back({format_number(res.times[i]), format_number(res.atom_population[i])});
  out.write_csv("oracle_population.csv", {"tau", "atom_population"}, pop);

  const auto final_pop = res.final_mode_populations();
  const auto pole = pole_mode_populations(sys, cmp.golden_rule_rate);
  Rows modes;
  for (std::size_t j = 0; j < sys.x.size(); ++j)
    modes.push_back({format_number(sys.x[j]), format_number(final_pop[j]), format_number(pole[j])});
  out.write_csv("oracle_modes.csv", {"x", "population", "pole_population"}, modes);

  out.write_json("oracle.json", {{"modes", o.modes},
                                 {"gamma", o.gamma},
                                 {"time_step", o.time_step},
                                 {"duration", sys.duration},
                                 {"fitted_rate", cmp.fitted_rate},
                                 {"golden_rule_rate", cmp.golden_rule_rate},
                                 {"rate_relative_error", cmp.rate_relative_error},
                                 {"distribution_l2_relative", cmp.distribution_l2_relative},
                                 {"max_norm_drift", cmp.max_norm_drift},
                                 {"flagged", cmp.flagged},
                                 {"message", res.message}});
  if (cmp.flagged) {
    err << "error: " << res.message << "\n";
    return ExitCode::numerical;
  }
  return ExitCode::ok;
}

} // namespace

const std::vector<std::string> &subcommands() {
  static const std::vector<std::string> names{"spectrum", "probability", "divergence",
                                              "rates",    "pattern",     "oracle"};
  return names;
}

ExitCode run(const std::string &subcommand, const ScenarioConfig &cfg, std::ostream &err) {
  try {
    for (const auto &w : cfg.warnings)
      err << "warning: " << w << "\n";
    OutputSet out(cfg.output);
    json extra = json::object();
    ExitCode code = ExitCode::ok;
    if (subcommand == "spectrum")
      code = run_spectrum(cfg, out, extra, err);
    else if (subcommand == "probability")
      code = run_probability(cfg, out, extra, err);
    else if (subcommand == "divergence")
      code = run_divergence(cfg, out, extra, err);
    else if (subcommand == "rates")
      code = run_rates(cfg, out, extra, err);
    else if (subcommand == "pattern")
      code = run_pattern(cfg, out, extra, err);
    else if (subcommand == "oracle")
      code = run_oracle(cfg, out, extra, err);
    else
      throw ConfigError("unknown subcommand '" + subcommand + "'");

    if (cfg.structural_samples > 0) {
      extra["structural_check"] = structural_check(cfg.structural_samples, cfg.seed);
      if (extra["structural_check"]["max_relative_error"].get<double>() > 1e-12) {
        err << "error: structural check exceeded 1e-12 relative\n";
        code = ExitCode::numerical;
      }
    }
    out.write_manifest(cfg, subcommand, extra);
    return code;
  } catch (const PhysicsRejection &e) {
    err << e.what() << "\n";
    return ExitCode::rejected;
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::config;
  } catch (const NumericalError &e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::numerical;
  }
}

ExitCode run_file(const std::string &subcommand, const std::filesystem::path &config_path,
                  const Overrides &overrides, std::ostream &err) {
  ScenarioConfig cfg;
  try {
    cfg = load_config(config_path);
    apply_overrides(cfg, overrides);
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << "\n";
    return ExitCode::config;
  }
  return run(subcommand, cfg, err);
}

} // namespace roentgen::cli
