#include "roentgen/rates.hpp"

#include "roentgen/errors.hpp"
#include "roentgen/spectra.hpp"

#include <cmath>

namespace roentgen {

ResonanceRoot resonance_frequency(double delta, double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon) || !std::isfinite(delta))
    throw ConfigError("resonance_frequency: epsilon must be finite and >= 0");
  const double a = 1.0 - delta;
  ResonanceRoot root;
  if (epsilon == 0.0) {
    if (!(a > 0.0))
      throw ConfigError("no positive resonance root: delta >= 1 at infinite mass");
    root.x_star = 1.0 / a;
  } else {
    root.x_star = 2.0 / (a + std::sqrt(a * a + 4.0 * epsilon));
  }
  root.residual = root.x_star * (a + epsilon * root.x_star) - 1.0;
  return root;
}

double resonance_jacobian(double delta, double epsilon, double x_star) {
  return 1.0 - delta + 2.0 * epsilon * x_star;
}

std::string to_string(RateVariant variant) {
  return variant == RateVariant::F ? "F" : "F_prime";
}

RateResult golden_rule_rate(RateVariant variant, const Vec3 &beta, const UnitVector3 &n,
                            const UnitVector3 &e_d, const DimensionlessParams &params,
                            const CouplingModel &model) {
  validate(params);
  RateResult out;
  out.variant = variant;
  out.delta = n.dot(beta);
  out.model = model;
  out.model.apply_momentum_shift = variant == RateVariant::F_prime && !model.is_standard();

  const ResonanceRoot root = resonance_frequency(out.delta, params.epsilon);
  out.x_star = root.x_star;
  out.jacobian = resonance_jacobian(out.delta, params.epsilon, root.x_star);
  if (!(out.jacobian > 0.0))
    throw ConfigError("golden-rule rate: vanishing Jacobian of the energy delta function");

  const double x = root.x_star;
  const double sum = polarization_sum(out.model, beta, x, n, e_d, params.epsilon);
  out.value = x * x * x * sum / out.jacobian;
  return out;
}

LimitOrderingTable limit_ordering_demo(const LimitOrderingOptions &options,
                                       const UnitVector3 &n, const UnitVector3 &e_d) {
  if (options.epsilons.empty())
    throw ConfigError("limit ordering demo needs at least one epsilon");
  for (std::size_t i = 0; i < options.epsilons.size(); ++i) {
    if (!(options.epsilons[i] > 0.0))
      throw ConfigError("limit ordering demo: epsilons must be positive");
    if (i > 0 && !(options.epsilons[i] < options.epsilons[i - 1]))
      throw ConfigError("limit ordering demo: epsilons must be decreasing");
  }

  LimitOrderingTable table;
  const CouplingModel model = CouplingModel::roentgen(true, true);
  table.rate_at_zero_epsilon =
      golden_rule_rate(RateVariant::F_prime, options.beta, n, e_d, {0.0, options.gamma_tilde},
                       model)
          .value;

  for (double eps : options.epsilons) {
    const DimensionlessParams params{eps, options.gamma_tilde};
    LimitOrderingRow row;
    row.epsilon = eps;
    const RateResult f = golden_rule_rate(RateVariant::F, options.beta, n, e_d, params, model);
    const RateResult fp =
        golden_rule_rate(RateVariant::F_prime, options.beta, n, e_d, params, model);
    row.x_star = f.x_star;
    row.rate_f = f.value;
    row.rate_f_prime = fp.value;
    row.relative_difference = std::abs(fp.value - f.value) / f.value;

    Scenario scenario;
    scenario.params = params;
    scenario.coupling = model;
    scenario.distribution = MomentumDistribution::point_mass(options.beta);
    scenario.dipole = e_d;
    QuadratureOptions quad;
    quad.rel_tol = options.rel_tol;
    for (double c : options.cutoffs) {
      const double cutoff = options.recoil_scaled_cutoffs ? c / eps : c;
      const QuadratureResult r =
          directional_probability(scenario, n, Formfactor::none(), cutoff, quad);
      if (!r.converged)
        throw NumericalError("mode-sum-first integral did not converge");
      row.cutoffs.push_back(cutoff);
      row.mode_sum_first.push_back(r.value);
      row.mode_sum_first_error.push_back(r.error_estimate);
    }
    for (std::size_t k = 1; k < row.cutoffs.size(); ++k)
      row.growth_exponents.push_back(std::log(row.mode_sum_first[k] / row.mode_sum_first[k - 1]) /
                                     std::log(row.cutoffs[k] / row.cutoffs[k - 1]));
    table.rows.push_back(std::move(row));
  }
  return table;
}

} // namespace roentgen
