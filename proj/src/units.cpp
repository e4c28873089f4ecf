#include "roentgen/units.hpp"

#include "roentgen/errors.hpp"

#include <cmath>
#include <numbers>

namespace roentgen {

namespace {
void require_positive(double value, const char *field) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw ConfigError(std::string("physical input field '") + field +
                      "' must be a finite positive number");
}
} // namespace

DimensionlessParams to_dimensionless(const PhysicalInput &input) {
  require_positive(input.omega0, "omega0");
  require_positive(input.gamma0, "gamma0");
  if (!input.infinite_mass)
    require_positive(input.mass, "mass");
  if (input.dipole_moment)
    require_positive(*input.dipole_moment, "dipole_moment");

  DimensionlessParams out;
  out.epsilon = input.infinite_mass
                    ? 0.0
                    : constants::hbar * input.omega0 /
                          (2.0 * input.mass * constants::c * constants::c);
  out.gamma_tilde = input.gamma0 / input.omega0;
  return out;
}

PhysicalInput to_physical(const DimensionlessParams &params, double omega0,
                          std::optional<double> dipole_moment) {
  validate(params);
  require_positive(omega0, "omega0");
  PhysicalInput out;
  out.omega0 = omega0;
  out.gamma0 = params.gamma_tilde * omega0;
  out.dipole_moment = dipole_moment;
  if (params.epsilon == 0.0) {
    out.infinite_mass = true;
  } else {
    out.mass = constants::hbar * omega0 /
               (2.0 * params.epsilon * constants::c * constants::c);
  }
  return out;
}

std::optional<std::string> narrow_line_warning(const PhysicalInput &input) {
  if (input.gamma0 >= input.omega0)
    return "gamma0 >= omega0: outside the narrow-line regime, the single "
           "pole approximation is not trustworthy";
  return std::nullopt;
}

void validate(const DimensionlessParams &params) {
  if (!(params.epsilon >= 0.0) || !std::isfinite(params.epsilon))
    throw ConfigError("epsilon must be finite and >= 0");
  if (!(params.gamma_tilde > 0.0) || !std::isfinite(params.gamma_tilde))
    throw ConfigError("gamma_tilde must be finite and > 0");
}

double normalization_kappa(const DimensionlessParams &params) {
  return 3.0 * params.gamma_tilde / (16.0 * std::numbers::pi * std::numbers::pi);
}

Normalization normalization(const DimensionlessParams &params,
                            const std::optional<PhysicalInput> &input) {
  using namespace constants;
  Normalization out;
  out.kappa = normalization_kappa(params);
  if (input && input->dipole_moment) {
    const double d = *input->dipole_moment;
    const double w0 = input->omega0;
    const double pi = std::numbers::pi;
    out.physical_prefactor =
        d * d * w0 * w0 / (16.0 * pi * pi * pi * epsilon0 * hbar * c * c * c);
    out.wigner_weisskopf_gamma0 =
        d * d * w0 * w0 * w0 / (3.0 * pi * epsilon0 * hbar * c * c * c);
  }
  return out;
}

} // namespace roentgen
