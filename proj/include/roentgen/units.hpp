#pragma once

#include <optional>
#include <string>

namespace roentgen {

// CODATA 2018 exact / recommended values.
namespace constants {
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double c = 299792458.0;                // m / s
inline constexpr double epsilon0 = 8.8541878128e-12;    // F / m
} // namespace constants

struct PhysicalInput {
  double mass = 0.0;   // kg, ignored when infinite_mass
  double omega0 = 0.0; // rad / s
  double gamma0 = 0.0; // rad / s
  std::optional<double> dipole_moment; // C m
  bool infinite_mass = false;
};

// epsilon = hbar omega0 / (2 M c^2) is the photon recoil energy in units of
// the transition energy; gamma_tilde = gamma0 / omega0.
struct DimensionlessParams {
  double epsilon = 0.0;
  double gamma_tilde = 0.0;
};

DimensionlessParams to_dimensionless(const PhysicalInput &input);

// Inverse of to_dimensionless, anchored at a transition frequency.
// epsilon == 0 maps back to infinite_mass.
PhysicalInput to_physical(const DimensionlessParams &params, double omega0,
                          std::optional<double> dipole_moment = {});

// Returns a warning when gamma0 >= omega0 (outside the narrow-line regime).
std::optional<std::string> narrow_line_warning(const PhysicalInput &input);

void validate(const DimensionlessParams &params);

//==============================================================================
// Spectral normalization.
//
// Dimensionless spectra are w(x) = x^2 <rho(x)>, with x = omega/omega0. The
// physical emission probability per steradian per unit x is
//
//     dP/(dOmega dx) = d^2 omega0^2 / (16 pi^3 eps0 hbar c^3) * w(x),
//
// the quantization volume cancelling between the per-photon field strength
// and the V/(2 pi c)^3 mode density. If gamma0 takes its ordinary
// Wigner-Weisskopf value d^2 omega0^3 / (3 pi eps0 hbar c^3), the prefactor
// reduces to kappa = 3 gamma_tilde / (16 pi^2), which is the scale in which
// the rest-atom, infinite-mass, standard-dipole line integrates to unit
// probability over the sphere.
struct Normalization {
  double kappa = 0.0;
  std::optional<double> physical_prefactor; // needs dipole_moment
  std::optional<double> wigner_weisskopf_gamma0;
};

double normalization_kappa(const DimensionlessParams &params);
Normalization normalization(const DimensionlessParams &params,
                            const std::optional<PhysicalInput> &input = {});

} // namespace roentgen
