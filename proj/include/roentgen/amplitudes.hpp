#pragma once

#include "roentgen/coupling.hpp"
#include "roentgen/geometry.hpp"
#include "roentgen/units.hpp"

#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace roentgen {

/// Dimensionless distance from the single pole, (z0 - z_k) / (i omega0),
/// with the Lamb shift absorbed into omega0:
///
///     D(x, delta, epsilon) = 1 - x (1 - delta) - epsilon x^2
///
/// where delta = n.beta is the Doppler projection of the atomic velocity.
double detuning(double x, double delta, double epsilon);

struct SpectralKernel {
  double value = 0.0;
  CouplingModel model;
};

/// Long-time photon spectral density for a single atomic momentum:
///
///     rho = x * sum_lambda G_lambda^2 / (D^2 + gamma_tilde^2 / 4)
///
/// The recoil in D always uses the unshifted velocity; the coupling uses the
/// model's shift convention. Throws ConfigError when the denominator vanishes
/// (gamma_tilde == 0 exactly on resonance).
SpectralKernel spectral_kernel(const CouplingModel &model, double x, const UnitVector3 &n,
                               const Vec3 &beta, const DimensionlessParams &params,
                               const UnitVector3 &e_d);

/// Same kernel with the polarization sum taken explicitly over `basis`.
SpectralKernel spectral_kernel(const CouplingModel &model, double x,
                               const PolarizationBasis &basis, const Vec3 &beta,
                               const DimensionlessParams &params, const UnitVector3 &e_d);

/// The kernel for emission perpendicular to the dipole with the full
/// Roentgen coupling (recoil term and momentum shift):
///
///     x (1 - delta - eps x)^2 / ((1 - x (1 - delta) - eps x^2)^2 + gamma^2/4)
double perpendicular_closed_form(double x, double delta, const DimensionlessParams &params);

/// |exp(-z0 t) - exp(-z_k t)|^2 relative to its t -> infinity value 1, for
/// dimensionless time tau = omega0 t.
double transient_factor(double x, double delta, const DimensionlessParams &params,
                        double tau);

/// Finite-time kernel: spectral_kernel * transient_factor.
double transient_kernel(const CouplingModel &model, double x, const UnitVector3 &n,
                        const Vec3 &beta, const DimensionlessParams &params,
                        const UnitVector3 &e_d, double tau);

//==============================================================================
// Discrete-mode oracle.
//
// One atomic momentum coupled to a finite set of photon modes. In the atom's
// rotating frame and dimensionless time tau = omega0 t:
//
//     da/dtau   = - sum_j c_j b_j
//     db_j/dtau = - i (x_j - x_a) b_j + c_j a,      c_j = g_j sqrt(w_j)
//
// This is the single-excitation Schroedinger equation without the pole
// approximation; its golden-rule rate is 2 pi g(x_a)^2.

struct DiscreteModeSystem {
  std::vector<double> x;        // mode frequencies, strictly increasing
  std::vector<double> weight;   // quadrature weight (mode spacing) of each mode
  std::vector<double> coupling; // coupling density amplitude g_j
  double atom_frequency = 1.0;
  double time_step = 0.1;
  double duration = 1.0;
  std::size_t record_every = 1;
  bool record_modes = false;

  void validate() const;
  double effective_coupling(std::size_t j) const;
  /// 2 pi g(x_a)^2 with g linearly interpolated on the grid.
  double golden_rule_rate() const;
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<double> atom_population;
  std::vector<std::vector<double>> mode_populations; // only if record_modes
  std::complex<double> final_atom_amplitude;
  std::vector<std::complex<double>> final_mode_amplitudes;
  double max_norm_drift = 0.0;
  bool flagged = false;
  std::string message;

  std::vector<double> final_mode_populations() const;
};

inline constexpr double kNormDriftLimit = 1e-6;

/// Fixed-step classical RK4. Flags the result when |norm - 1| exceeds
/// kNormDriftLimit at any step.
EvolutionResult discrete_mode_evolution(const DiscreteModeSystem &sys);

/// `modes` equally spaced modes centred on the atom frequency, flat coupling
/// chosen so that the golden-rule rate equals gamma_tilde.
DiscreteModeSystem flat_band_system(std::size_t modes, double gamma_tilde,
                                    double half_width, double duration, double time_step,
                                    double atom_frequency = 1.0);

/// Pole-approximation mode populations at time tau for rate gamma:
///     c_j^2 |exp(-gamma tau / 2) - exp(-i D_j tau)|^2 / (D_j^2 + gamma^2 / 4).
/// tau = infinity gives the Lorentzian limit.
std::vector<double> pole_mode_populations(const DiscreteModeSystem &sys, double gamma,
                                          double tau = std::numeric_limits<double>::infinity());

/// Least-squares slope of -ln P(tau) over samples with P in [lo, hi].
double fit_decay_rate(const std::vector<double> &times, const std::vector<double> &population,
                      double lo = 1e-4, double hi = 0.5);

struct OracleComparison {
  double fitted_rate = 0.0;
  double golden_rule_rate = 0.0;
  double rate_relative_error = 0.0;
  double distribution_l2_relative = 0.0;
  double max_norm_drift = 0.0;
  bool flagged = false;
};

OracleComparison compare_with_pole_approximation(const DiscreteModeSystem &sys,
                                                 const EvolutionResult &result);

} // namespace roentgen
