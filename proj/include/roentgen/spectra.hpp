#pragma once

#include "roentgen/amplitudes.hpp"
#include "roentgen/coupling.hpp"
#include "roentgen/quadrature.hpp"
#include "roentgen/rates.hpp"
#include "roentgen/units.hpp"
#include "roentgen/wavepacket.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace roentgen {

/// How the average over a gaussian wavepacket is taken.
///  automatic   - condition on delta = n.beta: adaptive quadrature over delta
///                seeded at the resonance, low-order Gauss-Hermite over the
///                remaining (rank <= 2) conditional gaussian, which is exact
///                for the quadratic polarization sum.
///  full_tensor - tensor Gauss-Hermite over all three axes.
enum class DopplerMethod { automatic, full_tensor };

struct Scenario {
  DimensionlessParams params{0.0, 1e-2};
  CouplingModel coupling = CouplingModel::roentgen();
  MomentumDistribution distribution;
  UnitVector3 dipole; // e_d, default z
  DopplerMethod method = DopplerMethod::automatic;
  ExpectationOptions expectation;
  /// Tolerances for the adaptive Doppler average.
  QuadratureOptions doppler{0.0, 1e-12, 4000, {}};
};

/// Multiplies the squared coupling (so the spectral density once).
struct Formfactor {
  enum class Kind { none, sharp, gaussian, exponential };
  Kind kind = Kind::none;
  double cutoff = 0.0;

  static Formfactor none() { return {}; }
  static Formfactor sharp(double cutoff) { return {Kind::sharp, cutoff}; }
  static Formfactor gaussian(double cutoff) { return {Kind::gaussian, cutoff}; }
  static Formfactor exponential(double cutoff) { return {Kind::exponential, cutoff}; }

  double operator()(double x) const;
  bool regularizes() const { return kind != Kind::none; }
  std::string describe() const;
  void validate() const;
};

/// w(x) = x^2 <rho(x, n, beta)>: photon number per unit x in direction n
/// (mode density included), in kappa units (see units.hpp).
Expectation spectral_density(const Scenario &scenario, const UnitVector3 &n, double x);

/// Resonance position for the packet's mean Doppler projection and the line
/// widths in x: natural gamma/J and Doppler sigma_delta x*/J.
struct LineFeatures {
  double x_star = 1.0;
  double natural_width = 0.0;
  double doppler_width = 0.0;
  double width() const { return std::max(natural_width, doppler_width); }
  std::vector<Feature> features() const;
};

LineFeatures line_features(const Scenario &scenario, const UnitVector3 &n);

struct SpectralResult {
  UnitVector3 direction;
  std::vector<double> x;
  std::vector<double> w;
  std::vector<double> error;
  double kappa = 0.0;
  LineFeatures line;
  std::vector<std::string> warnings;
};

/// Evaluates w on a strictly increasing grid. A grid not covering
/// x* +- 10 max(natural, Doppler width) produces a warning.
SpectralResult directional_spectrum(const Scenario &scenario, const UnitVector3 &n,
                                    const std::vector<double> &x_grid, std::size_t threads = 1);

/// Uniform grid centred on the resonance, +- half_widths line widths.
std::vector<double> resonance_grid(const Scenario &scenario, const UnitVector3 &n,
                                   std::size_t points, double half_widths = 20.0);

/// int_lower^upper w(x) F(x) dx with resonance-seeded adaptive quadrature.
/// Requires upper_limit > x*. Non-convergence is reported in the result.
QuadratureResult directional_probability(const Scenario &scenario, const UnitVector3 &n,
                                         const Formfactor &formfactor, double upper_limit,
                                         const QuadratureOptions &options = {},
                                         double lower_limit = 0.0);

//==============================================================================

struct DivergenceOptions {
  std::vector<double> lambdas = geometric_lambdas(1e2, 1e4, 16);
  /// NaN selects max(10 / epsilon, 10 x*): the regime where epsilon x^2
  /// dominates the resonance denominator.
  double asymptotic_start = std::numeric_limits<double>::quiet_NaN();
  TailOptions tail;
  QuadratureOptions quadrature{0.0, 1e-10, 20000, {}};
};

struct DivergenceEntry {
  std::string name;
  CouplingModel model;
  CutoffScan scan;
  TailClassification tail;
};

struct DivergenceReport {
  std::vector<DivergenceEntry> entries; // roentgen, standard, roentgen_no_recoil
  double asymptotic_start = 0.0;
  std::optional<std::string> verdict;
  std::optional<bool> roentgen_more_divergent;
  std::optional<bool> recoil_removal_cures;

  const DivergenceEntry &entry(const std::string &name) const;
};

/// Ordering used for "more divergent": power beats logarithmic beats
/// convergent; among powers, exponents must differ by more than 0.1.
int compare_growth(const TailClassification &a, const TailClassification &b);

/// Cutoff scans and tail classes for (a) Roentgen with recoil term and
/// momentum shift, (b) the standard dipole coupling with identical
/// kinematics, (c) Roentgen without the recoil term but with the shift.
/// Requires epsilon > 0. The verdict is withheld if any class is ambiguous.
DivergenceReport divergence_comparison(const Scenario &base, const UnitVector3 &n,
                                       const DivergenceOptions &options = {});

//==============================================================================

struct PatternMode {
  enum class Kind { golden_rule, formfactor };
  Kind kind = Kind::golden_rule;
  RateVariant variant = RateVariant::F_prime;
  Formfactor formfactor;
  double upper_limit = 0.0; // formfactor mode; <= 0 selects 20 cutoffs
  QuadratureOptions quadrature{0.0, 1e-10, 20000, {}};
};

struct PatternRow {
  double theta = 0.0;
  double phi = 0.0;
  double value = 0.0; // probability (or rate) per steradian, normalized units
  double error = 0.0;
};

/// Emission per steradian at angle theta from e_d (azimuth phi). Golden-rule
/// mode: the packet-averaged rate divided by 8 pi / 3. Formfactor mode: kappa
/// times the regularized directional probability. For the rest atom at
/// infinite mass both give (3/8pi) sin^2 theta, the formfactor mode scaled by
/// F(1) and up to an off-resonant background of relative order
/// gamma_tilde cutoff^2. An unregularized request throws
/// PhysicsRejection.
std::vector<PatternRow> angular_pattern(const Scenario &scenario,
                                        const std::vector<double> &thetas, double phi,
                                        const PatternMode &mode, std::size_t threads = 1);

/// Full-sphere integral of the pattern: Gauss-Legendre in cos(theta) times
/// the trapezoid rule in phi.
double pattern_sphere_integral(const Scenario &scenario, const PatternMode &mode,
                               std::size_t theta_points = 32, std::size_t phi_points = 16,
                               std::size_t threads = 1);

/// The message used when an unregularized pattern is requested.
std::string unregularized_rejection_message(const Scenario &scenario);

} // namespace roentgen
