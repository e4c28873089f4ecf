#pragma once

#include "roentgen/coupling.hpp"
#include "roentgen/geometry.hpp"
#include "roentgen/units.hpp"

#include <string>
#include <vector>

namespace roentgen {

/// Positive root of epsilon x^2 + (1 - delta) x - 1 = 0, the frequency at
/// which a photon emitted along n satisfies energy conservation including
/// Doppler shift and recoil.
struct ResonanceRoot {
  double x_star = 1.0;
  double residual = 0.0; // x*(1 - delta + epsilon x*) - 1
};

/// Uses x* = 2 / ((1 - delta) + sqrt((1 - delta)^2 + 4 epsilon)), which has
/// no cancellation as epsilon -> 0. Throws ConfigError if epsilon < 0 or
/// there is no positive root (epsilon == 0 and delta >= 1).
ResonanceRoot resonance_frequency(double delta, double epsilon);

/// |d/dx [x (1 - delta + epsilon x)]| at x*: 1 - delta + 2 epsilon x*.
double resonance_jacobian(double delta, double epsilon, double x_star);

/// Golden-rule variants: coupling evaluated at the initial momentum p (F) or
/// at the shifted momentum p + hbar k that the amplitude equations produce (F').
enum class RateVariant { F, F_prime };

std::string to_string(RateVariant variant);

struct RateResult {
  RateVariant variant = RateVariant::F_prime;
  double value = 0.0;
  double x_star = 1.0;
  double jacobian = 1.0;
  double delta = 0.0;
  CouplingModel model;
};

/// Per-solid-angle emission rate with the energy delta function resolved:
///
///     dGamma/dOmega = x*^3 sum_lambda G_lambda(beta_eff, x*)^2 / (1 - delta + 2 eps x*)
///
/// The mode density x^2 and the per-photon field strength x make up the
/// cube. Units: the rest atom, infinite mass, n perpendicular to e_d gives 1
/// (the sphere integral of that reference pattern is 8 pi / 3). The model's
/// shift flag is overridden by the variant.
RateResult golden_rule_rate(RateVariant variant, const Vec3 &beta, const UnitVector3 &n,
                            const UnitVector3 &e_d, const DimensionlessParams &params,
                            const CouplingModel &model = CouplingModel::roentgen());

struct LimitOrderingOptions {
  std::vector<double> epsilons{1e-2, 1e-3, 1e-4};
  /// Mode-sum-first cutoffs. With recoil_scaled_cutoffs the entries are
  /// multipliers m and the cutoffs are m / epsilon.
  std::vector<double> cutoffs{1e2, 1e3, 1e4};
  bool recoil_scaled_cutoffs = true;
  double gamma_tilde = 1e-2;
  Vec3 beta = Vec3::Zero();
  double rel_tol = 1e-10;
};

struct LimitOrderingRow {
  double epsilon = 0.0;
  double x_star = 1.0;
  double rate_f = 0.0;
  double rate_f_prime = 0.0;
  double relative_difference = 0.0; // |F' - F| / F
  std::vector<double> cutoffs;
  std::vector<double> mode_sum_first;        // frequency integral up to each cutoff
  std::vector<double> mode_sum_first_error;
  std::vector<double> growth_exponents;      // between successive cutoffs
};

struct LimitOrderingTable {
  double rate_at_zero_epsilon = 0.0;
  std::vector<LimitOrderingRow> rows;
};

/// For each epsilon: (i) the golden-rule rates (delta function resolved
/// before any frequency sum; finite, continuous as epsilon -> 0), and (ii)
/// the emission probability with the frequency integral done first, without
/// formfactor, at fixed cutoffs (grows without bound for every epsilon > 0).
LimitOrderingTable limit_ordering_demo(const LimitOrderingOptions &options,
                                       const UnitVector3 &n, const UnitVector3 &e_d);

} // namespace roentgen
