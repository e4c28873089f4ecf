#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace roentgen {

using ScalarFunction = std::function<double(double)>;

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  std::size_t panels = 0;
  bool converged = false;
};

/// A narrow structure (a resonance) the integrator must not step over.
/// Panels are seeded with breakpoints at location and location +- width * {1, 10, 100}.
struct Feature {
  double location = 0.0;
  double width = 0.0;
};

struct QuadratureOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-10;
  std::size_t max_panels = 20000;
  std::vector<Feature> features;
};

/// Globally adaptive 21-point Gauss-Kronrod quadrature (bisection of the
/// panel with the largest error). Converged when the summed error estimate
/// is <= max(abs_tol, rel_tol |value|). On budget exhaustion returns the best
/// estimate with converged = false. Throws NumericalError if f is not finite
/// at a node. The panel schedule does not depend on timing, so results are
/// reproducible bit for bit.
QuadratureResult integrate_adaptive(const ScalarFunction &f, double a, double b,
                                    const QuadratureOptions &options);

/// tol is used as both the absolute and the relative tolerance.
QuadratureResult integrate_adaptive(const ScalarFunction &f, double a, double b, double tol);

/// Single 21-point Kronrod panel (value, |K21 - G10| based error).
QuadratureResult gauss_kronrod_21(const ScalarFunction &f, double a, double b);

//==============================================================================
// Cutoff scans and tail classification.

struct ScanPoint {
  double lambda = 0.0;
  double cumulative = 0.0; // integral over [lower, lambda]
  double error = 0.0;
};

struct CutoffScan {
  double lower = 0.0;
  std::vector<ScanPoint> points;
  std::size_t evaluations = 0;
  bool converged = true;
};

/// count points geometrically spaced from lo to hi inclusive.
std::vector<double> geometric_lambdas(double lo, double hi, std::size_t count);

/// Cumulative integrals over [lower, Lambda_k]. The first panel [lower,
/// Lambda_0] and each increment [Lambda_k, Lambda_k+1] is integrated once
/// and accumulated. Features falling inside a panel are passed on to it.
CutoffScan cutoff_scan(const ScalarFunction &f, double lower, const std::vector<double> &lambdas,
                       const QuadratureOptions &options);

enum class TailKind { convergent, logarithmic, power, ambiguous };

std::string to_string(TailKind kind);

struct TailOptions {
  /// Only scan points with lambda >= asymptotic_start enter the fit.
  double asymptotic_start = -std::numeric_limits<double>::infinity();
  std::size_t min_points = 5;
  /// RMS residual of the increment fit in ln space.
  double power_residual_max = 0.02;
  double log_r2_min = 0.999;
  /// Growth exponents with |p| below this are not reported as power laws.
  double flat_exponent = 0.1;
  /// Relative size of the extrapolated remainder that counts as converged.
  double convergence_rtol = 1e-6;
  /// Include a c / Lambda correction in the increment fit.
  bool subleading_correction = true;
};

struct TailClassification {
  TailKind kind = TailKind::ambiguous;
  /// Cumulative growth exponent p (I ~ Lambda^p) for power kind; for every
  /// kind where a fit was possible, the fitted increment slope.
  double exponent = std::numeric_limits<double>::quiet_NaN();
  double fit_residual = std::numeric_limits<double>::quiet_NaN();
  double log_r_squared = std::numeric_limits<double>::quiet_NaN();
  double correction = 0.0;
  double tail_estimate = std::numeric_limits<double>::quiet_NaN();
  std::size_t points_used = 0;
  std::string reason;

  std::string label() const;
};

/// Classifies the growth of a geometric cutoff scan from the successive
/// increments dI_k = I(Lambda_k+1) - I(Lambda_k):
///
///   ln dI_k = a + p ln Lambda_k + c / Lambda_k
///
/// p > flat_exponent is a power law I ~ Lambda^p; |p| <= flat_exponent is
/// logarithmic if I is linear in ln Lambda with R^2 >= log_r2_min; decaying
/// increments whose extrapolated remainder is negligible are convergent.
/// Anything else is ambiguous, never a guess. Throws ConfigError if the
/// window is not geometrically spaced.
TailClassification classify_tail(const CutoffScan &scan, const TailOptions &options = {});

} // namespace roentgen
