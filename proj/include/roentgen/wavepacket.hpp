#pragma once

#include "roentgen/geometry.hpp"
#include "roentgen/quadrature.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace roentgen {

// Centre-of-mass momentum distributions |alpha_0(p)|^2, in units of
// beta = p / (M c). Only the modulus squared is represented; phases of the
// wavepacket never enter the emission spectrum.

struct PointMass {
  Vec3 beta = Vec3::Zero();
};

struct GaussianPacket {
  Vec3 mean = Vec3::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
};

/// A 1D distribution of the Doppler projection delta = n.beta along a fixed
/// direction. Only meaningful where the kernel depends on beta through n.beta.
struct TabulatedProjection {
  UnitVector3 direction;
  std::vector<double> delta;
  std::vector<double> weight;
};

/// Weighted point masses: the incoherent (mixed-state) counterpart of a
/// wavepacket with the same momentum probabilities.
struct Mixture {
  std::vector<Vec3> beta;
  std::vector<double> weight;
};

class MomentumDistribution {
public:
  using Variant = std::variant<PointMass, GaussianPacket, TabulatedProjection, Mixture>;

  static MomentumDistribution point_mass(const Vec3 &beta);
  /// Throws ConfigError unless the covariance is symmetric positive semidefinite.
  static MomentumDistribution gaussian(const Vec3 &mean, const Eigen::Matrix3d &covariance);
  static MomentumDistribution isotropic_gaussian(const Vec3 &mean, double sigma);
  /// Weights must be non-negative; they are normalized to sum 1.
  static MomentumDistribution tabulated(const UnitVector3 &direction, std::vector<double> delta,
                                        std::vector<double> weight);
  static MomentumDistribution mixture(std::vector<Vec3> beta, std::vector<double> weight);

  MomentumDistribution() : v_(PointMass{}) {}

  const Variant &variant() const { return v_; }
  std::string kind_name() const;
  double total_weight() const;
  Vec3 mean() const;

private:
  explicit MomentumDistribution(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Reads a two-column CSV (delta, weight); blank lines, '#' comments and a
/// non-numeric header line are skipped.
MomentumDistribution load_tabulated_csv(const std::filesystem::path &path,
                                        const UnitVector3 &direction);

struct ExpectationOptions {
  std::size_t order = 40; // Gauss-Hermite nodes per axis
  bool estimate_error = true;
};

struct Expectation {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

using VelocityFunction = std::function<double(const Vec3 &)>;

/// E[f(beta)] over the distribution.
///   point mass  -> f(beta0) exactly
///   gaussian    -> tensor Gauss-Hermite over the principal axes with nonzero
///                  variance; error = |I(2 order) - I(order)|, value at `order`
///   tabulated   -> weighted sum with beta = delta n
///   mixture     -> weighted sum
/// Throws NumericalError naming the node if f is not finite there.
Expectation expectation(const MomentumDistribution &dist, const VelocityFunction &f,
                        const ExpectationOptions &options = {});

/// The tensor Gauss-Hermite discretization of a gaussian packet as a mixture.
Mixture gaussian_nodes(const GaussianPacket &packet, std::size_t order);

/// sum_i w_i f(beta_i), in node order. Every discrete expectation goes
/// through here, so a gaussian and its own node mixture agree bit for bit.
double mixture_sum(const Mixture &mixture, const VelocityFunction &f);

//==============================================================================
// 1D projection onto delta = n.beta.

struct ProjectedDistribution {
  enum class Kind { point, gaussian, discrete };
  Kind kind = Kind::point;
  double mean = 0.0;  // point and gaussian
  double sigma = 0.0; // gaussian
  std::vector<double> nodes;   // discrete
  std::vector<double> weights; // discrete

  double total_weight() const;
  /// Nodes and weights: a single node, Gauss-Hermite of `order`, or the table.
  std::pair<std::vector<double>, std::vector<double>> quadrature(std::size_t order = 40) const;
};

/// Exact marginal of delta = n.beta. Gaussian -> N(n.mean, n^T Sigma n);
/// tabulated must have been tabulated along n (within 1e-12).
ProjectedDistribution project(const MomentumDistribution &dist, const UnitVector3 &n);

/// E[g(delta)] with the same rules as expectation(). For a gaussian with
/// `features` given, the integral is done adaptively over the standard score
/// instead (resolving kernels narrower than the Doppler width).
Expectation expectation_1d(const ProjectedDistribution &dist, const ScalarFunction &g,
                           const ExpectationOptions &options = {});
Expectation expectation_1d_adaptive(const ProjectedDistribution &dist, const ScalarFunction &g,
                                    const std::vector<Feature> &delta_features,
                                    const QuadratureOptions &options);

/// beta | (n.beta = delta) for a gaussian packet: mean0 + gain (delta - delta_mean),
/// covariance `covariance` (rank <= 2).
struct ConditionalGaussian {
  double delta_mean = 0.0;
  double delta_sigma = 0.0;
  Vec3 mean0 = Vec3::Zero();
  Vec3 gain = Vec3::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();

  GaussianPacket at(double delta) const;
};

ConditionalGaussian condition_on_projection(const GaussianPacket &packet, const UnitVector3 &n);

} // namespace roentgen
