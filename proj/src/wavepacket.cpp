#include "roentgen/wavepacket.hpp"

#include "roentgen/errors.hpp"
#include "roentgen/gauss_rules.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

namespace roentgen {

namespace {

constexpr double kWeightTol = 1e-10;

std::vector<double> normalized_weights(std::vector<double> weight, const char *what) {
  double sum = 0.0;
  for (double w : weight) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw ConfigError(std::string(what) + ": weights must be finite and non-negative");
    sum += w;
  }
  if (!(sum > 0.0))
    throw ConfigError(std::string(what) + ": weights must not all be zero");
  // Weights that already sum to 1 are kept verbatim, so re-wrapping a
  // discretization does not perturb it.
  if (std::abs(sum - 1.0) > 1e-12)
    for (double &w : weight)
      w /= sum;
  return weight;
}

std::string describe(const Vec3 &v) {
  std::ostringstream s;
  s.precision(17);
  s << "(" << v[0] << ", " << v[1] << ", " << v[2] << ")";
  return s.str();
}

double checked(double value, const Vec3 &beta) {
  if (!std::isfinite(value))
    throw NumericalError("expectation integrand is not finite at beta = " + describe(beta));
  return value;
}

} // namespace

MomentumDistribution MomentumDistribution::point_mass(const Vec3 &beta) {
  if (!beta.allFinite())
    throw ConfigError("point mass velocity must be finite");
  return MomentumDistribution(PointMass{beta});
}

MomentumDistribution MomentumDistribution::gaussian(const Vec3 &mean,
                                                    const Eigen::Matrix3d &covariance) {
  if (!mean.allFinite() || !covariance.allFinite())
    throw ConfigError("gaussian packet: mean and covariance must be finite");
  const double scale = std::max(1e-300, covariance.cwiseAbs().maxCoeff());
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ConfigError("gaussian packet: covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(covariance, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-12 * scale)
    throw ConfigError("gaussian packet: covariance must be positive semidefinite");
  return MomentumDistribution(GaussianPacket{mean, 0.5 * (covariance + covariance.transpose())});
}

MomentumDistribution MomentumDistribution::isotropic_gaussian(const Vec3 &mean, double sigma) {
  if (!(sigma >= 0.0))
    throw ConfigError("gaussian packet: sigma must be >= 0");
  return gaussian(mean, sigma * sigma * Eigen::Matrix3d::Identity());
}

MomentumDistribution MomentumDistribution::tabulated(const UnitVector3 &direction,
                                                     std::vector<double> delta,
                                                     std::vector<double> weight) {
  if (delta.empty() || delta.size() != weight.size())
    throw ConfigError("tabulated distribution: delta and weight must be non-empty and equal length");
  for (double d : delta)
    if (!std::isfinite(d))
      throw ConfigError("tabulated distribution: delta values must be finite");
  return MomentumDistribution(TabulatedProjection{
      direction, std::move(delta), normalized_weights(std::move(weight), "tabulated distribution")});
}

MomentumDistribution MomentumDistribution::mixture(std::vector<Vec3> beta,
                                                   std::vector<double> weight) {
  if (beta.empty() || beta.size() != weight.size())
    throw ConfigError("mixture: velocities and weights must be non-empty and equal length");
  for (const Vec3 &b : beta)
    if (!b.allFinite())
      throw ConfigError("mixture: velocities must be finite");
  return MomentumDistribution(
      Mixture{std::move(beta), normalized_weights(std::move(weight), "mixture")});
}

std::string MomentumDistribution::kind_name() const {
  struct {
    std::string operator()(const PointMass &) const { return "point"; }
    std::string operator()(const GaussianPacket &) const { return "gaussian"; }
    std::string operator()(const TabulatedProjection &) const { return "tabulated"; }
    std::string operator()(const Mixture &) const { return "mixture"; }
  } visitor;
  return std::visit(visitor, v_);
}

double MomentumDistribution::total_weight() const {
  if (const auto *t = std::get_if<TabulatedProjection>(&v_))
    return std::accumulate(t->weight.begin(), t->weight.end(), 0.0);
  if (const auto *m = std::get_if<Mixture>(&v_))
    return std::accumulate(m->weight.begin(), m->weight.end(), 0.0);
  return 1.0;
}

Vec3 MomentumDistribution::mean() const {
  if (const auto *p = std::get_if<PointMass>(&v_))
    return p->beta;
  if (const auto *g = std::get_if<GaussianPacket>(&v_))
    return g->mean;
  if (const auto *t = std::get_if<TabulatedProjection>(&v_)) {
    double d = 0.0;
    for (std::size_t i = 0; i < t->delta.size(); ++i)
      d += t->weight[i] * t->delta[i];
    return d * t->direction.vec();
  }
  const auto &m = std::get<Mixture>(v_);
  Vec3 out = Vec3::Zero();
  for (std::size_t i = 0; i < m.beta.size(); ++i)
    out += m.weight[i] * m.beta[i];
  return out;
}

MomentumDistribution load_tabulated_csv(const std::filesystem::path &path,
                                        const UnitVector3 &direction) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open tabulated distribution file: " + path.string());
  std::vector<double> delta, weight;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#')
      continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double d = 0.0, w = 0.0;
    if (!(fields >> d >> w)) {
      if (delta.empty() && weight.empty() && lineno == 1)
        continue; // header
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": expected two numeric columns (delta, weight)");
    }
    delta.push_back(d);
    weight.push_back(w);
  }
  return MomentumDistribution::tabulated(direction, std::move(delta), std::move(weight));
}

//==============================================================================

Mixture gaussian_nodes(const GaussianPacket &packet, std::size_t order) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(packet.covariance);
  const double top = std::max(0.0, solver.eigenvalues().maxCoeff());
  std::vector<Vec3> axes;
  for (int i = 0; i < 3; ++i) {
    const double lambda = solver.eigenvalues()(i);
    if (lambda > 1e-14 * top && lambda > 0.0)
      axes.push_back(std::sqrt(lambda) * solver.eigenvectors().col(i));
  }

  Mixture out;
  out.beta.push_back(packet.mean);
  out.weight.push_back(1.0);
  const GaussHermiteRule &rule = gauss_hermite(order);
  for (const Vec3 &axis : axes) {
    Mixture next;
    next.beta.reserve(out.beta.size() * order);
    next.weight.reserve(out.beta.size() * order);
    for (std::size_t i = 0; i < out.beta.size(); ++i)
      for (std::size_t k = 0; k < order; ++k) {
        next.beta.push_back(out.beta[i] + rule.nodes[k] * axis);
        next.weight.push_back(out.weight[i] * rule.weights[k]);
      }
    out = std::move(next);
  }
  return out;
}

double mixture_sum(const Mixture &mixture, const VelocityFunction &f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < mixture.beta.size(); ++i)
    acc += mixture.weight[i] * checked(f(mixture.beta[i]), mixture.beta[i]);
  return acc;
}

Expectation expectation(const MomentumDistribution &dist, const VelocityFunction &f,
                        const ExpectationOptions &options) {
  Expectation out;
  const auto &v = dist.variant();
  if (const auto *p = std::get_if<PointMass>(&v)) {
    out.value = checked(f(p->beta), p->beta);
    out.evaluations = 1;
  } else if (const auto *g = std::get_if<GaussianPacket>(&v)) {
    const Mixture nodes = gaussian_nodes(*g, options.order);
    out.value = mixture_sum(nodes, f);
    out.evaluations = nodes.beta.size();
    if (options.estimate_error && nodes.beta.size() > 1) {
      const Mixture fine = gaussian_nodes(*g, 2 * options.order);
      out.error = std::abs(mixture_sum(fine, f) - out.value);
      out.evaluations += fine.beta.size();
    }
  } else if (const auto *t = std::get_if<TabulatedProjection>(&v)) {
    Mixture m;
    for (double d : t->delta)
      m.beta.push_back(d * t->direction.vec());
    m.weight = t->weight;
    out.value = mixture_sum(m, f);
    out.evaluations = m.beta.size();
  } else {
    const auto &m = std::get<Mixture>(v);
    out.value = mixture_sum(m, f);
    out.evaluations = m.beta.size();
  }
  return out;
}

//==============================================================================

double ProjectedDistribution::total_weight() const {
  if (kind == Kind::discrete)
    return std::accumulate(weights.begin(), weights.end(), 0.0);
  return 1.0;
}

std::pair<std::vector<double>, std::vector<double>>
ProjectedDistribution::quadrature(std::size_t order) const {
  switch (kind) {
  case Kind::point:
    return {{mean}, {1.0}};
  case Kind::gaussian: {
    if (sigma == 0.0)
      return {{mean}, {1.0}};
    const GaussHermiteRule &rule = gauss_hermite(order);
    std::vector<double> x(rule.nodes.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = mean + sigma * rule.nodes[i];
    return {x, rule.weights};
  }
  case Kind::discrete:
    return {nodes, weights};
  }
  return {};
}

ProjectedDistribution project(const MomentumDistribution &dist, const UnitVector3 &n) {
  ProjectedDistribution out;
  const auto &v = dist.variant();
  if (const auto *p = std::get_if<PointMass>(&v)) {
    out.kind = ProjectedDistribution::Kind::point;
    out.mean = n.dot(p->beta);
  } else if (const auto *g = std::get_if<GaussianPacket>(&v)) {
    out.kind = ProjectedDistribution::Kind::gaussian;
    out.mean = n.dot(g->mean);
    out.sigma = std::sqrt(std::max(0.0, n.vec().dot(g->covariance * n.vec())));
  } else if (const auto *t = std::get_if<TabulatedProjection>(&v)) {
    if ((t->direction.vec() - n.vec()).norm() > 1e-12)
      throw ConfigError("tabulated distribution was tabulated along a different direction");
    out.kind = ProjectedDistribution::Kind::discrete;
    out.nodes = t->delta;
    out.weights = t->weight;
  } else {
    const auto &m = std::get<Mixture>(v);
    out.kind = ProjectedDistribution::Kind::discrete;
    for (const Vec3 &b : m.beta)
      out.nodes.push_back(n.dot(b));
    out.weights = m.weight;
  }
  return out;
}

namespace {
double sum_1d(const std::vector<double> &x, const std::vector<double> &w, const ScalarFunction &g) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = g(x[i]);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "expectation integrand is not finite at delta = " << x[i];
      throw NumericalError(msg.str());
    }
    acc += w[i] * v;
  }
  return acc;
}
} // namespace

Expectation expectation_1d(const ProjectedDistribution &dist, const ScalarFunction &g,
                           const ExpectationOptions &options) {
  Expectation out;
  const auto [x, w] = dist.quadrature(options.order);
  out.value = sum_1d(x, w, g);
  out.evaluations = x.size();
  if (options.estimate_error && dist.kind == ProjectedDistribution::Kind::gaussian &&
      dist.sigma > 0.0) {
    const auto [xf, wf] = dist.quadrature(2 * options.order);
    out.error = std::abs(sum_1d(xf, wf, g) - out.value);
    out.evaluations += xf.size();
  }
  return out;
}

Expectation expectation_1d_adaptive(const ProjectedDistribution &dist, const ScalarFunction &g,
                                    const std::vector<Feature> &delta_features,
                                    const QuadratureOptions &options) {
  if (dist.kind != ProjectedDistribution::Kind::gaussian || dist.sigma == 0.0)
    return expectation_1d(dist, g, {1, false});

  constexpr double kScoreLimit = 12.0;
  const double mu = dist.mean;
  const double sigma = dist.sigma;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  QuadratureOptions opts = options;
  opts.features.clear();
  for (const Feature &f : delta_features)
    opts.features.push_back({(f.location - mu) / sigma, f.width / sigma});
  const auto integrand = [&](double z) {
    return norm * std::exp(-0.5 * z * z) * g(mu + sigma * z);
  };
  const QuadratureResult r = integrate_adaptive(integrand, -kScoreLimit, kScoreLimit, opts);
  if (!r.converged)
    throw NumericalError("adaptive Doppler average did not converge");
  return {r.value, r.error_estimate, r.evaluations};
}

GaussianPacket ConditionalGaussian::at(double delta) const {
  return {mean0 + gain * (delta - delta_mean), covariance};
}

ConditionalGaussian condition_on_projection(const GaussianPacket &packet, const UnitVector3 &n) {
  ConditionalGaussian out;
  const Vec3 sn = packet.covariance * n.vec();
  const double s2 = n.vec().dot(sn);
  out.delta_mean = n.dot(packet.mean);
  out.mean0 = packet.mean;
  if (s2 > 0.0) {
    out.delta_sigma = std::sqrt(s2);
    out.gain = sn / s2;
    out.covariance = packet.covariance - sn * sn.transpose() / s2;
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  } else {
    out.covariance = packet.covariance;
  }
  return out;
}

} // namespace roentgen
