#include "roentgen/gauss_rules.hpp"

#include "roentgen/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace roentgen {

namespace {

// Orthonormal probabilists' Hermite polynomials p_0..p_n at z; returns
// (p_n, p_{n-1}, sum_{k<n} p_k^2).
struct Recurrence {
  double pn;
  double pn1;
  double christoffel;
};

Recurrence evaluate(std::size_t n, double z) {
  double prev = 0.0;
  double cur = 1.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum += cur * cur;
    const double next = (z * cur - std::sqrt(static_cast<double>(k)) * prev) /
                        std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
  }
  return {cur, prev, sum};
}

GaussHermiteRule build(std::size_t n) {
  GaussHermiteRule rule;
  if (n == 1) {
    rule.nodes = {0.0};
    rule.weights = {1.0};
    return rule;
  }
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd off(static_cast<Eigen::Index>(n - 1));
  for (std::size_t k = 1; k < n; ++k)
    off(static_cast<Eigen::Index>(k - 1)) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);

  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    for (int it = 0; it < 3; ++it) {
      const Recurrence r = evaluate(n, z);
      const double deriv = std::sqrt(static_cast<double>(n)) * r.pn1;
      if (deriv == 0.0)
        break;
      z -= r.pn / deriv;
    }
    rule.nodes[i] = z;
  }
  // Enforce exact symmetry about zero.
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double z = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
  }
  if (n % 2 == 1)
    rule.nodes[n / 2] = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    rule.weights[i] = 1.0 / evaluate(n, rule.nodes[i]).christoffel;
  return rule;
}

} // namespace

const GaussHermiteRule &gauss_hermite(std::size_t order) {
  if (order == 0)
    throw ConfigError("Gauss-Hermite order must be >= 1");
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<GaussHermiteRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto &slot = cache[order];
  if (!slot)
    slot = std::make_unique<GaussHermiteRule>(build(order));
  return *slot;
}

GaussLegendreRule gauss_legendre(std::size_t order) {
  if (order == 0)
    throw ConfigError("Gauss-Legendre order must be >= 1");
  const auto n = static_cast<Eigen::Index>(order);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    off(k - 1) = kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);

  // (P_n(z), P_n'(z)) from the three-term recurrence.
  const auto legendre = [order](double z) {
    double p0 = 1.0, p1 = z;
    for (std::size_t k = 2; k <= order; ++k) {
      const double kk = static_cast<double>(k);
      const double p2 = ((2.0 * kk - 1.0) * z * p1 - (kk - 1.0) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    const double dp = static_cast<double>(order) * (z * p1 - p0) / (z * z - 1.0);
    return std::pair{p1, dp};
  };

  GaussLegendreRule rule;
  for (Eigen::Index i = 0; i < n; ++i) {
    double z = solver.eigenvalues()(i);
    for (int it = 0; it < 3; ++it) {
      const auto [p, dp] = legendre(z);
      z -= p / dp;
    }
    const double dp = legendre(z).second;
    rule.nodes.push_back(z);
    rule.weights.push_back(2.0 / ((1.0 - z * z) * dp * dp));
  }
  return rule;
}

} // namespace roentgen
