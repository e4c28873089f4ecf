#include "roentgen/geometry.hpp"

#include "roentgen/errors.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace roentgen {

namespace {
constexpr double kUnitTol = 1e-12;

// Canonical axis least aligned with n.
Vec3 least_aligned_axis(const Vec3 &n) {
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(n[i]) < std::abs(n[best]))
      best = i;
  Vec3 axis = Vec3::Zero();
  axis[best] = 1.0;
  return axis;
}
} // namespace

UnitVector3 UnitVector3::normalized(const Vec3 &v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw ConfigError("cannot normalize a zero or non-finite vector");
  return UnitVector3(v / norm);
}

UnitVector3 UnitVector3::checked(const Vec3 &v) {
  if (!(std::abs(v.norm() - 1.0) <= kUnitTol))
    throw ConfigError("vector is not unit length within 1e-12");
  return UnitVector3(v);
}

UnitVector3 UnitVector3::from_angles(double theta, double phi) {
  return UnitVector3(Vec3(std::sin(theta) * std::cos(phi),
                          std::sin(theta) * std::sin(phi), std::cos(theta)));
}

PolarizationBasis polarization_basis(const UnitVector3 &n,
                                     const std::optional<UnitVector3> &preferred) {
  Vec3 e1;
  if (preferred) {
    const double along = preferred->dot(n);
    if (along == 0.0) {
      e1 = preferred->vec();
    } else {
      const Vec3 perp = preferred->vec() - along * n.vec();
      if (perp.norm() <= 1e-12)
        throw ConfigError("preferred polarization is parallel to the propagation direction");
      e1 = perp.normalized();
    }
  } else {
    const Vec3 axis = least_aligned_axis(n.vec());
    e1 = (axis - axis.dot(n.vec()) * n.vec()).normalized();
  }
  const Vec3 e2 = n.vec().cross(e1);
  return {UnitVector3::normalized(e1), UnitVector3::normalized(e2), n};
}

PolarizationBasis rotate_basis(const PolarizationBasis &b, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Vec3 e1 = c * b.e1.vec() + s * b.e2.vec();
  const Vec3 e2 = -s * b.e1.vec() + c * b.e2.vec();
  return {UnitVector3::normalized(e1), UnitVector3::normalized(e2), b.n};
}

double basis_defect(const PolarizationBasis &b) {
  const Vec3 &e1 = b.e1.vec();
  const Vec3 &e2 = b.e2.vec();
  const Vec3 &n = b.n.vec();
  double worst = 0.0;
  for (double d : {e1.norm() - 1.0, e2.norm() - 1.0, n.norm() - 1.0, e1.dot(e2),
                   e1.dot(n), e2.dot(n)})
    worst = std::max(worst, std::abs(d));
  worst = std::max(worst, (e1.cross(e2) - n).cwiseAbs().maxCoeff());
  return worst;
}

UnitVector3 direction_about_dipole(const UnitVector3 &e_d, double theta, double phi) {
  const PolarizationBasis frame = polarization_basis(e_d);
  const Vec3 v = std::sin(theta) * std::cos(phi) * frame.e1.vec() +
                 std::sin(theta) * std::sin(phi) * frame.e2.vec() +
                 std::cos(theta) * e_d.vec();
  return UnitVector3::normalized(v);
}

} // namespace roentgen
