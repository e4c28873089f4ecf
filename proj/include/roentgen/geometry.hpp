#pragma once

#include <Eigen/Core>

#include <optional>

namespace roentgen {

using Vec3 = Eigen::Vector3d;

/// A direction in R^3 with Euclidean norm 1 (within 1e-12).
class UnitVector3 {
public:
  /// Normalizes v. Throws ConfigError for a zero or non-finite vector.
  static UnitVector3 normalized(const Vec3 &v);
  /// Accepts v only if it is already unit length within 1e-12.
  static UnitVector3 checked(const Vec3 &v);
  /// Spherical angles about the z axis: (sin t cos p, sin t sin p, cos t).
  static UnitVector3 from_angles(double theta, double phi);

  UnitVector3() : v_(0.0, 0.0, 1.0) {}

  const Vec3 &vec() const { return v_; }
  double operator[](int i) const { return v_[i]; }
  double dot(const Vec3 &other) const { return v_.dot(other); }
  double dot(const UnitVector3 &other) const { return v_.dot(other.v_); }
  UnitVector3 operator-() const { return UnitVector3(-v_); }

private:
  explicit UnitVector3(const Vec3 &v) : v_(v) {}
  Vec3 v_;
};

/// Real linear polarization triad for a propagation direction n:
/// e1, e2 and n orthonormal with e1 x e2 = n.
struct PolarizationBasis {
  UnitVector3 e1;
  UnitVector3 e2;
  UnitVector3 n;
};

/// If `preferred` is given it is projected onto the plane orthogonal to n
/// and used as e1; when it is already orthogonal, e1 == preferred exactly.
/// Throws ConfigError if `preferred` is parallel to n.
PolarizationBasis polarization_basis(const UnitVector3 &n,
                                     const std::optional<UnitVector3> &preferred = {});

/// Rotates e1, e2 about n by `angle` (radians).
PolarizationBasis rotate_basis(const PolarizationBasis &b, double angle);

/// Largest deviation from orthonormality / right-handedness of a triad.
double basis_defect(const PolarizationBasis &b);

/// Emission direction at polar angle theta from the dipole axis e_d and
/// azimuth phi. The azimuth origin is the canonical axis least aligned with
/// e_d (x when e_d is z).
UnitVector3 direction_about_dipole(const UnitVector3 &e_d, double theta, double phi);

} // namespace roentgen
