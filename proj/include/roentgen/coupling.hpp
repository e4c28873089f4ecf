#pragma once

#include "roentgen/geometry.hpp"

#include <string>

namespace roentgen {

enum class CouplingKind { standard_dipole, roentgen };

/// Which terms of the moving-atom dipole coupling are active.
///
/// The standard dipole coupling e_d . e_lambda is momentum independent, so
/// neither the recoil term nor the momentum shift has any effect on it. The
/// Roentgen coupling adds the Doppler factor -n.beta, the recoil term
/// epsilon*x (optional), and the cross term (e_d.n)(e_lambda.beta).
struct CouplingModel {
  CouplingKind kind = CouplingKind::roentgen;
  bool include_recoil_term = true;
  bool apply_momentum_shift = true;

  static CouplingModel standard() { return {CouplingKind::standard_dipole, false, false}; }
  static CouplingModel roentgen(bool recoil_term = true, bool momentum_shift = true) {
    return {CouplingKind::roentgen, recoil_term, momentum_shift};
  }

  bool is_standard() const { return kind == CouplingKind::standard_dipole; }
  std::string describe() const;
};

/// beta + 2 epsilon x n: the dimensionless velocity after p -> p + hbar k
/// (hbar k / (M c) = 2 epsilon x n).
Vec3 shifted_velocity(const Vec3 &beta, double x, const UnitVector3 &n, double epsilon);

/// The velocity the coupling is evaluated at: shifted if the model asks for it.
Vec3 effective_velocity(const CouplingModel &model, const Vec3 &beta, double x,
                        const UnitVector3 &n, double epsilon);

/// The bracket 1 - n.beta_eff + epsilon x (recoil term optional).
double bracket_factor(const CouplingModel &model, const Vec3 &beta_eff, double x,
                      const UnitVector3 &n, double epsilon);

/// G for a single polarization e_lambda (field amplitude and d divided out).
double reduced_coupling(const CouplingModel &model, const Vec3 &beta, double x,
                        const UnitVector3 &n, const UnitVector3 &e_lambda,
                        const UnitVector3 &e_d, double epsilon);

/// sum_lambda G_lambda^2 as an explicit sum over the given basis.
double polarization_sum_basis(const CouplingModel &model, const Vec3 &beta, double x,
                              const PolarizationBasis &basis, const UnitVector3 &e_d,
                              double epsilon);

/// sum_lambda G_lambda^2 in closed form, |v|^2 - (n.v)^2 with
/// v = A e_d + (e_d.n) beta_eff (v = e_d for the standard coupling).
double polarization_sum(const CouplingModel &model, const Vec3 &beta, double x,
                        const UnitVector3 &n, const UnitVector3 &e_d, double epsilon);

} // namespace roentgen
