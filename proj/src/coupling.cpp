#include "roentgen/coupling.hpp"

namespace roentgen {

std::string CouplingModel::describe() const {
  if (is_standard())
    return "standard";
  std::string out = "roentgen";
  out += include_recoil_term ? "+recoil" : "-recoil";
  out += apply_momentum_shift ? "+shift" : "-shift";
  return out;
}

Vec3 shifted_velocity(const Vec3 &beta, double x, const UnitVector3 &n, double epsilon) {
  return beta + (2.0 * epsilon * x) * n.vec();
}

Vec3 effective_velocity(const CouplingModel &model, const Vec3 &beta, double x,
                        const UnitVector3 &n, double epsilon) {
  return model.apply_momentum_shift ? shifted_velocity(beta, x, n, epsilon) : beta;
}

double bracket_factor(const CouplingModel &model, const Vec3 &beta_eff, double x,
                      const UnitVector3 &n, double epsilon) {
  const double recoil = model.include_recoil_term ? epsilon * x : 0.0;
  return 1.0 - n.dot(beta_eff) + recoil;
}

double reduced_coupling(const CouplingModel &model, const Vec3 &beta, double x,
                        const UnitVector3 &n, const UnitVector3 &e_lambda,
                        const UnitVector3 &e_d, double epsilon) {
  const double dipole = e_d.dot(e_lambda);
  if (model.is_standard())
    return dipole;
  const Vec3 b = effective_velocity(model, beta, x, n, epsilon);
  return dipole * bracket_factor(model, b, x, n, epsilon) + e_d.dot(n) * e_lambda.dot(b);
}

double polarization_sum_basis(const CouplingModel &model, const Vec3 &beta, double x,
                              const PolarizationBasis &basis, const UnitVector3 &e_d,
                              double epsilon) {
  const double g1 = reduced_coupling(model, beta, x, basis.n, basis.e1, e_d, epsilon);
  const double g2 = reduced_coupling(model, beta, x, basis.n, basis.e2, e_d, epsilon);
  return g1 * g1 + g2 * g2;
}

double polarization_sum(const CouplingModel &model, const Vec3 &beta, double x,
                        const UnitVector3 &n, const UnitVector3 &e_d, double epsilon) {
  Vec3 v;
  if (model.is_standard()) {
    v = e_d.vec();
  } else {
    const Vec3 b = effective_velocity(model, beta, x, n, epsilon);
    v = bracket_factor(model, b, x, n, epsilon) * e_d.vec() + e_d.dot(n) * b;
  }
  const double along = n.dot(v);
  // |v|^2 - (n.v)^2, evaluated as the transverse norm.
  const Vec3 transverse = v - along * n.vec();
  return transverse.squaredNorm();
}

} // namespace roentgen
