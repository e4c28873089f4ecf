#include "roentgen/errors.hpp"
#include "roentgen/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace roentgen;

namespace {
bool same(const Vec3 &a, const Vec3 &b, double tol = 1e-12) { return (a - b).norm() <= tol; }
} // namespace

TEST_CASE("canonical axes") {
  const auto z = UnitVector3::checked({0, 0, 1});
  const auto b = polarization_basis(z, UnitVector3::checked({1, 0, 0}));
  CHECK(b.e1.vec() == Vec3(1, 0, 0));
  CHECK(same(b.e2.vec(), {0, 1, 0}));
  CHECK(basis_defect(b) <= 1e-12);
  CHECK(basis_defect(polarization_basis(z)) <= 1e-12);
}

TEST_CASE("generic directions give valid triads") {
  CHECK(basis_defect(polarization_basis(UnitVector3::normalized({1, 1, 1}))) <= 1e-12);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int i = 0; i < 200; ++i) {
    const auto n = UnitVector3::normalized({g(rng), g(rng), g(rng)});
    const auto pref = UnitVector3::normalized({g(rng), g(rng), g(rng)});
    CHECK(basis_defect(polarization_basis(n)) <= 1e-12);
    CHECK(basis_defect(polarization_basis(n, pref)) <= 1e-12);
  }
}

TEST_CASE("preferred parallel to n is rejected") {
  const auto n = UnitVector3::normalized({1, 2, 3});
  CHECK_THROWS_AS(polarization_basis(n, n), ConfigError);
  CHECK_THROWS_AS(polarization_basis(n, -n), ConfigError);
}

TEST_CASE("unit vector invariants") {
  CHECK_THROWS_AS(UnitVector3::normalized({0, 0, 0}), ConfigError);
  CHECK_THROWS_AS(UnitVector3::checked({1, 1, 0}), ConfigError);
  CHECK(std::abs(UnitVector3::from_angles(0.3, 1.9).vec().norm() - 1.0) <= 1e-15);
}

TEST_CASE("basis rotation") {
  const auto b = polarization_basis(UnitVector3::normalized({0.2, -0.4, 0.9}));
  const auto r0 = rotate_basis(b, 0.0);
  CHECK(same(r0.e1.vec(), b.e1.vec(), 0.0));
  CHECK(same(r0.e2.vec(), b.e2.vec(), 0.0));
  const auto r90 = rotate_basis(b, std::numbers::pi / 2);
  CHECK(same(r90.e1.vec(), b.e2.vec()));
  CHECK(same(r90.e2.vec(), -b.e1.vec()));
  const auto r360 = rotate_basis(b, 2 * std::numbers::pi);
  CHECK(same(r360.e1.vec(), b.e1.vec()));
  CHECK(same(r360.e2.vec(), b.e2.vec()));
  for (double a : {0.1, 1.3, -2.7, 5.0})
    CHECK(basis_defect(rotate_basis(b, a)) <= 1e-12);
}

TEST_CASE("directions about the dipole axis") {
  const auto z = UnitVector3::checked({0, 0, 1});
  CHECK(same(direction_about_dipole(z, std::numbers::pi / 2, 0.0).vec(), {1, 0, 0}));
  CHECK(same(direction_about_dipole(z, std::numbers::pi / 2, std::numbers::pi / 2).vec(), {0, 1, 0}));
  CHECK(same(direction_about_dipole(z, 0.0, 0.4).vec(), {0, 0, 1}));
  const auto ed = UnitVector3::normalized({1, 1, 0});
  for (double t : {0.2, 1.0, 2.5})
    CHECK(direction_about_dipole(ed, t, 0.7).dot(ed) == doctest::Approx(std::cos(t)).epsilon(1e-12));
}
