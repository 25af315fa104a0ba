#include <doctest.h>

#include <cmath>

#include <omp.h>

#include <Eigen/Eigenvalues>

#include "cavitrap/alignment.hpp"
#include "cavitrap/constants.hpp"
#include "cavitrap/equilibrium.hpp"
#include "cavitrap/errors.hpp"
#include "cavitrap/minimize.hpp"
#include "oracles.hpp"

using namespace cavitrap;
namespace c = cavitrap::constants;

namespace {

TrapConfig plain_trap(double anisotropy = 0.0) {
  return TrapConfig(c::two_pi * 0.5e6, anisotropy, OpticalTrapConfig(1064e-9, 100e-6, 0.0));
}

}  // namespace

TEST_CASE("two ions sit at the closed-form spacing") {
  const auto s = ytterbium171();
  const auto t = plain_trap();
  const auto eqs = find_equilibria(2, t, s, 10, 3);
  REQUIRE(!eqs.empty());
  const double d = oracle::two_ion_spacing(s.mass, t.omega_x_dc());
  CHECK(eqs.front().d_min == doctest::Approx(d).epsilon(1e-6));
  CHECK(eqs.front().stability == Stability::Stable);
  CHECK(eqs.front().positions.is_planar());
}

TEST_CASE("two ions align with the weak axis of an anisotropic trap") {
  const auto s = ytterbium171();
  const auto t = plain_trap(0.2);
  const auto eq = find_equilibria(2, t, s, 10, 3).front();
  const double d = oracle::two_ion_spacing(s.mass, t.omega_x_dc());
  CHECK(eq.d_min == doctest::Approx(d).epsilon(1e-6));
  CHECK(std::abs(eq.positions.y(0)) < 1e-6 * d);
}

TEST_CASE("ten ions form the two-shell crystal") {
  const auto s = ytterbium171();
  const auto eqs = find_equilibria(10, plain_trap(), s, 50, 0);
  const auto& eq = eqs.front();
  CHECK(eq.rings.counts == std::vector<int>{2, 8});
  CHECK_FALSE(eq.rings.ambiguous);
  CHECK(eq.stability == Stability::Stable);
  for (std::size_t k = 1; k < eqs.size(); ++k) {
    CHECK(eqs[k].energy >= eq.energy);
    CHECK(eqs[k].stability == Stability::Metastable);
  }
  CHECK(is_planar_minimum(eq.positions, plain_trap(), s));
  CHECK(eq.gradient_norm < 1e-6 * characteristic_force(plain_trap(), s));
  const auto m = crystal_metrics(eq.positions);
  CHECK(m.r_max == doctest::Approx(eq.r_max));
  CHECK(m.d_min == doctest::Approx(eq.d_min));
}

TEST_CASE("equilibria do not depend on the thread count") {
  const auto s = ytterbium171();
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto a = find_equilibria(12, plain_trap(), s, 20, 42);
  omp_set_num_threads(4);
  const auto b = find_equilibria(12, plain_trap(), s, 20, 42);
  omp_set_num_threads(saved);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].positions.coords() == b[k].positions.coords());
    CHECK(a[k].energy == b[k].energy);
  }
}

TEST_CASE("a saddle is not a planar minimum") {
  const auto s = ytterbium171();
  const auto t = plain_trap();
  // A straight three-ion chain balances m w^2 a = (5/4) k / a^2 but buckles
  // into a triangle in an isotropic trap.
  const double a = std::cbrt(1.25 * c::coulomb_constant / (s.mass * t.omega_x_dc() * t.omega_x_dc()));
  Eigen::VectorXd xy(6);
  xy << -a, 0.0, 0.0, 0.0, a, 0.0;
  const PlanarPotential p(t, s);
  Eigen::VectorXd g;
  p.energy_and_gradient(xy, g);
  CHECK(g.norm() < 1e-9 * characteristic_force(t, s));
  CHECK_FALSE(is_planar_minimum(CrystalPositions::from_planar(xy), t, s));
  const auto tri = find_equilibria(3, t, s, 10, 0).front();
  CHECK(tri.rings.counts == std::vector<int>{3});
  CHECK(tri.energy < p.energy(xy));
}

TEST_CASE("ring configuration and metrics") {
  const double l = 1.0;
  Eigen::VectorXd xy(2 * 7);
  xy.setZero();
  for (int k = 0; k < 6; ++k) {
    xy[2 + 2 * k] = 2.0 * std::cos(k * c::two_pi / 6);
    xy[3 + 2 * k] = 2.0 * std::sin(k * c::two_pi / 6);
  }
  const auto pos = CrystalPositions::from_planar(xy);
  CHECK(ring_configuration(pos, l).counts == std::vector<int>{1, 6});
  const auto m = crystal_metrics(pos);
  CHECK(m.r_max == doctest::Approx(2.0));
  CHECK(m.d_min == doctest::Approx(2.0));
  CHECK_THROWS_AS(crystal_metrics(CrystalPositions::from_planar(Eigen::VectorXd::Zero(2))), DomainError);
}

TEST_CASE("L-BFGS minimises a quadratic") {
  Eigen::MatrixXd a(3, 3);
  a << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
  Eigen::VectorXd b(3);
  b << 1, -2, 0.5;
  Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = a * x - b;
    return 0.5 * x.dot(a * x) - b.dot(x);
  };
  MinimizeOptions o;
  o.gradient_tolerance = 1e-7;
  const auto r = lbfgs(f, Eigen::VectorXd::Zero(3), o);
  CHECK(r.converged);
  const Eigen::VectorXd exact = a.ldlt().solve(b);
  CHECK((r.x - exact).norm() < 1e-6);
  const auto polished = newton_polish(f, [&](const Eigen::VectorXd&) { return a; }, r.x, 1e-14);
  CHECK(polished.gradient_norm < 1e-14);
  CHECK((polished.x - exact).norm() < 1e-13);
}

TEST_CASE("alignment undoes rotation, reflection and relabelling") {
  const Eigen::VectorXd a = oracle::random_positions(6, 1.0, 8, true);
  Eigen::VectorXd xy(12);
  for (int i = 0; i < 6; ++i) xy.segment<2>(2 * i) = a.segment<2>(3 * i);
  const Eigen::VectorXd moved = permute_planar(rotate_planar(xy, 0.7, true), {3, 1, 5, 0, 2, 4});
  const auto al = align_planar(xy, moved);
  CHECK(al.distance < 1e-12);
  CHECK(same_point_set(xy, moved, 1e-9));
  Eigen::VectorXd other = xy;
  other[0] += 0.3;
  CHECK_FALSE(same_point_set(xy, other, 1e-3));
  Eigen::MatrixXd cost(3, 3);
  cost << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  CHECK(hungarian(cost) == std::vector<int>{1, 0, 2});
}
