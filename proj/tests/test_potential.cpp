#include <doctest.h>

#include <cmath>
#include <vector>

#include <omp.h>

#include "cavitrap/constants.hpp"
#include "cavitrap/errors.hpp"
#include "cavitrap/kernels.hpp"
#include "cavitrap/potential.hpp"
#include "oracles.hpp"

using namespace cavitrap;
namespace c = cavitrap::constants;

namespace {

TrapConfig lattice_trap(LatticeVariant v) {
  return TrapConfig(c::two_pi * 0.5e6, 0.07, OpticalTrapConfig(1064e-9, 15e-6, 3e-25, v));
}

std::span<const double> view(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

TEST_CASE("energy matches the direct three-term sum") {
  const auto s = ytterbium171();
  for (auto v : {LatticeVariant::NodeSin2, LatticeVariant::AntinodeCos2}) {
    const auto t = lattice_trap(v);
    const Eigen::VectorXd r = oracle::random_positions(9, 8e-6, 11, false);
    const auto e = total_energy(CrystalPositions(r), t, s);
    CHECK(e.total == doctest::Approx(oracle::total_energy(r, t, s.mass)).epsilon(1e-12));
    CHECK(e.total == doctest::Approx(e.coulomb + e.dc + e.optical).epsilon(1e-15));
  }
}

TEST_CASE("gradient agrees with central differences") {
  const auto s = ytterbium171();
  for (auto v : {LatticeVariant::NodeSin2, LatticeVariant::AntinodeCos2}) {
    const auto t = lattice_trap(v);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const Eigen::VectorXd r = oracle::random_positions(7, 8e-6, seed, false);
      const Eigen::VectorXd g = gradient(CrystalPositions(r), t, s);
      const Eigen::VectorXd fd = oracle::fd_gradient(
          [&](const Eigen::VectorXd& x) { return oracle::total_energy(x, t, s.mass); }, r, 1e-11);
      CHECK((g - fd).norm() / fd.norm() < 1e-6);
    }
  }
}

TEST_CASE("Hessian agrees with differences of the gradient and is symmetric") {
  const auto s = ytterbium171();
  for (auto v : {LatticeVariant::NodeSin2, LatticeVariant::AntinodeCos2}) {
    const auto t = lattice_trap(v);
    const Eigen::VectorXd r = oracle::random_positions(6, 8e-6, 5, false);
    const Eigen::MatrixXd h = hessian(CrystalPositions(r), t, s);
    const Eigen::MatrixXd fd = oracle::fd_jacobian(
        [&](const Eigen::VectorXd& x) { return gradient(CrystalPositions(x), t, s); }, r, 1e-11);
    CHECK(oracle::rel_err(h, fd) < 1e-6);
    CHECK((h - h.transpose()).norm() <= 1e-14 * h.norm());
  }
}

TEST_CASE("planar inputs decouple the z block") {
  const auto s = ytterbium171();
  const auto t = lattice_trap(LatticeVariant::NodeSin2);
  const Eigen::VectorXd r = oracle::random_positions(12, 8e-6, 9, true);
  const Eigen::MatrixXd h = hessian(CrystalPositions(r), t, s);
  const int n = 12;
  double coupling = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int a = 0; a < 2; ++a) coupling = std::max(coupling, std::abs(h(3 * i + 2, 3 * j + a)));
    }
  }
  CHECK(coupling == 0.0);
  const Eigen::VectorXd g = gradient(CrystalPositions(r), t, s);
  for (int i = 0; i < n; ++i) CHECK(g[3 * i + 2] == 0.0);
}

TEST_CASE("planar potential restricts the full potential") {
  const auto s = ytterbium171();
  const auto t = lattice_trap(LatticeVariant::NodeSin2);
  const PlanarPotential p(t, s);
  const Eigen::VectorXd r = oracle::random_positions(8, 8e-6, 4, true);
  const CrystalPositions pos(r);
  const Eigen::VectorXd xy = pos.planar();
  CHECK(CrystalPositions::from_planar(xy).coords() == r);
  Eigen::VectorXd g2;
  const double e = p.energy_and_gradient(xy, g2);
  CHECK(e == doctest::Approx(total_energy(pos, t, s).total).epsilon(1e-15));
  CHECK(p.energy(xy) == e);
  const Eigen::VectorXd g3 = gradient(pos, t, s);
  const Eigen::MatrixXd h3 = hessian(pos, t, s);
  const Eigen::MatrixXd h2 = p.hessian(xy);
  for (int i = 0; i < 8; ++i) {
    for (int a = 0; a < 2; ++a) {
      CHECK(g2[2 * i + a] == doctest::Approx(g3[3 * i + a]).epsilon(1e-14));
      for (int j = 0; j < 8; ++j) {
        for (int b = 0; b < 2; ++b) {
          CHECK(h2(2 * i + a, 2 * j + b) == doctest::Approx(h3(3 * i + a, 3 * j + b)).epsilon(1e-14));
        }
      }
    }
  }
}

TEST_CASE("coincident ions raise a singular-configuration error") {
  const auto s = ytterbium171();
  const auto t = lattice_trap(LatticeVariant::NodeSin2);
  Eigen::VectorXd r = oracle::random_positions(4, 5e-6, 2, true);
  r.segment<3>(3) = r.segment<3>(0);
  CHECK_THROWS_AS(total_energy(CrystalPositions(r), t, s), SingularConfigurationError);
  CHECK_THROWS_AS(gradient(CrystalPositions(r), t, s), SingularConfigurationError);
  CHECK_THROWS_AS(hessian(CrystalPositions(r), t, s), SingularConfigurationError);
  CHECK_THROWS_AS(kernels::serial::coulomb_energy(view(r), 1.0), SingularConfigurationError);
}

TEST_CASE("parallel kernels match the serial reference and ignore the thread count") {
  const int n = 40;
  const Eigen::VectorXd r = oracle::random_positions(n, 20e-6, 77, false);
  const double k = c::coulomb_constant;

  const double es = kernels::serial::coulomb_energy(view(r), k);
  std::vector<double> gs(3 * n, 0.0);
  kernels::serial::add_coulomb_gradient(view(r), k, gs);
  Eigen::MatrixXd hs = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  kernels::serial::add_coulomb_hessian(view(r), k, hs);

  double brute = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) brute += k / (r.segment<3>(3 * i) - r.segment<3>(3 * j)).norm();
  }
  CHECK(es == doctest::Approx(brute).epsilon(1e-13));

  const int saved = omp_get_max_threads();
  std::vector<double> e_by_threads;
  std::vector<std::vector<double>> g_by_threads;
  std::vector<Eigen::MatrixXd> h_by_threads;
  for (int threads : {1, 3}) {
    omp_set_num_threads(threads);
    e_by_threads.push_back(kernels::parallel::coulomb_energy(view(r), k));
    std::vector<double> g(3 * n, 0.0);
    kernels::parallel::add_coulomb_gradient(view(r), k, g);
    g_by_threads.push_back(g);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    kernels::parallel::add_coulomb_hessian(view(r), k, h);
    h_by_threads.push_back(h);
  }
  omp_set_num_threads(saved);

  CHECK(e_by_threads[0] == e_by_threads[1]);
  CHECK(g_by_threads[0] == g_by_threads[1]);
  CHECK(h_by_threads[0] == h_by_threads[1]);
  CHECK(e_by_threads[0] == doctest::Approx(es).epsilon(1e-13));
  const Eigen::Map<const Eigen::VectorXd> gp(g_by_threads[0].data(), 3 * n);
  const Eigen::Map<const Eigen::VectorXd> gsv(gs.data(), 3 * n);
  CHECK((gp - gsv).norm() <= 1e-12 * gsv.norm());
  CHECK(oracle::rel_err(h_by_threads[0], hs) < 1e-12);
}

TEST_CASE("map_columns evaluates every candidate") {
  Eigen::MatrixXd cand(3, 50);
  for (int col = 0; col < 50; ++col) cand.col(col) = Eigen::Vector3d(col, 2.0 * col, -col);
  const auto f = [](const Eigen::VectorXd& v) { return v.sum(); };
  std::vector<double> a(50), b(50);
  kernels::serial::map_columns(cand, f, a);
  kernels::parallel::map_columns(cand, f, b);
  CHECK(a == b);
  for (int col = 0; col < 50; ++col) CHECK(a[col] == 2.0 * col);
}

TEST_CASE("min pair distance") {
  Eigen::VectorXd r(9);
  r << 0, 0, 0, 3, 4, 0, 0, 0, 1;
  CHECK(kernels::min_pair_distance(view(r)) == doctest::Approx(1.0));
  Eigen::VectorXd one(3);
  one << 1, 2, 3;
  CHECK(std::isinf(kernels::min_pair_distance(view(one))));
}
