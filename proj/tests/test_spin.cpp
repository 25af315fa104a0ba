#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cavitrap/constants.hpp"
#include "cavitrap/errors.hpp"
#include "cavitrap/spin.hpp"
#include "oracles.hpp"

using namespace cavitrap;
namespace c = cavitrap::constants;

namespace {

TrapConfig spin_trap(double waist = 100e-6) {
  const auto s = ytterbium171();
  const TrapConfig base(c::two_pi * 0.5e6, 0.1, OpticalTrapConfig(1064e-9, waist, 0.0));
  return base.with_depth(depth_for_omega_z(c::two_pi * 2e6, base, s));
}

struct Fixture {
  IonSpecies s = ytterbium171();
  TrapConfig t = spin_trap();
  EquilibriumResult eq = find_equilibria(4, t, s, 20, 0).front();
  ModeSpectrum spectrum = normal_modes(eq, t, s);
  double w_max = spectrum.modes[0].frequency;
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "couplings match the brute-force double sum") {
  SpinDriveConfig d;
  d.mu = {1.02 * w_max, 1.3 * w_max};
  d.rabi.resize(4, 2);
  d.rabi << 1.0, 0.3, 0.8, 0.5, 1.2, 0.9, 0.6, 1.1;
  d.rabi *= c::two_pi * 1e6;
  d.recoil_energy = c::planck * 1e4;
  const auto g = compute_jij(spectrum, eq, d);
  const Eigen::MatrixXd b = spectrum.out_of_plane_amplitudes();
  Eigen::VectorXd w(4);
  for (int m = 0; m < 4; ++m) w[m] = spectrum.modes[m].frequency;
  const Eigen::MatrixXd ref = oracle::brute_jij(b, w, d.mu, d.rabi, d.recoil_energy, c::hbar);
  CHECK((g.J - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
  CHECK((g.J - g.J.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 4; ++i) CHECK(g.J(i, i) == 0.0);
}

TEST_CASE_FIXTURE(Fixture, "couplings scale with recoil energy and Rabi frequency squared") {
  auto d = SpinDriveConfig::single(4, 1.05 * w_max, 1e6, 1e-30);
  const auto j1 = compute_jij(spectrum, eq, d).J;
  d.recoil_energy *= 3.0;
  const auto j3 = compute_jij(spectrum, eq, d).J;
  CHECK((j3 - 3.0 * j1).norm() <= 1e-13 * j3.norm());
  d.recoil_energy = 1e-30;
  d.rabi *= 2.0;
  const auto j4 = compute_jij(spectrum, eq, d).J;
  CHECK((j4 - 4.0 * j1).norm() <= 1e-13 * j4.norm());
}

TEST_CASE_FIXTURE(Fixture, "relabelling the ions permutes the couplings") {
  const auto d = SpinDriveConfig::single(4, 1.05 * w_max, 1e6, 1e-30);
  const auto j = compute_jij(spectrum, eq, d).J;
  const std::vector<int> perm{2, 0, 3, 1};
  Eigen::VectorXd r(12);
  for (int i = 0; i < 4; ++i) r.segment<3>(3 * i) = eq.positions.coords().segment<3>(3 * perm[i]);
  EquilibriumResult eq2 = eq;
  eq2.positions = CrystalPositions(r);
  const auto j2 = compute_jij(normal_modes(eq2, t, s), eq2, d).J;
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      CHECK(j2(i, k) == doctest::Approx(j(perm[i], perm[k])).epsilon(1e-9));
    }
  }
}

TEST_CASE_FIXTURE(Fixture, "a drive on top of a mode is rejected") {
  const auto d = SpinDriveConfig::single(4, w_max * (1.0 + 1e-6), 1e6, 1e-30);
  CHECK_THROWS_AS(compute_jij(spectrum, eq, d), ResonanceError);
  auto bad = SpinDriveConfig::single(4, w_max, 1e6, 1e-30);
  bad.rabi.resize(3, 1);
  CHECK_THROWS_AS(bad.validate(4), ValidationError);
}

TEST_CASE_FIXTURE(Fixture, "far detuning approaches the leading 1/mu^2 term") {
  const double mu = 1e3 * w_max;
  const auto d = SpinDriveConfig::single(4, mu, 1e6, 1e-30);
  const auto j = compute_jij(spectrum, eq, d).J;
  const Eigen::MatrixXd b = spectrum.out_of_plane_amplitudes();
  // sum_m b_im b_jm = 0 off the diagonal, so the first surviving term is
  // sum_m b_im b_jm w_m^2 / mu^4.
  Eigen::MatrixXd lead = Eigen::MatrixXd::Zero(4, 4);
  for (int m = 0; m < 4; ++m) {
    lead += b.col(m) * b.col(m).transpose() * spectrum.modes[m].omega_squared;
  }
  lead *= 1e12 * 1e-30 / (c::hbar * mu * mu * mu * mu);
  lead.diagonal().setZero();
  CHECK((j - lead).norm() <= 1e-5 * lead.norm());
}

TEST_CASE("beta fit recovers an exact power law") {
  Eigen::VectorXd r(3 * 6);
  for (int i = 0; i < 6; ++i) r.segment<3>(3 * i) << std::cos(1.3 * i) * (1.0 + i), std::sin(1.3 * i) * (2.0 + 0.5 * i), 0.0;
  const CrystalPositions pos(r);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 6);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i != j) J(i, j) = 7.0 / std::pow((r.segment<3>(3 * i) - r.segment<3>(3 * j)).norm(), 3.0);
    }
  }
  const auto fit = fit_beta(J, pos);
  CHECK(fit.beta == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(fit.residual < 1e-10);
  CHECK(af_fraction(J) == 1.0);
  CHECK(af_fraction(-J) == 0.0);
  J(0, 1) = J(1, 0) = 0.0;
  CHECK_THROWS_AS(fit_beta(J, pos), FitError);
}

TEST_CASE("sweep entries are independent") {
  const auto s = ytterbium171();
  const auto t = spin_trap();
  const auto eq = find_equilibria(10, t, s, 30, 0).front();
  const auto spectrum = normal_modes(eq, t, s);
  const double w_max = spectrum.modes[0].frequency;
  const auto d = SpinDriveConfig::single(10, w_max * 1.1, 1e6, 1e-30);
  const std::vector<double> mus{1.01 * w_max, w_max, 2.0 * w_max};
  const auto sweep = beta_sweep(spectrum, eq, mus, d);
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[0].fit);
  CHECK_FALSE(sweep[1].fit);
  CHECK_FALSE(sweep[1].error.empty());
  CHECK(sweep[2].fit);
  CHECK(sweep[2].fit->beta > sweep[0].fit->beta);
}
