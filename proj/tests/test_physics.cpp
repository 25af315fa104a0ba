#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cavitrap/constants.hpp"
#include "cavitrap/errors.hpp"
#include "cavitrap/species.hpp"
#include "cavitrap/trap.hpp"
#include "oracles.hpp"

using namespace cavitrap;
namespace c = cavitrap::constants;

namespace {

TrapConfig node_trap(double depth, double waist = 100e-6, double anisotropy = 0.0) {
  return TrapConfig(c::two_pi * 0.5e6, anisotropy,
                    OpticalTrapConfig(1064e-9, waist, depth, LatticeVariant::NodeSin2));
}

}  // namespace

TEST_CASE("intensity follows 2 F P / (pi^2 w0^2) and inverts") {
  const double p = 0.84, f = 3000.0, w = 21e-6;
  const double expected = 2.0 * f * p / (std::numbers::pi * std::numbers::pi * w * w);
  CHECK(intensity_from_power(p, f, w) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(power_from_intensity(expected, f, w) == doctest::Approx(p).epsilon(1e-14));
  CHECK_THROWS_AS(intensity_from_power(1.0, f, 0.0), DomainError);
}

TEST_CASE("doubling the finesse halves the power for the same intensity") {
  const double intensity = 1.5e12, w = 27.3e-6;
  const double p1 = power_from_intensity(intensity, 3000.0, w);
  const double p2 = power_from_intensity(intensity, 6000.0, w);
  CHECK(p2 == doctest::Approx(0.5 * p1).epsilon(1e-14));
  CHECK(intensity_from_power(p2, 6000.0, w) == doctest::Approx(intensity).epsilon(1e-14));
}

TEST_CASE("trap depth is a linear two-level sum over the lines") {
  const auto s = ytterbium171();
  const double wl = laser_angular_frequency(1064e-9);
  CHECK(wl == doctest::Approx(c::two_pi * c::speed_of_light / 1064e-9).epsilon(1e-15));
  double per_intensity = 0.0;
  for (const auto& line : s.lines) {
    const double wa = line.angular_frequency;
    per_intensity += 3.0 * std::numbers::pi * c::speed_of_light * c::speed_of_light /
                     (2.0 * wa * wa * wa) *
                     (line.linewidth / (wa - wl) + line.linewidth / (wa + wl));
  }
  const double i = 1.16e12;
  CHECK(trap_depth(s, wl, i) == doctest::Approx(std::abs(per_intensity) * i).epsilon(1e-13));
  CHECK(trap_depth(s, wl, 2.0 * i) == doctest::Approx(2.0 * trap_depth(s, wl, i)).epsilon(1e-14));
  CHECK(trap_depth(s, wl, 0.0) == 0.0);
}

TEST_CASE("Laplace constraint and DC anisotropy") {
  const TrapConfig t = node_trap(0.0, 100e-6, 0.1);
  CHECK(t.omega_y_dc() == doctest::Approx(1.1 * t.omega_x_dc()).epsilon(1e-15));
  CHECK(t.omega_z_dc_squared() ==
        doctest::Approx(t.omega_x_dc() * t.omega_x_dc() + t.omega_y_dc() * t.omega_y_dc())
            .epsilon(1e-15));
}

TEST_CASE("node lattice curvature at the origin is 2 U k^2") {
  const auto s = ytterbium171();
  const TrapConfig base = node_trap(0.0);
  const double k = 2.0 * std::numbers::pi / 1064e-9;
  for (double alpha : {0.5, 1.0, 2.4, 4.0}) {
    const double depth = depth_for_aspect_ratio(alpha, base, s);
    const double wx = base.omega_x_dc();
    const double expected = s.mass * (alpha * alpha * wx * wx + base.omega_z_dc_squared()) / (2.0 * k * k);
    CHECK(depth == doctest::Approx(expected).epsilon(1e-12));
    const auto f = effective_frequencies(base.with_depth(depth), s);
    CHECK(f.z / f.x == doctest::Approx(alpha).epsilon(1e-12));
    CHECK(f.x == doctest::Approx(wx).epsilon(1e-15));
  }
  const double wz = c::two_pi * 2e6;
  const auto f = effective_frequencies(base.with_depth(depth_for_omega_z(wz, base, s)), s);
  CHECK(f.z == doctest::Approx(wz).epsilon(1e-12));
}

TEST_CASE("no lattice means anti-trapping along z") {
  const auto s = ytterbium171();
  CHECK_THROWS_AS(effective_frequencies(node_trap(0.0), s), AntiTrappedError);
  CHECK(effective_omega_z_squared(node_trap(0.0), s) < 0.0);
}

TEST_CASE("effective frequencies agree with finite-difference curvature") {
  const auto s = ytterbium171();
  for (auto variant : {LatticeVariant::NodeSin2, LatticeVariant::AntinodeCos2}) {
    const TrapConfig t(c::two_pi * 0.5e6, 0.05,
                       OpticalTrapConfig(1064e-9, 20e-6, 2e-25, variant));
    const auto f = effective_frequencies(t, s);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(3);
    const auto e = [&](const Eigen::VectorXd& x) { return oracle::total_energy(x, t, s.mass); };
    const double h = 5e-10;
    const double e0 = e(r);
    double curv[3];
    for (int a = 0; a < 3; ++a) {
      Eigen::VectorXd p = r, m = r;
      p[a] += h;
      m[a] -= h;
      curv[a] = (e(p) - 2.0 * e0 + e(m)) / (h * h);
    }
    CHECK(s.mass * f.x * f.x == doctest::Approx(curv[0]).epsilon(1e-5));
    CHECK(s.mass * f.y * f.y == doctest::Approx(curv[1]).epsilon(1e-5));
    CHECK(s.mass * f.z * f.z == doctest::Approx(curv[2]).epsilon(1e-5));
  }
}

TEST_CASE("characteristic length") {
  const auto s = ytterbium171();
  const TrapConfig t = node_trap(0.0);
  const double w = t.omega_x_dc();
  CHECK(characteristic_length(t, s) ==
        doctest::Approx(std::cbrt(c::coulomb_constant / (s.mass * w * w))).epsilon(1e-14));
}

TEST_CASE("species file invariants") {
  const auto s = ytterbium171();
  CHECK(s.mass == doctest::Approx(171.0 * c::atomic_mass_unit).epsilon(1e-15));
  CHECK(s.lines.size() == 2);
  CHECK(s.branch_ratio_meta == doctest::Approx(1.0 / 200.0));
  auto j = species_to_json(s);
  const auto back = species_from_json(j);
  CHECK(back.mass == doctest::Approx(s.mass).epsilon(1e-15));
  CHECK(back.lines[0].angular_frequency == doctest::Approx(s.lines[0].angular_frequency).epsilon(1e-14));
  j["mass_amu"] = -1.0;
  CHECK_THROWS_AS(species_from_json(j), ValidationError);
}
