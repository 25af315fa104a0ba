#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cavitrap/constants.hpp"
#include "cavitrap/errors.hpp"
#include "cavitrap/lifetime.hpp"
#include "cavitrap/trap.hpp"

using namespace cavitrap;
namespace c = cavitrap::constants;

TEST_CASE("metastable rate and lifetime identities") {
  CHECK(metastable_rate(30.0, 1.0 / 200.0) == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(trapping_lifetime(0.15, 20) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(std::isinf(trapping_lifetime(0.0, 5)));
  CHECK_THROWS_AS(trapping_lifetime(0.1, 0), DomainError);
  CHECK_THROWS_AS(metastable_rate(1.0, 1.5), DomainError);
}

TEST_CASE("scattering rate is the squared two-level sum") {
  const auto s = ytterbium171();
  const double wl = laser_angular_frequency(1064e-9);
  const double i = 1.2e12;
  double rate = 0.0;
  for (const auto& line : s.lines) {
    const double wa = line.angular_frequency;
    const double r = wl / wa;
    const double amp = line.linewidth / (wa - wl) + line.linewidth / (wa + wl);
    rate += 3.0 * std::numbers::pi * c::speed_of_light * c::speed_of_light /
            (2.0 * c::hbar * wa * wa * wa) * r * r * r * amp * amp;
  }
  const auto sr = scattering_rates(s, wl, i);
  CHECK(sr.gamma_off == doctest::Approx(rate * i).epsilon(1e-12));
  CHECK(sr.gamma_meta == doctest::Approx(sr.gamma_off * s.branch_ratio_meta).epsilon(1e-14));
  const auto est = estimate_lifetime(s, wl, i, 20);
  CHECK(est.tau == doctest::Approx(1.0 / (20.0 * sr.gamma_meta)).epsilon(1e-14));
  CHECK(scattering_rates(s, wl, 2.0 * i).gamma_off == doctest::Approx(2.0 * sr.gamma_off).epsilon(1e-14));
}

TEST_CASE("Langevin rate from the induced-dipole capture constant") {
  const auto s = ytterbium171();
  const auto h2 = hydrogen();
  CHECK(h2.mass == doctest::Approx(2.0 * c::atomic_mass_unit));
  const double alpha = 4.0 * std::numbers::pi * c::vacuum_permittivity * 0.787e-30;
  CHECK(h2.polarizability == doctest::Approx(alpha).epsilon(1e-14));
  const double p = 1e-9, temp = 300.0;  // 1e-11 mbar in Pa
  const double mu = s.mass * h2.mass / (s.mass + h2.mass);
  const double k = c::elementary_charge / (2.0 * c::vacuum_permittivity) * std::sqrt(alpha / mu);
  const double n = p / (c::boltzmann * temp);
  CHECK(langevin_rate(p, temp, h2.polarizability, h2.mass, s) == doctest::Approx(n * k).epsilon(1e-13));
  CHECK(langevin_rate(2.0 * p, temp, h2.polarizability, h2.mass, s) ==
        doctest::Approx(2.0 * n * k).epsilon(1e-13));
}

TEST_CASE("recoil energy and heating rate") {
  const auto s = ytterbium171();
  const double p = c::planck / 1064e-9;
  const auto rh = recoil_heating(1064e-9, s, 4.0);
  CHECK(rh.recoil_energy == doctest::Approx(p * p / (2.0 * s.mass)).epsilon(1e-14));
  CHECK(rh.rate == doctest::Approx(4.0 * rh.recoil_energy / c::boltzmann).epsilon(1e-14));
}

TEST_CASE("reports carry unit-suffixed keys") {
  const auto s = ytterbium171();
  const auto est = estimate_lifetime(s, laser_angular_frequency(1064e-9), 1e12, 10);
  const auto j = to_json(est);
  CHECK(j.contains("gamma_off_per_s"));
  CHECK(j.contains("tau_s"));
  const auto h = heating_report(s, hydrogen(), 1e-9, 300.0, 1064e-9, est.gamma_off);
  const auto hj = to_json(h);
  CHECK(hj.contains("langevin_rate_per_hour"));
  CHECK(hj.contains("recoil_energy_mk"));
  CHECK(to_json(LifetimeEstimate{0.0, 0.0, 3, INFINITY})["tau_s"].is_null());
}
