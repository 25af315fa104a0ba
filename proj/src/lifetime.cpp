#include "cavitrap/lifetime.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "cavitrap/constants.hpp"
#include "cavitrap/errors.hpp"

namespace cavitrap {

using std::numbers::pi;

ScatteringRates scattering_rates(const IonSpecies& species, double laser_angular_frequency,
                                 double intensity) {
  if (!(laser_angular_frequency > 0.0)) throw DomainError("laser frequency must be positive");
  if (!(intensity >= 0.0)) throw DomainError("intensity must be non-negative");
  const double c = constants::speed_of_light;
  const double wl = laser_angular_frequency;
  double per_intensity = 0.0;
  for (const auto& line : species.lines) {
    const double wa = line.angular_frequency;
    if (std::abs(wa - wl) <= 1e-6 * wa) {
      throw ResonanceError("laser frequency is within 1e-6 of an atomic transition");
    }
    const double ratio = wl / wa;
    const double lorentz = line.linewidth / (wa - wl) + line.linewidth / (wa + wl);
    per_intensity += 3.0 * pi * c * c / (2.0 * constants::hbar * wa * wa * wa) * ratio * ratio *
                     ratio * lorentz * lorentz;
  }
  ScatteringRates r;
  r.gamma_off = per_intensity * intensity;
  r.gamma_meta = metastable_rate(r.gamma_off, species.branch_ratio_meta);
  return r;
}

double metastable_rate(double gamma_off, double branch_ratio_meta) {
  if (!(gamma_off >= 0.0)) throw DomainError("scattering rate must be non-negative");
  if (!(branch_ratio_meta >= 0.0 && branch_ratio_meta <= 1.0)) {
    throw DomainError("branching fraction must lie in [0, 1]");
  }
  return gamma_off * branch_ratio_meta;
}

double trapping_lifetime(double gamma_meta, int n_ions) {
  if (n_ions < 1) throw DomainError("need at least one ion");
  if (!(gamma_meta >= 0.0)) throw DomainError("scattering rate must be non-negative");
  if (gamma_meta == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (gamma_meta * n_ions);
}

LifetimeEstimate estimate_lifetime(const IonSpecies& species, double laser_angular_frequency,
                                   double intensity, int n_ions) {
  const auto r = scattering_rates(species, laser_angular_frequency, intensity);
  return {r.gamma_off, r.gamma_meta, n_ions, trapping_lifetime(r.gamma_meta, n_ions)};
}

double polarizability_from_volume(double volume) {
  return 4.0 * pi * constants::vacuum_permittivity * volume;
}

GasSpecies gas_from_json(const nlohmann::json& j) {
  try {
    GasSpecies g;
    g.label = j.value("label", std::string("gas"));
    g.mass = j.at("mass_amu").get<double>() * constants::atomic_mass_unit;
    g.polarizability = polarizability_from_volume(j.at("polarizability_volume_a3").get<double>() * 1e-30);
    if (!(g.mass > 0.0) || !(g.polarizability > 0.0)) {
      throw ValidationError("gas mass and polarizability must be positive");
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("gas data: ") + e.what());
  }
}

GasSpecies load_gas(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open gas file " + path.string());
  try {
    return gas_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

GasSpecies hydrogen() { return load_gas(data_dir() / "h2.json"); }

double langevin_rate(double pressure, double temperature, double gas_polarizability,
                     double gas_mass, const IonSpecies& species) {
  if (!(pressure >= 0.0)) throw DomainError("pressure must be non-negative");
  if (!(temperature > 0.0) || !(gas_polarizability > 0.0) || !(gas_mass > 0.0)) {
    throw DomainError("temperature, polarizability and gas mass must be positive");
  }
  const double mu = gas_mass * species.mass / (gas_mass + species.mass);
  const double k_l = constants::elementary_charge / (2.0 * constants::vacuum_permittivity) *
                     std::sqrt(gas_polarizability / mu);
  const double density = pressure / (constants::boltzmann * temperature);
  return density * k_l;
}

RecoilHeating recoil_heating(double wavelength, const IonSpecies& species, double gamma_off) {
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
  if (!(gamma_off >= 0.0)) throw DomainError("scattering rate must be non-negative");
  const double p = constants::planck / wavelength;
  const double e = p * p / (2.0 * species.mass);
  return {e, gamma_off * e / constants::boltzmann};
}

HeatingReport heating_report(const IonSpecies& species, const GasSpecies& gas, double pressure,
                             double temperature, double wavelength, double gamma_off) {
  HeatingReport h;
  h.langevin_rate = langevin_rate(pressure, temperature, gas.polarizability, gas.mass, species);
  const auto rec = recoil_heating(wavelength, species, gamma_off);
  h.recoil_energy = rec.recoil_energy;
  h.recoil_heating_rate = rec.rate;
  h.background_pressure = pressure;
  h.gas_polarizability = gas.polarizability;
  h.gas_mass = gas.mass;
  h.temperature = temperature;
  return h;
}

nlohmann::json to_json(const LifetimeEstimate& e) {
  nlohmann::json j;
  j["gamma_off_per_s"] = e.gamma_off;
  j["gamma_meta_per_s"] = e.gamma_meta;
  j["n_ions"] = e.n_ions;
  // JSON has no infinity.
  j["tau_s"] = std::isfinite(e.tau) ? nlohmann::json(e.tau) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const HeatingReport& h) {
  return {{"langevin_rate_per_s", h.langevin_rate},
          {"langevin_rate_per_hour", h.langevin_rate * 3600.0},
          {"recoil_energy_j", h.recoil_energy},
          {"recoil_energy_mk", h.recoil_energy / constants::boltzmann * 1e3},
          {"recoil_heating_rate_k_per_s", h.recoil_heating_rate},
          {"background_pressure_pa", h.background_pressure},
          {"gas_polarizability_c_m2_per_v", h.gas_polarizability},
          {"gas_mass_kg", h.gas_mass},
          {"temperature_k", h.temperature},
          {"non_langevin_heating_bound_k_per_s", kNonLangevinHeatingBound}};
}

}  // namespace cavitrap
