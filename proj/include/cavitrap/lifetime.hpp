#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "cavitrap/species.hpp"

namespace cavitrap {

struct ScatteringRates {
  double gamma_off = 0.0;   // 1/s
  double gamma_meta = 0.0;  // 1/s
};

/// Off-resonant photon scattering rate at intensity I and its share into
/// metastable states.
ScatteringRates scattering_rates(const IonSpecies& species, double laser_angular_frequency,
                                 double intensity);

double metastable_rate(double gamma_off, double branch_ratio_meta);

/// tau = 1 / (gamma_meta N); +inf when gamma_meta = 0.
double trapping_lifetime(double gamma_meta, int n_ions);

struct LifetimeEstimate {
  double gamma_off = 0.0;   // 1/s
  double gamma_meta = 0.0;  // 1/s
  int n_ions = 0;
  double tau = 0.0;  // s
};

LifetimeEstimate estimate_lifetime(const IonSpecies& species, double laser_angular_frequency,
                                   double intensity, int n_ions);

struct GasSpecies {
  std::string label;
  double mass = 0.0;            // kg
  double polarizability = 0.0;  // C m^2 / V
};

/// 4 pi eps0 * volume, volume in m^3.
double polarizability_from_volume(double volume);

/// {label?, mass_amu, polarizability_volume_a3}.
GasSpecies gas_from_json(const nlohmann::json& j);
GasSpecies load_gas(const std::filesystem::path& path);
/// H2 from data/h2.json.
GasSpecies hydrogen();

/// n k_L with n = P / (k_B T) and k_L = (e / (2 eps0)) sqrt(alpha / mu_red).
double langevin_rate(double pressure, double temperature, double gas_polarizability,
                     double gas_mass, const IonSpecies& species);

struct RecoilHeating {
  double recoil_energy = 0.0;  // J
  double rate = 0.0;           // K/s
};

/// E_rec = (h / lambda)^2 / (2 m); rate = gamma_off E_rec / k_B.
RecoilHeating recoil_heating(double wavelength, const IonSpecies& species, double gamma_off);

/// Heating from non-Langevin collisions is only bounded, not modelled.
inline constexpr double kNonLangevinHeatingBound = 1e-4;  // K/s

struct HeatingReport {
  double langevin_rate = 0.0;        // 1/s
  double recoil_energy = 0.0;        // J
  double recoil_heating_rate = 0.0;  // K/s
  double background_pressure = 0.0;  // Pa
  double gas_polarizability = 0.0;   // C m^2 / V
  double gas_mass = 0.0;             // kg
  double temperature = 0.0;          // K
};

HeatingReport heating_report(const IonSpecies& species, const GasSpecies& gas, double pressure,
                             double temperature, double wavelength, double gamma_off);

nlohmann::json to_json(const LifetimeEstimate& e);
nlohmann::json to_json(const HeatingReport& h);

}  // namespace cavitrap
