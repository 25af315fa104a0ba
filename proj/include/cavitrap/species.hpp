#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cavitrap {

/// One dipole transition out of the ground state.
struct AtomicLine {
  double angular_frequency;  // omega_a, rad/s
  double linewidth;          // Gamma_a, rad/s

  static AtomicLine from_wavelength(double wavelength_m, double linewidth_hz);
  double wavelength() const;
};

struct IonSpecies {
  std::string label;
  double mass;  // kg
  std::vector<AtomicLine> lines;
  double branch_ratio_meta;    // fraction of scattering events ending in a metastable state
  double metastable_lifetime;  // s

  /// Throws ValidationError when an invariant is violated.
  void validate() const;
};

/// Parses the species JSON schema
/// {label?, mass_amu, lines: [{wavelength_nm, linewidth_mhz}], branch_ratio_meta,
///  metastable_lifetime_ms}.
IonSpecies species_from_json(const nlohmann::json& j);
nlohmann::json species_to_json(const IonSpecies& s);
IonSpecies load_species(const std::filesystem::path& path);

/// 171Yb+ with the effective line data shipped in data/yb171.json.
IonSpecies ytterbium171();

std::filesystem::path data_dir();

}  // namespace cavitrap
