#include "cavitrap/species.hpp"

#include <fstream>

#include "cavitrap/constants.hpp"
#include "cavitrap/errors.hpp"

namespace cavitrap {

AtomicLine AtomicLine::from_wavelength(double wavelength_m, double linewidth_hz) {
  if (!(wavelength_m > 0.0) || !(linewidth_hz > 0.0)) {
    throw ValidationError("atomic line needs positive wavelength and linewidth");
  }
  return {constants::two_pi * constants::speed_of_light / wavelength_m,
          constants::two_pi * linewidth_hz};
}

double AtomicLine::wavelength() const {
  return constants::two_pi * constants::speed_of_light / angular_frequency;
}

void IonSpecies::validate() const {
  if (!(mass > 0.0)) throw ValidationError("species mass must be positive");
  if (lines.empty()) throw ValidationError("species needs at least one atomic line");
  if (!(branch_ratio_meta >= 0.0 && branch_ratio_meta <= 1.0)) {
    throw ValidationError("branch_ratio_meta must lie in [0, 1]");
  }
  for (const auto& line : lines) {
    if (!(line.angular_frequency > 0.0) || !(line.linewidth > 0.0)) {
      throw ValidationError("atomic line frequencies must be positive");
    }
    if (line.linewidth / line.angular_frequency >= 1e-6) {
      throw ValidationError("atomic linewidth is not small compared to the transition frequency");
    }
  }
}

IonSpecies species_from_json(const nlohmann::json& j) {
  try {
    IonSpecies s;
    s.label = j.value("label", std::string("ion"));
    s.mass = j.at("mass_amu").get<double>() * constants::atomic_mass_unit;
    for (const auto& line : j.at("lines")) {
      s.lines.push_back(AtomicLine::from_wavelength(line.at("wavelength_nm").get<double>() * 1e-9,
                                                    line.at("linewidth_mhz").get<double>() * 1e6));
    }
    s.branch_ratio_meta = j.at("branch_ratio_meta").get<double>();
    s.metastable_lifetime = j.at("metastable_lifetime_ms").get<double>() * 1e-3;
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("species file: ") + e.what());
  }
}

nlohmann::json species_to_json(const IonSpecies& s) {
  nlohmann::json lines = nlohmann::json::array();
  for (const auto& line : s.lines) {
    lines.push_back({{"wavelength_nm", line.wavelength() * 1e9},
                     {"linewidth_mhz", line.linewidth / constants::two_pi * 1e-6}});
  }
  return {{"label", s.label},
          {"mass_amu", s.mass / constants::atomic_mass_unit},
          {"lines", lines},
          {"branch_ratio_meta", s.branch_ratio_meta},
          {"metastable_lifetime_ms", s.metastable_lifetime * 1e3}};
}

IonSpecies load_species(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open species file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("species file " + path.string() + ": " + e.what());
  }
  return species_from_json(j);
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("CAVITRAP_DATA_DIR")) return env;
  return CAVITRAP_DATA_DIR;
}

IonSpecies ytterbium171() { return load_species(data_dir() / "yb171.json"); }

}  // namespace cavitrap
