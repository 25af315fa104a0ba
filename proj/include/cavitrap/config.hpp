#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "cavitrap/species.hpp"
#include "cavitrap/trap.hpp"

namespace cavitrap {

enum class Task { Equilibrate, Modes, TransitionScan, WaistScan, Barrier, Spin, Lifetime, TableOne };

const char* to_string(Task t);
/// Case-insensitive; underscores and dashes are ignored.
std::optional<Task> task_from_string(std::string_view name);

/// Trap block in laboratory units. At most one of depth_mk, aspect_ratio,
/// omega_z_mhz and power_w fixes the lattice depth; none means depth 0.
struct TrapSettings {
  double omega_r_mhz = 0.0;  // omega_x^DC / 2 pi
  double anisotropy = 0.0;
  double wavelength_nm = 1064.0;
  double waist_um = 100.0;
  std::string lattice = "node_sin2";  // or "antinode_cos2"
  double finesse = 3000.0;
  std::optional<double> depth_mk;
  std::optional<double> aspect_ratio;
  std::optional<double> omega_z_mhz;
  std::optional<double> power_w;

  bool operator==(const TrapSettings&) const = default;
};

struct ExperimentConfig {
  std::string species_file;  // empty: bundled 171Yb+
  TrapSettings trap;
  std::optional<Task> task;
  nlohmann::json task_params = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string output_dir;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ParseError for malformed JSON or wrongly typed values and
/// ValidationError for missing, unknown or out-of-range keys.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Checks task_params against the keys the task accepts.
void validate_task_params(Task task, const nlohmann::json& params);

/// Relative paths are tried against base_dir, then the bundled data directory.
IonSpecies resolve_species(const ExperimentConfig& cfg, const std::filesystem::path& base_dir);

TrapConfig make_trap(const TrapSettings& settings, const IonSpecies& species);

// Typed task_params accessors; absent keys yield the fallback.
int param_int(const nlohmann::json& p, const char* key, int fallback);
double param_double(const nlohmann::json& p, const char* key, double fallback);
std::string param_string(const nlohmann::json& p, const char* key, const std::string& fallback);
std::vector<int> param_int_list(const nlohmann::json& p, const char* key, std::vector<int> fallback);
std::vector<double> param_double_list(const nlohmann::json& p, const char* key,
                                      std::vector<double> fallback);

}  // namespace cavitrap
