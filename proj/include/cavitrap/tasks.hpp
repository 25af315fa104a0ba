#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cavitrap/config.hpp"
#include "cavitrap/io.hpp"

namespace cavitrap {

struct RunManifest {
  std::string task;
  std::string config_hash;  // SHA-256 of the canonical config JSON
  std::string code_version;
  double wall_time = 0.0;  // s
  std::vector<std::string> outputs;  // relative to the output directory
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

std::string code_version();

/// Runs one task and writes its artifacts plus manifest.json into out_dir.
RunManifest run_task(Task task, const ExperimentConfig& cfg,
                     const std::filesystem::path& config_dir,
                     const std::filesystem::path& out_dir);

struct TableOneOptions {
  std::vector<int> n_values{5, 10, 20, 30};
  std::vector<double> waists;  // m, one per N; empty selects by the asymptote rule
  std::vector<double> w0_over_rmax_grid;  // empty: 1.0, 1.1, ..., 20.0
  double asymptote_tolerance = 0.02;
  int n_restarts = 50;
  std::uint64_t seed = 0;
};

struct TableOneColumn {
  int n_ions = 0;
  std::optional<std::vector<int>> rings;
  std::optional<double> d_min;      // m
  std::optional<double> r_max;      // m
  std::optional<double> waist;      // m
  std::optional<double> alpha_tr;
  std::optional<double> depth;      // J
  std::optional<double> intensity;  // W/m^2
  std::optional<double> power;      // W
  std::optional<double> gamma_off;  // 1/s
  std::vector<std::string> errors;
};

/// Geometry, waist, minimum depth, intensity, power and scattering rate per N.
/// A failing step leaves its cell and everything depending on it empty.
std::vector<TableOneColumn> table_one(const IonSpecies& species, const TrapConfig& trap,
                                      const TableOneOptions& options);

/// Rows in the reference table order; empty cells read "ERROR".
io::CsvTable table_one_csv(const std::vector<TableOneColumn>& columns, const TrapConfig& trap);

nlohmann::json table_one_json(const std::vector<TableOneColumn>& columns);

std::string format_rings(const std::vector<int>& counts);

}  // namespace cavitrap
