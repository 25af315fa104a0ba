#include "cavitrap/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <vector>

#include "cavitrap/constants.hpp"
#include "cavitrap/errors.hpp"
#include "cavitrap/io.hpp"

namespace cavitrap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<std::pair<Task, const char*>, 8> kTaskNames{{
    {Task::Equilibrate, "Equilibrate"},
    {Task::Modes, "Modes"},
    {Task::TransitionScan, "TransitionScan"},
    {Task::WaistScan, "WaistScan"},
    {Task::Barrier, "Barrier"},
    {Task::Spin, "Spin"},
    {Task::Lifetime, "Lifetime"},
    {Task::TableOne, "TableOne"},
}};

std::string squash(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '_' || c == '-') continue;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

enum class Kind { Int, Number, String, IntList, NumberList };

struct ParamSpec {
  const char* name;
  Kind kind;
  bool required;
};

const std::map<Task, std::vector<ParamSpec>>& param_table() {
  static const std::map<Task, std::vector<ParamSpec>> table{
      {Task::Equilibrate, {{"n_ions", Kind::Int, true}, {"n_restarts", Kind::Int, false}}},
      {Task::Modes,
       {{"n_ions", Kind::Int, true},
        {"n_restarts", Kind::Int, false},
        {"config_index", Kind::Int, false}}},
      {Task::TransitionScan, {{"n_values", Kind::IntList, false}, {"n_restarts", Kind::Int, false}}},
      {Task::WaistScan,
       {{"n_ions", Kind::Int, true},
        {"n_restarts", Kind::Int, false},
        {"w0_over_rmax", Kind::NumberList, false},
        {"waists_um", Kind::NumberList, false}}},
      {Task::Barrier,
       {{"n_ions", Kind::Int, true},
        {"n_restarts", Kind::Int, false},
        {"from_index", Kind::Int, false},
        {"to_index", Kind::Int, false},
        {"n_paths", Kind::Int, false},
        {"n_samples", Kind::Int, false},
        {"step_um", Kind::Number, false},
        {"neighborhood_um", Kind::Number, false},
        {"walk_temperature_mk", Kind::Number, false},
        {"max_iterations", Kind::Int, false},
        {"max_batches", Kind::Int, false}}},
      {Task::Spin,
       {{"n_ions", Kind::Int, true},
        {"n_restarts", Kind::Int, false},
        {"config_index", Kind::Int, false},
        {"mu_mhz", Kind::Number, false},
        {"mu_over_max", Kind::Number, false},
        {"sweep_mu_over_max", Kind::NumberList, false},
        {"rabi_mhz", Kind::Number, false},
        {"recoil_energy_hz", Kind::Number, false},
        {"mode_partition", Kind::String, false}}},
      {Task::Lifetime,
       {{"n_ions", Kind::Int, true},
        {"intensity_w_per_m2", Kind::Number, false},
        {"gamma_off_per_s", Kind::Number, false},
        {"pressure_mbar", Kind::Number, false},
        {"temperature_k", Kind::Number, false},
        {"gas_file", Kind::String, false}}},
      {Task::TableOne,
       {{"n_values", Kind::IntList, false},
        {"waists_um", Kind::NumberList, false},
        {"n_restarts", Kind::Int, false},
        {"w0_over_rmax", Kind::NumberList, false},
        {"asymptote_tolerance", Kind::Number, false}}},
  };
  return table;
}

bool matches(const json& v, Kind k) {
  auto is_int = [](const json& x) { return x.is_number_integer(); };
  switch (k) {
    case Kind::Int: return is_int(v);
    case Kind::Number: return v.is_number();
    case Kind::String: return v.is_string();
    case Kind::IntList: return v.is_array() && std::all_of(v.begin(), v.end(), is_int);
    case Kind::NumberList:
      return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); });
  }
  return false;
}

double get_number(const json& obj, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ParseError(std::string("'") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(std::string("'") + key + "' must be finite");
  return x;
}

std::optional<double> get_optional(const json& obj, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  return get_number(obj, key);
}

const std::array<const char*, 10> kTrapKeys{"omega_r_mhz", "anisotropy", "wavelength_nm",
                                            "waist_um",    "lattice",    "finesse",
                                            "depth_mk",    "aspect_ratio", "omega_z_mhz",
                                            "power_w"};

const std::array<const char*, 6> kTopKeys{"species_file", "trap", "task", "task_params", "seed",
                                          "output_dir"};

template <std::size_t K>
void reject_unknown(const json& obj, const std::array<const char*, K>& allowed, const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return it.key() == a; })) {
      throw ValidationError(std::string("unknown key '") + it.key() + "' in " + where);
    }
  }
}

TrapSettings parse_trap(const json& t) {
  if (!t.is_object()) throw ParseError("'trap' must be an object");
  reject_unknown(t, kTrapKeys, "trap");
  TrapSettings s;
  if (!t.contains("omega_r_mhz")) throw ValidationError("trap.omega_r_mhz is required");
  s.omega_r_mhz = get_number(t, "omega_r_mhz");
  if (t.contains("anisotropy")) s.anisotropy = get_number(t, "anisotropy");
  if (t.contains("wavelength_nm")) s.wavelength_nm = get_number(t, "wavelength_nm");
  if (t.contains("waist_um")) s.waist_um = get_number(t, "waist_um");
  if (t.contains("finesse")) s.finesse = get_number(t, "finesse");
  if (t.contains("lattice")) {
    if (!t["lattice"].is_string()) throw ParseError("trap.lattice must be a string");
    s.lattice = t["lattice"].get<std::string>();
  }
  s.depth_mk = get_optional(t, "depth_mk");
  s.aspect_ratio = get_optional(t, "aspect_ratio");
  s.omega_z_mhz = get_optional(t, "omega_z_mhz");
  s.power_w = get_optional(t, "power_w");

  if (!(s.omega_r_mhz > 0.0)) throw ValidationError("trap.omega_r_mhz must be positive");
  if (!(s.anisotropy > -1.0)) throw ValidationError("trap.anisotropy must exceed -1");
  if (!(s.wavelength_nm > 0.0) || !(s.waist_um > 0.0)) {
    throw ValidationError("trap wavelength and waist must be positive");
  }
  if (!(s.finesse > 0.0)) throw ValidationError("trap.finesse must be positive");
  if (s.lattice != "node_sin2" && s.lattice != "antinode_cos2") {
    throw ValidationError("trap.lattice must be node_sin2 or antinode_cos2");
  }
  const int n_depth = s.depth_mk.has_value() + s.aspect_ratio.has_value() +
                      s.omega_z_mhz.has_value() + s.power_w.has_value();
  if (n_depth > 1) {
    throw ValidationError("give at most one of depth_mk, aspect_ratio, omega_z_mhz, power_w");
  }
  for (const auto& v : {s.depth_mk, s.aspect_ratio, s.omega_z_mhz, s.power_w}) {
    if (v && !(*v >= 0.0)) throw ValidationError("trap depth settings must be non-negative");
  }
  return s;
}

json trap_to_json(const TrapSettings& s) {
  json t{{"omega_r_mhz", s.omega_r_mhz}, {"anisotropy", s.anisotropy},
         {"wavelength_nm", s.wavelength_nm}, {"waist_um", s.waist_um},
         {"lattice", s.lattice},           {"finesse", s.finesse}};
  if (s.depth_mk) t["depth_mk"] = *s.depth_mk;
  if (s.aspect_ratio) t["aspect_ratio"] = *s.aspect_ratio;
  if (s.omega_z_mhz) t["omega_z_mhz"] = *s.omega_z_mhz;
  if (s.power_w) t["power_w"] = *s.power_w;
  return t;
}

}  // namespace

const char* to_string(Task t) {
  for (const auto& [task, name] : kTaskNames) {
    if (task == t) return name;
  }
  return "?";
}

std::optional<Task> task_from_string(std::string_view name) {
  const std::string key = squash(name);
  for (const auto& [task, label] : kTaskNames) {
    if (squash(label) == key) return task;
  }
  return std::nullopt;
}

void validate_task_params(Task task, const json& params) {
  if (!params.is_object()) throw ParseError("'task_params' must be an object");
  const auto& specs = param_table().at(task);
  for (auto it = params.begin(); it != params.end(); ++it) {
    auto entry = std::find_if(specs.begin(), specs.end(),
                             [&](const ParamSpec& s) { return it.key() == s.name; });
    if (entry == specs.end()) {
      throw ValidationError("task " + std::string(to_string(task)) + " does not accept '" +
                            it.key() + "'");
    }
    if (!matches(it.value(), entry->kind)) {
      throw ParseError("task_params." + it.key() + " has the wrong type");
    }
  }
  for (const auto& s : specs) {
    if (s.required && !params.contains(s.name)) {
      throw ValidationError("task " + std::string(to_string(task)) + " requires task_params." +
                            s.name);
    }
  }
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  reject_unknown(j, kTopKeys, "config");

  ExperimentConfig cfg;
  if (j.contains("species_file")) {
    if (!j["species_file"].is_string()) throw ParseError("'species_file' must be a string");
    cfg.species_file = j["species_file"].get<std::string>();
  }
  if (!j.contains("trap")) throw ValidationError("'trap' is required");
  cfg.trap = parse_trap(j["trap"]);
  if (j.contains("task")) {
    if (!j["task"].is_string()) throw ParseError("'task' must be a string");
    cfg.task = task_from_string(j["task"].get<std::string>());
    if (!cfg.task) throw ValidationError("unknown task '" + j["task"].get<std::string>() + "'");
  }
  if (j.contains("task_params")) {
    if (!j["task_params"].is_object()) throw ParseError("'task_params' must be an object");
    cfg.task_params = j["task_params"];
  }
  if (j.contains("seed")) {
    const auto& s = j["seed"];
    if (!s.is_number_integer()) throw ParseError("'seed' must be an integer");
    if (s.is_number_unsigned()) {
      cfg.seed = s.get<std::uint64_t>();
    } else {
      if (s.get<std::int64_t>() < 0) throw ValidationError("'seed' must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(s.get<std::int64_t>());
    }
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) throw ParseError("'output_dir' must be a string");
    cfg.output_dir = j["output_dir"].get<std::string>();
  }
  if (cfg.task) validate_task_params(*cfg.task, cfg.task_params);
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) { return parse_config(io::read_text(path)); }

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  if (!cfg.species_file.empty()) j["species_file"] = cfg.species_file;
  j["trap"] = trap_to_json(cfg.trap);
  if (cfg.task) j["task"] = to_string(*cfg.task);
  j["task_params"] = cfg.task_params;
  j["seed"] = cfg.seed;
  if (!cfg.output_dir.empty()) j["output_dir"] = cfg.output_dir;
  return j;
}

IonSpecies resolve_species(const ExperimentConfig& cfg, const fs::path& base_dir) {
  if (cfg.species_file.empty()) return ytterbium171();
  const fs::path p(cfg.species_file);
  if (p.is_absolute()) return load_species(p);
  if (fs::exists(base_dir / p)) return load_species(base_dir / p);
  if (fs::exists(data_dir() / p)) return load_species(data_dir() / p);
  throw ValidationError("species file not found: " + cfg.species_file);
}

TrapConfig make_trap(const TrapSettings& s, const IonSpecies& species) {
  const double wx = constants::two_pi * s.omega_r_mhz * 1e6;
  const auto variant =
      s.lattice == "antinode_cos2" ? LatticeVariant::AntinodeCos2 : LatticeVariant::NodeSin2;
  const double waist = s.waist_um * 1e-6;
  const double wavelength = s.wavelength_nm * 1e-9;
  const OpticalTrapConfig optical(wavelength, waist, 0.0, variant, s.finesse, s.power_w.value_or(0.0));
  const TrapConfig base(wx, s.anisotropy, optical);
  double depth = 0.0;
  if (s.depth_mk) {
    depth = *s.depth_mk * 1e-3 * constants::boltzmann;
  } else if (s.aspect_ratio) {
    depth = depth_for_aspect_ratio(*s.aspect_ratio, base, species);
  } else if (s.omega_z_mhz) {
    depth = depth_for_omega_z(constants::two_pi * *s.omega_z_mhz * 1e6, base, species);
  } else if (s.power_w) {
    const double intensity = intensity_from_power(*s.power_w, s.finesse, waist);
    depth = trap_depth(species, laser_angular_frequency(wavelength), intensity);
  }
  return base.with_depth(depth);
}

int param_int(const json& p, const char* key, int fallback) {
  return p.contains(key) ? p.at(key).get<int>() : fallback;
}

double param_double(const json& p, const char* key, double fallback) {
  return p.contains(key) ? p.at(key).get<double>() : fallback;
}

std::string param_string(const json& p, const char* key, const std::string& fallback) {
  return p.contains(key) ? p.at(key).get<std::string>() : fallback;
}

std::vector<int> param_int_list(const json& p, const char* key, std::vector<int> fallback) {
  return p.contains(key) ? p.at(key).get<std::vector<int>>() : fallback;
}

std::vector<double> param_double_list(const json& p, const char* key, std::vector<double> fallback) {
  return p.contains(key) ? p.at(key).get<std::vector<double>>() : fallback;
}

}  // namespace cavitrap
