#include "cavitrap/tasks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "cavitrap/barrier.hpp"
#include "cavitrap/constants.hpp"
#include "cavitrap/errors.hpp"
#include "cavitrap/lifetime.hpp"
#include "cavitrap/modes.hpp"
#include "cavitrap/spin.hpp"
#include "cavitrap/transition.hpp"

#ifndef CAVITRAP_VERSION
#define CAVITRAP_VERSION "0.0.0"
#endif

namespace cavitrap {

namespace fs = std::filesystem;
using nlohmann::json;
using io::format_double;

namespace {

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

double to_mk(double joules) { return joules / constants::boltzmann * 1e3; }

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

class Context {
 public:
  Context(const ExperimentConfig& cfg, const fs::path& config_dir, fs::path out)
      : cfg(cfg),
        params(cfg.task_params),
        species(resolve_species(cfg, config_dir)),
        trap(make_trap(cfg.trap, species)),
        config_dir(config_dir),
        out_dir(std::move(out)) {}

  void write(const std::string& name, const std::string& text) {
    io::write_text_atomic(out_dir / name, text);
    outputs.push_back(name);
  }
  void write(const std::string& name, const io::CsvTable& table) { write(name, table.str()); }
  void write(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  std::vector<EquilibriumResult> equilibria(int n) const {
    if (n < 1) throw ValidationError("n_ions must be at least 1");
    return find_equilibria(n, trap, species, n_restarts(), cfg.seed);
  }

  int n_restarts() const {
    const int r = param_int(params, "n_restarts", 50);
    if (r < 1) throw ValidationError("n_restarts must be positive");
    return r;
  }

  const EquilibriumResult& pick(const std::vector<EquilibriumResult>& eqs, const char* key) const {
    const int idx = param_int(params, key, 0);
    if (idx < 0) throw ValidationError(std::string(key) + " must be non-negative");
    if (static_cast<std::size_t>(idx) >= eqs.size()) {
      throw DomainError("only " + std::to_string(eqs.size()) + " distinct minima were found; " +
                        key + " = " + std::to_string(idx) + " is unavailable");
    }
    return eqs[static_cast<std::size_t>(idx)];
  }

  const ExperimentConfig& cfg;
  const json& params;
  IonSpecies species;
  TrapConfig trap;
  fs::path config_dir;
  fs::path out_dir;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
};

json equilibrium_json(const EquilibriumResult& eq, std::size_t index, double ground) {
  return {{"config_index", index},
          {"n_ions", eq.positions.n_ions()},
          {"stability", to_string(eq.stability)},
          {"energy_j", eq.energy},
          {"energy_above_stable_mk", to_mk(eq.energy - ground)},
          {"ring_configuration", eq.rings.counts},
          {"ring_ambiguous", eq.rings.ambiguous},
          {"r_max_m", eq.r_max},
          {"d_min_m", nullable(eq.d_min)},
          {"n_duplicates", eq.n_found_duplicates},
          {"gradient_norm_n", eq.gradient_norm}};
}

void run_equilibrate(Context& ctx) {
  const int n = param_int(ctx.params, "n_ions", 0);
  const auto eqs = ctx.equilibria(n);
  const double ground = eqs.front().energy;
  io::CsvTable summary({"config_index", "stability", "energy_j", "energy_above_stable_mk",
                        "ring_configuration", "r_max_m", "d_min_m", "n_duplicates"});
  for (std::size_t k = 0; k < eqs.size(); ++k) {
    const auto& eq = eqs[k];
    summary.row({std::to_string(k), to_string(eq.stability), format_double(eq.energy),
                 format_double(to_mk(eq.energy - ground)), format_rings(eq.rings.counts),
                 format_double(eq.r_max), format_double(eq.d_min),
                 std::to_string(eq.n_found_duplicates)});
    if (eq.rings.ambiguous) {
      ctx.warnings.push_back("ring assignment of configuration " + std::to_string(k) +
                             " is ambiguous");
    }
    io::CsvTable pos({"ion_index", "x_m", "y_m"});
    for (int i = 0; i < eq.positions.n_ions(); ++i) {
      pos.row({std::to_string(i), format_double(eq.positions.x(i)), format_double(eq.positions.y(i))});
    }
    ctx.write("equilibrium_" + std::to_string(k) + ".csv", pos);
    ctx.write("equilibrium_" + std::to_string(k) + ".json", equilibrium_json(eq, k, ground));
  }
  ctx.write("equilibria.csv", summary);
}

void run_modes(Context& ctx) {
  const int n = param_int(ctx.params, "n_ions", 0);
  const auto eqs = ctx.equilibria(n);
  const auto& eq = ctx.pick(eqs, "config_index");
  const auto spectrum = label_modes(normal_modes(eq, ctx.trap, ctx.species), eq.positions);
  io::CsvTable table({"mode_index", "partition", "frequency_hz", "imaginary", "label"});
  json vectors = json::array();
  json com = nullptr;
  for (std::size_t k = 0; k < spectrum.modes.size(); ++k) {
    const auto& m = spectrum.modes[k];
    table.row({std::to_string(k), to_string(m.partition),
               format_double(m.frequency / constants::two_pi), m.imaginary ? "true" : "false",
               to_string(m.label)});
    vectors.push_back(std::vector<double>(m.vector.data(), m.vector.data() + m.vector.size()));
    if (m.label == ModeLabel::COM && com.is_null()) com = amplitude_ratio(m);
    if (m.imaginary) {
      ctx.warnings.push_back("mode " + std::to_string(k) + " is imaginary; the crystal is not planar-stable");
    }
  }
  ctx.write("modes.csv", table);
  ctx.write("modes_eigenvectors.json",
            json{{"n_ions", n},
                 {"config_index", param_int(ctx.params, "config_index", 0)},
                 {"coordinate_order", "x0,y0,z0,x1,y1,z1,..."},
                 {"mass_weighted", true},
                 {"com_amplitude_ratio", com},
                 {"vectors", vectors}});
}

std::vector<std::string> transition_row(const TransitionPoint& p) {
  return {std::to_string(p.n_ions), format_double(p.waist), format_double(p.w0_over_rmax),
          format_double(p.alpha_tr), to_string(p.stability)};
}

const std::vector<std::string> kTransitionHeader{"n_ions", "w0_m", "w0_over_rmax", "alpha_tr",
                                                 "stability"};

void run_transition_scan(Context& ctx) {
  std::vector<int> ns = param_int_list(ctx.params, "n_values", {});
  if (ns.empty()) {
    for (int n = 30; n <= 120; n += 10) ns.push_back(n);
  }
  for (int n : ns) {
    if (n < 1) throw ValidationError("n_values entries must be positive");
  }
  const auto points = n_sweep(ns, ctx.trap, ctx.species, {ctx.n_restarts(), ctx.cfg.seed});
  io::CsvTable table(kTransitionHeader);
  std::vector<std::pair<double, double>> fit_points;
  for (const auto& p : points) {
    table.row(transition_row(p));
    if (p.alpha_tr > 0.0) fit_points.emplace_back(p.n_ions, p.alpha_tr);
  }
  ctx.write("transition_scan.csv", table);
  try {
    const auto fit = fit_power_law(fit_points);
    ctx.write("transition_fit.json",
              json{{"prefactor", fit.prefactor}, {"exponent", fit.exponent}, {"residual", fit.residual}});
  } catch (const FitError& e) {
    ctx.warnings.push_back(std::string("no power-law fit: ") + e.what());
  }
}

std::vector<double> default_ratio_grid() {
  std::vector<double> g;
  for (int k = 10; k <= 200; ++k) g.push_back(k / 10.0);
  return g;
}

void run_waist_scan(Context& ctx) {
  const int n = param_int(ctx.params, "n_ions", 0);
  if (ctx.params.contains("waists_um") && ctx.params.contains("w0_over_rmax")) {
    throw ValidationError("give either waists_um or w0_over_rmax, not both");
  }
  const auto eqs = ctx.equilibria(n);
  const auto& eq = eqs.front();
  std::vector<double> waists;
  if (ctx.params.contains("waists_um")) {
    for (double w : param_double_list(ctx.params, "waists_um", {})) waists.push_back(w * 1e-6);
  } else {
    if (!(eq.r_max > 0.0)) throw DomainError("crystal radius is zero; give waists_um");
    for (double r : param_double_list(ctx.params, "w0_over_rmax", default_ratio_grid())) {
      waists.push_back(r * eq.r_max);
    }
  }
  for (double w : waists) {
    if (!(w > 0.0)) throw ValidationError("waists must be positive");
  }
  const auto entries = alpha_tr_vs_waist(eq, ctx.trap, ctx.species, waists);
  io::CsvTable table(kTransitionHeader);
  for (const auto& e : entries) {
    if (e.point) {
      table.row(transition_row(*e.point));
    } else {
      ctx.warnings.push_back("waist " + format_double(e.waist) + " m failed: " + e.error);
    }
  }
  ctx.write("waist_scan.csv", table);
  const double asym = alpha_tr_uniform(eq.positions, ctx.trap, ctx.species);
  const auto pick = choose_waist(entries, asym);
  ctx.write("waist_scan.json",
            json{{"n_ions", n},
                 {"r_max_m", eq.r_max},
                 {"alpha_tr_uniform", asym},
                 {"chosen_w0_m", pick ? json(entries[*pick].waist) : json(nullptr)},
                 {"chosen_alpha_tr", pick ? json(entries[*pick].point->alpha_tr) : json(nullptr)}});
}

json write_barrier_direction(Context& ctx, const std::string& tag,
                             const std::vector<BarrierPath>& paths) {
  json per_path = json::array();
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const auto& p = paths[k];
    const auto dist = p.distances_to(p.target);
    const auto arc = p.arc_length_coordinate();
    const double last = static_cast<double>(std::max<std::size_t>(p.points.size() - 1, 1));
    io::CsvTable table({"step", "distance_to_final_m", "energy_j", "energy_mk",
                        "path_coordinate_arc", "path_coordinate_step"});
    for (std::size_t s = 0; s < p.points.size(); ++s) {
      table.row({std::to_string(s), format_double(dist[s]), format_double(p.energies[s]),
                 format_double(to_mk(p.energies[s] - p.start_energy)), format_double(arc[s]),
                 format_double(static_cast<double>(s) / last)});
    }
    ctx.write("barrier_" + tag + "_path_" + std::to_string(k) + ".csv", table);
    per_path.push_back({{"path_index", k},
                        {"converged", p.converged},
                        {"n_steps", p.points.size() - 1},
                        {"peak_mk", to_mk(p.peak_energy - p.start_energy)}});
  }
  json out{{"paths", per_path}};
  try {
    const auto bound = barrier_upper_bound(paths);
    out["bound_mk"] = bound.barrier * 1e3;
    out["best_path"] = bound.best_index;
  } catch (const SamplingError& e) {
    out["bound_mk"] = nullptr;
    out["best_path"] = nullptr;
    ctx.warnings.push_back(tag + ": " + e.what());
  }
  return out;
}

void run_barrier(Context& ctx) {
  const int n = param_int(ctx.params, "n_ions", 0);
  const auto eqs = ctx.equilibria(n);
  json p = ctx.params;
  if (!p.contains("to_index")) p["to_index"] = 1;
  const auto& from = ctx.pick(eqs, "from_index");
  const int to_idx = p["to_index"].get<int>();
  if (to_idx < 0 || static_cast<std::size_t>(to_idx) >= eqs.size()) {
    throw DomainError("only " + std::to_string(eqs.size()) +
                      " distinct minima were found; to_index is unavailable");
  }
  const auto& to = eqs[static_cast<std::size_t>(to_idx)];
  if (&from == &to) throw ValidationError("from_index and to_index must differ");

  BarrierWalkParams w;
  w.step = param_double(ctx.params, "step_um", 0.0) * 1e-6;
  w.neighborhood = param_double(ctx.params, "neighborhood_um", 0.0) * 1e-6;
  w.n_samples = param_int(ctx.params, "n_samples", w.n_samples);
  w.temperature = param_double(ctx.params, "walk_temperature_mk", w.temperature * 1e3) * 1e-3;
  w.n_paths = param_int(ctx.params, "n_paths", w.n_paths);
  w.max_iterations = param_int(ctx.params, "max_iterations", 0);
  w.max_batches = param_int(ctx.params, "max_batches", w.max_batches);
  w.seed = ctx.cfg.seed;
  if (w.step < 0.0 || w.neighborhood < 0.0 || w.max_iterations < 0) {
    throw ValidationError("barrier walk lengths must be non-negative");
  }

  const auto forward = optimize_paths(from, to, w, ctx.trap, ctx.species);
  const auto reverse = optimize_paths(to, from, w, ctx.trap, ctx.species);
  const double dist = (forward.front().target - from.positions.planar()).norm();
  const auto resolved = w.resolve(dist);
  json summary{{"n_ions", n},
               {"from_index", param_int(ctx.params, "from_index", 0)},
               {"to_index", to_idx},
               {"from_stability", to_string(from.stability)},
               {"to_stability", to_string(to.stability)},
               {"from_rings", from.rings.counts},
               {"to_rings", to.rings.counts},
               {"energy_difference_mk", to_mk(to.energy - from.energy)},
               {"endpoint_distance_m", dist},
               {"walk",
                {{"step_m", resolved.step},
                 {"neighborhood_m", resolved.neighborhood},
                 {"n_samples", resolved.n_samples},
                 {"temperature_k", resolved.temperature},
                 {"n_paths", resolved.n_paths},
                 {"max_iterations", resolved.max_iterations},
                 {"max_batches", resolved.max_batches},
                 {"seed", resolved.seed}}}};
  summary["forward"] = write_barrier_direction(ctx, "forward", forward);
  summary["reverse"] = write_barrier_direction(ctx, "reverse", reverse);
  ctx.write("barrier.json", summary);
}

std::vector<double> default_mu_ratios() {
  std::vector<double> r;
  for (int k = -29; k <= 20; ++k) r.push_back(1.0 + std::pow(10.0, k / 10.0));
  return r;
}

ModeSelection parse_selection(const std::string& s) {
  if (s == "out_of_plane") return ModeSelection::OutOfPlane;
  if (s == "in_plane") return ModeSelection::InPlane;
  if (s == "all") return ModeSelection::All;
  throw ValidationError("mode_partition must be out_of_plane, in_plane or all");
}

void run_spin(Context& ctx) {
  const int n = param_int(ctx.params, "n_ions", 0);
  if (ctx.params.contains("mu_mhz") && ctx.params.contains("mu_over_max")) {
    throw ValidationError("give either mu_mhz or mu_over_max, not both");
  }
  const auto eqs = ctx.equilibria(n);
  const auto& eq = ctx.pick(eqs, "config_index");
  const auto spectrum = label_modes(normal_modes(eq, ctx.trap, ctx.species), eq.positions);

  SpinDriveConfig drive = SpinDriveConfig::single(
      n, 1.0, constants::two_pi * param_double(ctx.params, "rabi_mhz", 1.0) * 1e6,
      constants::planck * param_double(ctx.params, "recoil_energy_hz", 1e4));
  drive.modes = parse_selection(param_string(ctx.params, "mode_partition", "out_of_plane"));
  const auto [b, w2] = selected_modes(spectrum, drive);
  if (w2.size() == 0) throw DomainError("no modes in the selected partition");
  const double w_max = std::sqrt(std::max(w2.maxCoeff(), 0.0));
  drive.mu[0] = ctx.params.contains("mu_mhz")
                    ? constants::two_pi * param_double(ctx.params, "mu_mhz", 0.0) * 1e6
                    : param_double(ctx.params, "mu_over_max", 1.01) * w_max;

  const auto graph = compute_jij(spectrum, eq, drive);
  io::CsvTable jm = [&] {
    std::vector<std::string> header{"ion"};
    for (int j = 0; j < n; ++j) header.push_back(std::to_string(j));
    return io::CsvTable(header);
  }();
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (int j = 0; j < n; ++j) row.push_back(format_double(graph.J(i, j)));
    jm.row(row);
  }
  ctx.write("spin_j.csv", jm);

  io::CsvTable edges({"i", "j", "r_m", "J_rad_per_s", "sign"});
  const auto& r = eq.positions.coords();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double J = graph.J(i, j);
      edges.row({std::to_string(i), std::to_string(j),
                 format_double((r.segment<3>(3 * i) - r.segment<3>(3 * j)).norm()), format_double(J),
                 J > 0.0 ? "AF" : (J < 0.0 ? "FM" : "0")});
    }
  }
  ctx.write("spin_edges.csv", edges);

  std::vector<double> mus;
  for (double ratio : param_double_list(ctx.params, "sweep_mu_over_max", default_mu_ratios())) {
    mus.push_back(ratio * w_max);
  }
  const auto sweep = beta_sweep(spectrum, eq, mus, drive);
  io::CsvTable st({"mu_hz", "beta", "residual", "af_fraction"});
  for (const auto& e : sweep) {
    if (!e.fit) {
      ctx.warnings.push_back("sweep point mu = " + format_double(e.mu / constants::two_pi) +
                             " Hz skipped: " + e.error);
      continue;
    }
    st.row({format_double(e.mu / constants::two_pi), format_double(e.fit->beta),
            format_double(e.fit->residual), format_double(e.af_fraction)});
  }
  ctx.write("spin_sweep.csv", st);
  ctx.write("spin.json",
            json{{"n_ions", n},
                 {"mode_partition", to_string(drive.modes)},
                 {"mu_hz", drive.mu[0] / constants::two_pi},
                 {"highest_mode_hz", w_max / constants::two_pi},
                 {"recoil_energy_j", drive.recoil_energy},
                 {"rabi_rad_per_s", drive.rabi(0, 0)},
                 {"beta", graph.beta_fit ? json(graph.beta_fit->beta) : json(nullptr)},
                 {"residual", graph.beta_fit ? json(graph.beta_fit->residual) : json(nullptr)},
                 {"af_fraction", graph.af_fraction}});
}

void run_lifetime(Context& ctx) {
  const int n = param_int(ctx.params, "n_ions", 0);
  if (n < 1) throw ValidationError("n_ions must be at least 1");
  const auto& optical = ctx.trap.optical();
  const double wl = laser_angular_frequency(optical.wavelength());
  double intensity;
  if (ctx.params.contains("intensity_w_per_m2")) {
    intensity = param_double(ctx.params, "intensity_w_per_m2", 0.0);
  } else if (ctx.cfg.trap.power_w) {
    intensity = intensity_from_power(*ctx.cfg.trap.power_w, optical.finesse(), optical.waist());
  } else {
    intensity = optical.depth() / trap_depth(ctx.species, wl, 1.0);
  }
  if (!(intensity >= 0.0)) throw ValidationError("intensity must be non-negative");

  LifetimeEstimate est;
  if (ctx.params.contains("gamma_off_per_s")) {
    const double g = param_double(ctx.params, "gamma_off_per_s", 0.0);
    const double meta = metastable_rate(g, ctx.species.branch_ratio_meta);
    est = {g, meta, n, trapping_lifetime(meta, n)};
  } else {
    est = estimate_lifetime(ctx.species, wl, intensity, n);
  }
  const std::string gas_file = param_string(ctx.params, "gas_file", "");
  GasSpecies gas;
  if (gas_file.empty()) {
    gas = hydrogen();
  } else {
    const fs::path p(gas_file);
    gas = load_gas(p.is_absolute() || fs::exists(ctx.config_dir / p) ? ctx.config_dir / p
                                                                     : data_dir() / p);
  }
  const double pressure = param_double(ctx.params, "pressure_mbar", 1e-11) * 100.0;
  const double temperature = param_double(ctx.params, "temperature_k", 300.0);
  const auto heat =
      heating_report(ctx.species, gas, pressure, temperature, optical.wavelength(), est.gamma_off);
  json lt = to_json(est);
  lt["intensity_w_per_m2"] = intensity;
  lt["branch_ratio_meta"] = ctx.species.branch_ratio_meta;
  lt["tau_ms"] = std::isfinite(est.tau) ? json(est.tau * 1e3) : json(nullptr);
  ctx.write("lifetime.json", json{{"lifetime", lt}, {"heating", to_json(heat)}, {"gas", gas.label}});
}

void run_table_one(Context& ctx) {
  TableOneOptions opt;
  opt.n_values = param_int_list(ctx.params, "n_values", opt.n_values);
  for (double w : param_double_list(ctx.params, "waists_um", {})) opt.waists.push_back(w * 1e-6);
  if (!opt.waists.empty() && opt.waists.size() != opt.n_values.size()) {
    throw ValidationError("waists_um needs one entry per n_values entry");
  }
  opt.w0_over_rmax_grid = param_double_list(ctx.params, "w0_over_rmax", {});
  opt.asymptote_tolerance = param_double(ctx.params, "asymptote_tolerance", opt.asymptote_tolerance);
  opt.n_restarts = ctx.n_restarts();
  opt.seed = ctx.cfg.seed;
  const auto cols = table_one(ctx.species, ctx.trap, opt);
  for (const auto& c : cols) {
    for (const auto& e : c.errors) ctx.warnings.push_back("N = " + std::to_string(c.n_ions) + ": " + e);
  }
  ctx.write("table1.csv", table_one_csv(cols, ctx.trap));
  ctx.write("table1.json", table_one_json(cols));
}

}  // namespace

std::string code_version() { return CAVITRAP_VERSION; }

json RunManifest::to_json() const {
  return {{"task", task},       {"config_hash", config_hash}, {"code_version", code_version},
          {"wall_time_s", wall_time}, {"outputs", outputs},         {"warnings", warnings}};
}

RunManifest run_task(Task task, const ExperimentConfig& cfg, const fs::path& config_dir,
                     const fs::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_task_params(task, cfg.task_params);
  if (cfg.task && *cfg.task != task) {
    throw ValidationError(std::string("config task ") + to_string(*cfg.task) +
                          " does not match requested task " + to_string(task));
  }
  Context ctx(cfg, config_dir, out_dir);
  switch (task) {
    case Task::Equilibrate: run_equilibrate(ctx); break;
    case Task::Modes: run_modes(ctx); break;
    case Task::TransitionScan: run_transition_scan(ctx); break;
    case Task::WaistScan: run_waist_scan(ctx); break;
    case Task::Barrier: run_barrier(ctx); break;
    case Task::Spin: run_spin(ctx); break;
    case Task::Lifetime: run_lifetime(ctx); break;
    case Task::TableOne: run_table_one(ctx); break;
  }
  RunManifest m;
  m.task = to_string(task);
  ExperimentConfig effective = cfg;
  effective.task = task;
  m.config_hash = io::sha256_hex(config_to_json(effective).dump());
  m.code_version = code_version();
  m.outputs = ctx.outputs;
  m.warnings = ctx.warnings;
  m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  m.outputs.push_back("manifest.json");
  io::write_json_atomic(out_dir / "manifest.json", m.to_json());
  return m;
}

std::string format_rings(const std::vector<int>& counts) {
  std::string s;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(counts[k]);
  }
  return s;
}

std::vector<TableOneColumn> table_one(const IonSpecies& species, const TrapConfig& trap,
                                      const TableOneOptions& options) {
  if (!options.waists.empty() && options.waists.size() != options.n_values.size()) {
    throw ValidationError("one waist per ion number is required");
  }
  const auto grid =
      options.w0_over_rmax_grid.empty() ? default_ratio_grid() : options.w0_over_rmax_grid;
  const auto& optical = trap.optical();
  const double wl = laser_angular_frequency(optical.wavelength());
  std::vector<TableOneColumn> cols;
  for (std::size_t c = 0; c < options.n_values.size(); ++c) {
    TableOneColumn col;
    col.n_ions = options.n_values[c];
    try {
      const auto eqs = find_equilibria(col.n_ions, trap, species, options.n_restarts, options.seed);
      const auto& eq = eqs.front();
      col.rings = eq.rings.counts;
      col.r_max = eq.r_max;
      if (std::isfinite(eq.d_min)) col.d_min = eq.d_min;
      if (eq.rings.ambiguous) col.errors.push_back("ring assignment is ambiguous");

      if (!options.waists.empty()) {
        col.waist = options.waists[c];
        col.alpha_tr = find_alpha_tr(eq, trap.with_optical(optical.with_waist(*col.waist)), species)
                           .alpha_tr;
      } else {
        std::vector<double> waists;
        for (double r : grid) waists.push_back(r * eq.r_max);
        const auto entries = alpha_tr_vs_waist(eq, trap, species, waists);
        const double asym = alpha_tr_uniform(eq.positions, trap, species);
        const auto pick = choose_waist(entries, asym, options.asymptote_tolerance);
        if (!pick) throw DomainError("no waist on the grid reaches the uniform asymptote");
        col.waist = entries[*pick].waist;
        col.alpha_tr = entries[*pick].point->alpha_tr;
      }
      const auto t = trap.with_optical(optical.with_waist(*col.waist));
      col.depth = depth_for_aspect_ratio(*col.alpha_tr, t, species);
      col.intensity = *col.depth / trap_depth(species, wl, 1.0);
      col.power = power_from_intensity(*col.intensity, optical.finesse(), *col.waist);
      col.gamma_off = scattering_rates(species, wl, *col.intensity).gamma_off;
    } catch (const std::exception& e) {
      col.errors.push_back(e.what());
    }
    cols.push_back(std::move(col));
  }
  return cols;
}

io::CsvTable table_one_csv(const std::vector<TableOneColumn>& columns, const TrapConfig& trap) {
  std::vector<std::string> header{"Ion number $N$"};
  for (const auto& c : columns) header.push_back(std::to_string(c.n_ions));
  io::CsvTable t(header);
  auto add = [&](const std::string& label, auto cell) {
    std::vector<std::string> row{label};
    for (const auto& c : columns) row.push_back(cell(c));
    t.row(row);
  };
  auto opt = [](const std::optional<double>& v, auto f) -> std::string {
    return v ? f(*v) : std::string("ERROR");
  };
  const std::string radial = "2pi x " + fmt("%g", trap.omega_x_dc() / constants::two_pi / 1e6) + " MHz";
  const std::string wavelength = fmt("%g", trap.optical().wavelength() * 1e9) + " nm";
  const std::string finesse = fmt("%g", trap.optical().finesse());

  add("Ion configuration", [](const TableOneColumn& c) {
    if (!c.rings) return std::string("ERROR");
    std::string s = "[";
    for (std::size_t k = 0; k < c.rings->size(); ++k) {
      if (k) s += ", ";
      s += std::to_string((*c.rings)[k]);
    }
    return s + "]";
  });
  add("Radial DC trap frequency $ \\omega_{r}^{\\mathrm{DC}} $",
      [&](const TableOneColumn&) { return radial; });
  add("Laser wavelength $\\lambda$", [&](const TableOneColumn&) { return wavelength; });
  add("Minimum ion spacing [$\\mu$m]", [&](const TableOneColumn& c) {
    return opt(c.d_min, [](double v) { return fmt("%.2f", v * 1e6); });
  });
  add("Ion crystal radius [$\\mu$m]", [&](const TableOneColumn& c) {
    return opt(c.r_max, [](double v) { return fmt("%.2f", v * 1e6); });
  });
  add("Trapping beam waist $w_0$ [$\\mu$m]", [&](const TableOneColumn& c) {
    return opt(c.waist, [](double v) { return fmt("%.1f", v * 1e6); });
  });
  add("Minimum required AC Stark shift at center [$\\mathrm{MHz \\cdot h}$] ([mK])",
      [&](const TableOneColumn& c) {
        return opt(c.depth, [](double v) {
          return fmt("%.0f", v / constants::planck / 1e6) + " (" + fmt("%.2f", to_mk(v)) + ")";
        });
      });
  add("Minimum required cavity intensity at center [$\\mathrm{W/m^2}$]",
      [&](const TableOneColumn& c) { return opt(c.intensity, [](double v) { return fmt("%.3e", v); }); });
  add("Cavity finesse $\\mathcal{F}$", [&](const TableOneColumn&) { return finesse; });
  add("Minimum required laser power [W]",
      [&](const TableOneColumn& c) { return opt(c.power, [](double v) { return fmt("%.3f", v); }); });
  add("Off-resonant scattering rate of an ion at center $\\Gamma_\\mathrm{off}$ [$\\mathrm{s^{-1}} $]",
      [&](const TableOneColumn& c) {
        return opt(c.gamma_off, [](double v) { return fmt("%.2f", v); });
      });
  return t;
}

json table_one_json(const std::vector<TableOneColumn>& columns) {
  json arr = json::array();
  auto val = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  for (const auto& c : columns) {
    arr.push_back({{"n_ions", c.n_ions},
                   {"ring_configuration", c.rings ? json(*c.rings) : json(nullptr)},
                   {"d_min_m", val(c.d_min)},
                   {"r_max_m", val(c.r_max)},
                   {"waist_m", val(c.waist)},
                   {"alpha_tr", val(c.alpha_tr)},
                   {"stark_shift_j", val(c.depth)},
                   {"stark_shift_mk", c.depth ? json(to_mk(*c.depth)) : json(nullptr)},
                   {"intensity_w_per_m2", val(c.intensity)},
                   {"power_w", val(c.power)},
                   {"gamma_off_per_s", val(c.gamma_off)},
                   {"errors", c.errors}});
  }
  return {{"columns", arr}};
}

}  // namespace cavitrap
