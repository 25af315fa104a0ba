#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cavitrap/config.hpp"
#include "cavitrap/errors.hpp"
#include "cavitrap/io.hpp"
#include "cavitrap/tasks.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kValidation = 3, kCompute = 4 };

int fail(int code, const char* kind, const std::string& message, const std::optional<fs::path>& out) {
  const nlohmann::json err{{"error", {{"kind", kind}, {"exit_code", code}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
  if (out) {
    try {
      cavitrap::io::write_json_atomic(*out / "error.json", err);
    } catch (...) {
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ion crystals in a hybrid DC + optical cavity trap"};
  std::string task_name;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out;
  app.add_option("task", task_name,
                 "Equilibrate | Modes | TransitionScan | WaistScan | Barrier | Spin | Lifetime | TableOne")
      ->required();
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--threads", threads, "worker thread cap")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }
  if (threads) omp_set_num_threads(*threads);

  const auto task = cavitrap::task_from_string(task_name);
  if (!task) return fail(kValidation, "validation", "unknown task '" + task_name + "'", std::nullopt);

  std::optional<fs::path> out_dir;
  cavitrap::ExperimentConfig cfg;
  const fs::path cfg_path(config_path);
  const fs::path cfg_dir = cfg_path.has_parent_path() ? cfg_path.parent_path() : fs::path(".");
  if (!out.empty()) out_dir = fs::path(out);
  try {
    cfg = cavitrap::load_config(cfg_path);
    if (seed) cfg.seed = *seed;
    if (!out_dir) {
      out_dir = cfg.output_dir.empty() ? fs::path("cavitrap_out") : cfg_dir / cfg.output_dir;
    }
    fs::create_directories(*out_dir);
    const auto manifest = cavitrap::run_task(*task, cfg, cfg_dir, *out_dir);
    std::cout << manifest.to_json().dump() << "\n";
    return kOk;
  } catch (const cavitrap::ParseError& e) {
    return fail(kParse, "parse", e.what(), out_dir);
  } catch (const cavitrap::ValidationError& e) {
    return fail(kValidation, "validation", e.what(), out_dir);
  } catch (const std::exception& e) {
    return fail(kCompute, "compute", e.what(), out_dir);
  }
}
