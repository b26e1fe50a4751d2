// Scenario runner: `run <config>`, `preset <name>`, `list-presets`.
// Exit codes: 0 success, 1 invalid input, 2 solver did not converge.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "riesz/presets_data.hpp"
#include "riesz/scenario.hpp"

namespace {

namespace sc = riesz::scenario;
using nlohmann::json;

struct RunOptions {
  std::optional<std::string> out;
  sc::Overrides overrides;
};

void add_run_options(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("--out", opt.out, "Output directory (default: output.directory, then $RIESZ_OUT, then riesz_out)");
  cmd->add_option("--alpha", opt.overrides.alpha, "Override kernel.alpha");
  cmd->add_option("--dim", opt.overrides.dim, "Override kernel.dim");
  cmd->add_option("--nodes", opt.overrides.nodes, "Override the node count of the geometry");
  cmd->add_option("--reg-factor", opt.overrides.reg_factor, "Override kernel.reg_factor");
}

const riesz::presets::Embedded* find_preset(const std::string& name) {
  for (const auto& p : riesz::presets::kEmbedded) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::filesystem::path output_dir(const RunOptions& opt, const sc::ScenarioConfig& cfg) {
  if (opt.out) return *opt.out;
  if (cfg.output.directory) return *cfg.output.directory;
  if (const char* env = std::getenv("RIESZ_OUT"); env && *env) return env;
  return "riesz_out";
}

int execute(json raw, const std::filesystem::path& base_dir, const RunOptions& opt) {
  try {
    sc::apply_overrides(raw, opt.overrides);
    const sc::ScenarioConfig cfg = sc::parse_config(raw, base_dir);
    const auto dir = output_dir(opt, cfg);
    const sc::RunResult result = sc::run_scenario(cfg, dir, std::cout);
    if (cfg.output.json) {
      std::ofstream resolved(dir / "scenario.json", std::ios::binary);
      resolved << raw.dump(2) << '\n';
    }
    if (result.exit_code == 2) std::cerr << "warning: at least one solve did not converge\n";
    return result.exit_code;
  } catch (const sc::ConfigError& e) {
    std::cerr << "error: invalid config at " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riesz pseudo-balayage and Gauss variational scenarios"};
  app.require_subcommand(1);

  RunOptions run_opt;
  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a scenario from a JSON config file");
  run->add_option("config", config_path, "Config file")->required();
  add_run_options(run, run_opt);

  RunOptions preset_opt;
  std::string preset_name;
  auto* preset = app.add_subcommand("preset", "Run a built-in preset");
  preset->add_option("name", preset_name, "Preset name (see list-presets)")->required();
  add_run_options(preset, preset_opt);

  auto* list = app.add_subcommand("list-presets", "List built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (list->parsed()) {
    for (const auto& p : riesz::presets::kEmbedded) {
      const json j = json::parse(p.json);
      std::cout << p.name << "  " << j.value("description", "") << '\n';
    }
    return 0;
  }
  if (preset->parsed()) {
    const auto* p = find_preset(preset_name);
    if (!p) {
      std::cerr << "error: unknown preset '" << preset_name << "'; see list-presets\n";
      return 1;
    }
    return execute(json::parse(p->json), ".", preset_opt);
  }
  try {
    const std::filesystem::path path(config_path);
    return execute(sc::load_json_file(path), path.parent_path(), run_opt);
  } catch (const sc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
