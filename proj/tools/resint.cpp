#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "resint/errors.hpp"
#include "resint/scenario.hpp"

namespace {

constexpr int kConfigFailure = 2;
constexpr int kSolverFailure = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

unsigned threads_from_env() {
  const char* env = std::getenv("RESINT_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    std::cerr << "warning: ignoring RESINT_THREADS='" << env << "'\n";
    return 1;
  }
  return static_cast<unsigned>(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-bath emitter and driven three-level dynamics, tabulated as CSV"};
  app.set_version_flag("--version", std::string(resint::kToolVersion));
  app.require_subcommand(1);

  std::string config_path, out_path;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "Execute a scenario and write CSV");
  run->add_option("--config", config_path, "Scenario JSON file")->required();
  run->add_option("--out", out_path, "Output CSV path (default: config 'output', else stdout)");
  run->add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::Range(1u, 1024u));

  auto* check = app.add_subcommand("validate", "Parse and check a scenario file");
  check->add_option("--config", config_path, "Scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  resint::ScenarioConfig cfg;
  try {
    cfg = resint::parse_config(read_file(config_path));
  } catch (const resint::ConfigError& e) {
    std::cerr << "config error at '" << e.key() << "': " << e.what() << '\n';
    return kConfigFailure;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigFailure;
  }

  if (check->parsed()) {
    for (const auto& [name, value] : resint::describe(cfg)) std::cout << name << ": " << value << '\n';
    return 0;
  }

  if (threads == 0) threads = threads_from_env();
  if (out_path.empty()) out_path = cfg.output;

  resint::ResultTable table;
  try {
    table = resint::run_scenario(cfg, threads);
  } catch (const resint::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const resint::ParameterError& e) {
    std::cerr << "config error [invalid-value]: " << e.what() << '\n';
    return kConfigFailure;
  }

  try {
    if (out_path.empty() || out_path == "-")
      resint::write_csv(table, std::cout);
    else
      resint::emit_csv(table, out_path);
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
