#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "c2poly/common.hpp"
#include "c2poly/config.hpp"
#include "c2poly/experiments.hpp"
#include "c2poly/parallel.hpp"

namespace {

constexpr int kOk = 0, kConfigError = 2, kNumericalError = 3;

int fail(int code, const std::string& type, const std::string& message, const std::string& key = "") {
  nlohmann::json err = {{"error", type}, {"message", message}};
  if (!key.empty()) err["key"] = key;
  std::cerr << err.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"c2poly experiment runner"};
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool list = false;
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--list-experiments", list, "print experiment kinds with their default parameters");
  app.set_version_flag("--version", c2poly::version_string());
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail(kConfigError, "usage", e.what());
  }

  if (list) {
    nlohmann::json kinds;
    for (const auto& k : c2poly::experiment_kinds()) kinds[k] = c2poly::experiment_defaults(k);
    std::cout << nlohmann::json({{"schema", c2poly::kConfigSchema}, {"experiments", kinds}}).dump(2) << "\n";
    return kOk;
  }
  if (config_path.empty()) return fail(kConfigError, "usage", "--config is required");

  c2poly::ExperimentConfig cfg;
  try {
    cfg = c2poly::load_config(config_path);
  } catch (const c2poly::ConfigError& e) {
    return fail(kConfigError, "config", e.what(), e.key());
  }
  if (seed) cfg.seed = *seed;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  c2poly::set_thread_count(threads);

  try {
    const auto out = c2poly::run_experiment(cfg);
    for (const auto& f : out.files) std::cout << f << "\n";
  } catch (const c2poly::ConfigError& e) {
    return fail(kConfigError, "config", e.what(), e.key());
  } catch (const c2poly::DomainError& e) {
    return fail(kConfigError, "domain", std::string(cfg.kind) + ": " + e.what());
  } catch (const c2poly::NumericalError& e) {
    return fail(kNumericalError, "numerical", std::string(cfg.kind) + ": " + e.what());
  } catch (const std::exception& e) {
    return fail(kNumericalError, "runtime", std::string(cfg.kind) + ": " + e.what());
  }
  return kOk;
}
