#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "c2poly/config.hpp"

using namespace c2poly;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json base(const std::string& kind) { return json{{"schema", kConfigSchema}, {"kind", kind}}; }

std::string config_error_key(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

struct ScratchDir {
  fs::path path;
  ScratchDir() : path(fs::temp_directory_path() / ("c2poly_cli_test_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

fs::path scratch() {
  static const ScratchDir dir;
  return dir.path;
}

fs::path write_config(const std::string& name, const json& doc) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << doc.dump();
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// exit status of the CLI; stderr goes to err.txt in the scratch dir
int run_cli(const std::string& args) {
  const std::string cmd =
      std::string("\"") + C2POLY_CLI_PATH + "\" " + args + " > \"" + (scratch() / "out.txt").string() + "\" 2> \"" +
      (scratch() / "err.txt").string() + "\"";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("parse_config validation") {
  CHECK(config_error_key(json{{"kind", "net"}}) == "schema");
  CHECK(config_error_key(json{{"schema", "other/9"}, {"kind", "net"}}) == "schema");
  CHECK(config_error_key(base("nope")) == "kind");

  json doc = base("mz");
  doc["params"] = {{"foo", 1}};
  CHECK(config_error_key(doc) == "params.foo");
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("foo") != std::string::npos);
  }

  doc = base("net");
  doc["extra"] = 1;
  CHECK(config_error_key(doc) == "extra");

  doc = base("mz");
  doc["params"] = {{"n", "four"}};
  CHECK(config_error_key(doc) == "params.n");
  doc["params"] = {{"p", 0.5}};
  CHECK(config_error_key(doc) == "params.p");
  doc["params"] = {{"deltas", json::array()}};
  CHECK(config_error_key(doc) == "params.deltas");

  doc = base("bernstein");
  doc["params"] = {{"i", 1}};
  CHECK(config_error_key(doc) == "params.i");
  doc["params"] = {{"target", "patch"}, {"l", 1}};
  CHECK(config_error_key(doc) == "params.l");

  doc = base("net");
  doc["domain"] = {{"type", "ellipse"}, {"a", 1.0}, {"b", 2.0}};
  CHECK(config_error_key(doc) == "domain.b");
  doc["domain"] = {{"type", "disk"}, {"radius", 1.0}, {"colour", "red"}};
  CHECK(config_error_key(doc) == "domain.colour");
}

TEST_CASE("defaults and echo") {
  for (const std::string& kind : experiment_kinds()) {
    CAPTURE(kind);
    const ExperimentConfig c = parse_config(base(kind));
    CHECK(c.kind == kind);
    CHECK(c.prefix == kind);
    CHECK(c.params == experiment_defaults(kind));
    CHECK(c.domain["type"] == "disk");
    // the echo is a complete config that parses back to itself
    const ExperimentConfig back = parse_config(c.to_json());
    CHECK(back.to_json() == c.to_json());
  }
  CHECK(parse_p(json("inf"), "p") == INFINITY);
  CHECK(parse_p(json(2), "p") == 2.0);
  CHECK(p_to_json(INFINITY) == json("inf"));
  CHECK_THROWS_AS(parse_p(json("two"), "p"), ConfigError);
}

TEST_CASE("domain_from_json") {
  const Domain e = domain_from_json(canonical_domain(json{{"type", "ellipse"}, {"a", 2.0}, {"b", 1.0}}));
  CHECK(e.contains(Vec2(1.9, 0)));
  CHECK(!e.contains(Vec2(0, 1.1)));
  // implicit unit disk: x^2 + y^2 - 1 <= 0
  const json imp{{"type", "implicit"},
                 {"terms", {{2, 0, 1.0}, {0, 2, 1.0}, {0, 0, -1.0}}},
                 {"bbox", {-1.1, -1.1, 1.1, 1.1}},
                 {"kappa0", 1.0},
                 {"interior", {0.0, 0.0}}};
  const Domain d = domain_from_json(canonical_domain(imp));
  CHECK(d.dist(Vec2(0.5, 0)) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("cli binary") {
  SUBCASE("unknown key exits 2 and names it") {
    json doc = base("mz");
    doc["params"] = {{"foo", 1}};
    CHECK(run_cli("--config \"" + write_config("bad.json", doc).string() + "\"") == 2);
    const json err = json::parse(slurp(scratch() / "err.txt"));
    CHECK(err["key"] == "params.foo");
    CHECK(err["message"].get<std::string>().find("foo") != std::string::npos);
  }
  SUBCASE("missing config file exits 2") {
    CHECK(run_cli("--config \"" + (scratch() / "missing.json").string() + "\"") == 2);
  }
  SUBCASE("list experiments") {
    CHECK(run_cli("--list-experiments") == 0);
    const json all = json::parse(slurp(scratch() / "out.txt"));
    for (const std::string& kind : experiment_kinds()) CHECK(all["experiments"].contains(kind));
  }
  SUBCASE("reports are identical across thread counts") {
    json doc = base("mz");
    doc["seed"] = 11;
    doc["params"] = {{"n", 2}, {"deltas", {0.8, 0.4}}, {"trials", 20}, {"candidates", 20000}, {"measure_samples", 20000}};
    const fs::path cfg = write_config("mz.json", doc);
    const fs::path a = scratch() / "t1", b = scratch() / "t3";
    REQUIRE(run_cli("--config \"" + cfg.string() + "\" --threads 1 --out \"" + a.string() + "\"") == 0);
    REQUIRE(run_cli("--config \"" + cfg.string() + "\" --threads 3 --out \"" + b.string() + "\"") == 0);
    for (const char* f : {"mz.csv", "mz.json"}) {
      CAPTURE(f);
      const std::string x = slurp(a / f);
      CHECK(!x.empty());
      CHECK(x == slurp(b / f));
    }
    const json summary = json::parse(slurp(a / "mz.json"));
    CHECK(summary["seed"] == 11);
    CHECK(summary.contains("version"));
    CHECK(summary["config"]["params"]["trials"] == 20);
    CHECK(json::parse(slurp(a / "mz.timing.json")).contains("wall_seconds"));

    // --seed overrides the config
    const fs::path c = scratch() / "s12";
    REQUIRE(run_cli("--config \"" + cfg.string() + "\" --seed 12 --out \"" + c.string() + "\"") == 0);
    CHECK(json::parse(slurp(c / "mz.json"))["seed"] == 12);
    CHECK(slurp(c / "mz.csv") != slurp(a / "mz.csv"));
  }
}
