#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "c2poly/domain.hpp"

namespace c2poly {

inline constexpr const char* kConfigSchema = "c2poly.experiment/1";

// Invalid configuration; `key` is the offending JSON path when known.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::invalid_argument(what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Canonical domain descriptions:
//   {"type": "disk", "center": [x, y], "radius": r}
//   {"type": "ellipse", "center": [x, y], "a": a, "b": b}
//   {"type": "implicit", "terms": [[i, j, c], ...], "bbox": [xlo, ylo, xhi, yhi],
//    "kappa0": k, "interior": [x, y]}
// An implicit domain is {sum c x^i y^j <= 0}.
Domain domain_from_json(const nlohmann::json& d);
// Fills defaults and checks keys; the result is the canonical form.
nlohmann::json canonical_domain(const nlohmann::json& d);

struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 0;
  nlohmann::json domain;  // canonical
  nlohmann::json params;  // every parameter of the kind, defaults filled in
  std::string out_dir = ".";
  std::string prefix;     // file stem, defaults to the kind

  // Canonical echo, the same document the run can be repeated from
  // (output.dir left out so reports do not depend on where they are written).
  nlohmann::json to_json() const;
};

std::vector<std::string> experiment_kinds();
// Parameters of a kind with their defaults.
nlohmann::json experiment_defaults(const std::string& kind);

// Validates before anything is computed: schema tag, known kind, no unknown
// keys anywhere, parameter types and ranges.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

// "inf" or a number >= 1.
double parse_p(const nlohmann::json& v, const std::string& key);
nlohmann::json p_to_json(double p);

}  // namespace c2poly
