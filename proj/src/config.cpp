#include "c2poly/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace c2poly {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      const std::string path = where.empty() ? it.key() : where + "." + it.key();
      throw ConfigError(path, "unknown key '" + path + "'");
    }
  }
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "'" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(key, "'" + key + "' must be finite");
  return x;
}

double positive(const json& v, const std::string& key) {
  const double x = number(v, key);
  if (!(x > 0)) throw ConfigError(key, "'" + key + "' must be positive");
  return x;
}

Vec2 point(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(key, "'" + key + "' must be [x, y]");
  return Vec2(number(v[0], key), number(v[1], key));
}

const std::map<std::string, json>& defaults_table() {
  static const std::map<std::string, json> table = {
      {"net", {{"delta", 0.2}, {"candidates", 200000}}},
      {"partition", {{"delta", 0.2}, {"candidates", 200000}, {"samples", 200000}}},
      {"mz",
       {{"n", 4},
        {"p", 2},
        {"deltas", {0.8, 0.4, 0.2, 0.1, 0.05}},
        {"trials", 200},
        {"candidates", 1000000},
        {"measure_samples", 400000},
        {"stop_at_first_pass", false}}},
      {"cubature",
       {{"n", 2},
        {"delta", 0.8},
        {"candidates", 200000},
        {"samples", 400000},
        {"method", "lp_maxmin"},
        {"balance", true},
        {"volume_samples", 20000},
        {"verify_trials", 20}}},
      {"bernstein",
       {{"target", "domain"},
        {"r", 1},
        {"i", 0},
        {"j", 0},
        {"l", 0},
        {"mu", 0.0},
        {"density", 64.0},
        {"floor", 32},
        {"p", 2},
        {"n_grid", {2, 4, 8, 16}},
        {"trials", 2},
        {"requested_base", 0.2},
        {"patch", 0},
        {"lambda", 1.5}}},
      {"parabola-check",
       {{"requested_base", 0.2}, {"patch", 0}, {"A", 0.0}, {"r", 3}, {"points", 100}}},
      {"decompose", {{"requested_base", 0.2}}},
  };
  return table;
}

json check_param(const std::string& name, const json& given, const json& def, const std::string& path) {
  if (name == "p") {
    parse_p(given, path);
    return given;
  }
  if (def.is_boolean()) {
    if (!given.is_boolean()) throw ConfigError(path, "'" + path + "' must be a boolean");
    return given;
  }
  if (def.is_string()) {
    if (!given.is_string()) throw ConfigError(path, "'" + path + "' must be a string");
    return given;
  }
  if (def.is_array()) {
    if (!given.is_array() || given.empty())
      throw ConfigError(path, "'" + path + "' must be a non-empty array");
    for (const auto& e : given) {
      if (def[0].is_number_integer()) {
        if (!e.is_number_integer() || e.get<long long>() < 0)
          throw ConfigError(path, "'" + path + "' entries must be non-negative integers");
      } else {
        positive(e, path);
      }
    }
    return given;
  }
  if (def.is_number_integer()) {
    if (!given.is_number_integer() || given.get<long long>() < 0)
      throw ConfigError(path, "'" + path + "' must be a non-negative integer");
    return given;
  }
  number(given, path);
  return given.get<double>();
}

void check_kind_params(const std::string& kind, const json& p) {
  auto num = [&](const char* k) { return p.at(k).get<double>(); };
  auto integer = [&](const char* k) { return p.at(k).get<long long>(); };
  if (p.contains("delta") && !(num("delta") > 0)) throw ConfigError("params.delta", "'params.delta' must be positive");
  if (p.contains("requested_base") && !(num("requested_base") > 0))
    throw ConfigError("params.requested_base", "'params.requested_base' must be positive");
  if (kind == "mz" && integer("trials") < 1) throw ConfigError("params.trials", "'params.trials' must be >= 1");
  if (kind == "cubature") {
    const auto m = p.at("method").get<std::string>();
    if (m != "lp_maxmin" && m != "nnls")
      throw ConfigError("params.method", "'params.method' must be \"lp_maxmin\" or \"nnls\"");
  }
  if (kind == "bernstein") {
    const auto t = p.at("target").get<std::string>();
    if (t != "domain" && t != "patch")
      throw ConfigError("params.target", "'params.target' must be \"domain\" or \"patch\"");
    if (t == "domain" && integer("i") != 0)
      throw ConfigError("params.i", "'params.i' applies to target \"patch\" only");
    if (t == "patch" && integer("l") != 0)
      throw ConfigError("params.l", "'params.l' applies to target \"domain\" only");
    if (num("mu") < 0) throw ConfigError("params.mu", "'params.mu' must be >= 0");
    if (!(num("density") > 0)) throw ConfigError("params.density", "'params.density' must be positive");
    if (!(num("lambda") >= 1)) throw ConfigError("params.lambda", "'params.lambda' must be >= 1");
    if (integer("trials") < 1) throw ConfigError("params.trials", "'params.trials' must be >= 1");
  }
  if (kind == "parabola-check") {
    if (num("A") < 0) throw ConfigError("params.A", "'params.A' must be >= 0 (0 selects a_bar)");
    if (integer("r") > 8) throw ConfigError("params.r", "'params.r' must be <= 8");
  }
}

}  // namespace

double parse_p(const json& v, const std::string& key) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return INFINITY;
    throw ConfigError(key, "'" + key + "' must be a number >= 1 or \"inf\"");
  }
  const double p = number(v, key);
  if (p < 1) throw ConfigError(key, "'" + key + "' must be a number >= 1 or \"inf\"");
  return p;
}

json p_to_json(double p) {
  if (std::isinf(p)) return "inf";
  return p;
}

json canonical_domain(const json& d) {
  if (!d.is_object()) throw ConfigError("domain", "'domain' must be an object");
  if (!d.contains("type") || !d["type"].is_string())
    throw ConfigError("domain.type", "'domain.type' is required");
  const auto type = d["type"].get<std::string>();
  json out;
  out["type"] = type;
  if (type == "disk") {
    reject_unknown(d, {"type", "center", "radius"}, "domain");
    const Vec2 c = d.contains("center") ? point(d["center"], "domain.center") : Vec2::Zero();
    out["center"] = {c.x(), c.y()};
    out["radius"] = d.contains("radius") ? positive(d["radius"], "domain.radius") : 1.0;
  } else if (type == "ellipse") {
    reject_unknown(d, {"type", "center", "a", "b"}, "domain");
    const Vec2 c = d.contains("center") ? point(d["center"], "domain.center") : Vec2::Zero();
    if (!d.contains("a") || !d.contains("b")) throw ConfigError("domain", "ellipse needs 'a' and 'b'");
    const double a = positive(d["a"], "domain.a"), b = positive(d["b"], "domain.b");
    if (a < b) throw ConfigError("domain.b", "ellipse needs a >= b");
    out["center"] = {c.x(), c.y()};
    out["a"] = a;
    out["b"] = b;
  } else if (type == "implicit") {
    reject_unknown(d, {"type", "terms", "bbox", "kappa0", "interior"}, "domain");
    for (const char* k : {"terms", "bbox", "kappa0", "interior"})
      if (!d.contains(k)) throw ConfigError(std::string("domain.") + k, std::string("'domain.") + k + "' is required");
    const auto& terms = d["terms"];
    if (!terms.is_array() || terms.empty()) throw ConfigError("domain.terms", "'domain.terms' must be a non-empty array");
    json ts = json::array();
    for (const auto& t : terms) {
      if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() ||
          t[0].get<int>() < 0 || t[1].get<int>() < 0)
        throw ConfigError("domain.terms", "each term is [i, j, coefficient] with i, j >= 0");
      ts.push_back({t[0].get<int>(), t[1].get<int>(), number(t[2], "domain.terms")});
    }
    const auto& bb = d["bbox"];
    if (!bb.is_array() || bb.size() != 4) throw ConfigError("domain.bbox", "'domain.bbox' must be [xlo, ylo, xhi, yhi]");
    json box = json::array();
    for (const auto& v : bb) box.push_back(number(v, "domain.bbox"));
    if (!(box[0].get<double>() < box[2].get<double>() && box[1].get<double>() < box[3].get<double>()))
      throw ConfigError("domain.bbox", "'domain.bbox' is empty");
    const Vec2 ip = point(d["interior"], "domain.interior");
    out["terms"] = ts;
    out["bbox"] = box;
    out["kappa0"] = positive(d["kappa0"], "domain.kappa0");
    out["interior"] = {ip.x(), ip.y()};
  } else {
    throw ConfigError("domain.type", "unknown domain type '" + type + "'");
  }
  return out;
}

Domain domain_from_json(const json& d0) {
  const json d = canonical_domain(d0);
  const auto type = d["type"].get<std::string>();
  auto vec = [](const json& v) { return Vec2(v[0].get<double>(), v[1].get<double>()); };
  if (type == "disk") return Domain::disk(vec(d["center"]), d["radius"].get<double>());
  if (type == "ellipse")
    return Domain::ellipse(d["a"].get<double>(), d["b"].get<double>(), vec(d["center"]));
  int deg = 0;
  for (const auto& t : d["terms"]) deg = std::max(deg, t[0].get<int>() + t[1].get<int>());
  Polynomial phi(2, deg);
  for (const auto& t : d["terms"]) {
    const Exponents e{t[0].get<int>(), t[1].get<int>(), 0};
    phi.set_coeff(e, phi.coeff(e) + t[2].get<double>());
  }
  const auto& bb = d["bbox"];
  Box box;
  box.lo = Vec2(bb[0].get<double>(), bb[1].get<double>());
  box.hi = Vec2(bb[2].get<double>(), bb[3].get<double>());
  return Domain::implicit(ImplicitField::from_polynomial(phi), box, d["kappa0"].get<double>(),
                          vec(d["interior"]), phi);
}

std::vector<std::string> experiment_kinds() {
  std::vector<std::string> out;
  for (const auto& [k, v] : defaults_table()) out.push_back(k);
  return out;
}

json experiment_defaults(const std::string& kind) {
  const auto& t = defaults_table();
  auto it = t.find(kind);
  if (it == t.end()) throw ConfigError("kind", "unknown experiment kind '" + kind + "'");
  return it->second;
}

json ExperimentConfig::to_json() const {
  json j;
  j["schema"] = kConfigSchema;
  j["kind"] = kind;
  j["seed"] = seed;
  j["domain"] = domain;
  j["params"] = params;
  // the output directory is where the files land, not part of the experiment
  j["output"] = {{"prefix", prefix}};
  return j;
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
  reject_unknown(doc, {"schema", "kind", "seed", "domain", "params", "output"}, "");
  if (!doc.contains("schema")) throw ConfigError("schema", "'schema' is required");
  if (!doc["schema"].is_string() || doc["schema"].get<std::string>() != kConfigSchema)
    throw ConfigError("schema", std::string("'schema' must be \"") + kConfigSchema + "\"");
  if (!doc.contains("kind") || !doc["kind"].is_string()) throw ConfigError("kind", "'kind' is required");

  ExperimentConfig cfg;
  cfg.kind = doc["kind"].get<std::string>();
  const json defaults = experiment_defaults(cfg.kind);

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0))
      throw ConfigError("seed", "'seed' must be a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  cfg.domain = canonical_domain(doc.contains("domain") ? doc["domain"] : json{{"type", "disk"}});

  json params = defaults;
  if (doc.contains("params")) {
    const auto& p = doc["params"];
    if (!p.is_object()) throw ConfigError("params", "'params' must be an object");
    for (auto it = p.begin(); it != p.end(); ++it) {
      const std::string path = "params." + it.key();
      if (!defaults.contains(it.key()))
        throw ConfigError(path, "unknown key '" + path + "' for kind '" + cfg.kind + "'");
      params[it.key()] = check_param(it.key(), it.value(), defaults[it.key()], path);
    }
  }
  check_kind_params(cfg.kind, params);
  cfg.params = params;

  cfg.prefix = cfg.kind;
  if (doc.contains("output")) {
    const auto& o = doc["output"];
    if (!o.is_object()) throw ConfigError("output", "'output' must be an object");
    reject_unknown(o, {"dir", "prefix"}, "output");
    if (o.contains("dir")) {
      if (!o["dir"].is_string()) throw ConfigError("output.dir", "'output.dir' must be a string");
      cfg.out_dir = o["dir"].get<std::string>();
    }
    if (o.contains("prefix")) {
      if (!o["prefix"].is_string() || o["prefix"].get<std::string>().empty())
        throw ConfigError("output.prefix", "'output.prefix' must be a non-empty string");
      cfg.prefix = o["prefix"].get<std::string>();
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace c2poly
