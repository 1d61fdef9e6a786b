#include "c2poly/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "c2poly/bernstein.hpp"
#include "c2poly/cubature.hpp"
#include "c2poly/discretize.hpp"
#include "c2poly/format.hpp"
#include "c2poly/net.hpp"
#include "c2poly/parabola.hpp"
#include "c2poly/parallel.hpp"
#include "c2poly/patch.hpp"
#include "c2poly/random.hpp"

namespace c2poly {

using nlohmann::json;

namespace {

// Salts for the per-experiment streams.
constexpr std::uint64_t kNetTag = 0x6e6574, kPartTag = 0x706172, kVolTag = 0x766f6c,
                        kProbeTag = 0x707262;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : cols_(header.size()) {
    for (std::size_t k = 0; k < header.size(); ++k) os_ << (k ? "," : "") << header[k];
    os_ << '\n';
  }
  Csv& operator<<(double v) { return put(fmt17(v)); }
  Csv& operator<<(int v) { return put(std::to_string(v)); }
  Csv& operator<<(std::size_t v) { return put(std::to_string(v)); }
  Csv& operator<<(bool v) { return put(v ? "1" : "0"); }
  std::string str() const { return os_.str(); }

 private:
  Csv& put(const std::string& s) {
    os_ << (col_ ? "," : "") << s;
    if (++col_ == cols_) {
      os_ << '\n';
      col_ = 0;
    }
    return *this;
  }
  std::ostringstream os_;
  std::size_t cols_, col_ = 0;
};

struct Payload {
  std::string rows;  // CSV body
  json summary;
};

std::size_t uint_param(const json& p, const char* k) { return p.at(k).get<std::size_t>(); }
int int_param(const json& p, const char* k) { return p.at(k).get<int>(); }
double dbl(const json& p, const char* k) { return p.at(k).get<double>(); }

double net_separation(double delta, int n) { return n > 0 ? delta / n : delta; }

const GraphPatch& pick_patch(const std::vector<GraphPatch>& patches, std::size_t k) {
  if (k >= patches.size())
    throw ConfigError("params.patch", "'params.patch' = " + std::to_string(k) + " but the decomposition has " +
                                          std::to_string(patches.size()) + " patches");
  return patches[k];
}

json patch_json(const GraphPatch& g) {
  const Vec2 foot = g.to_global(0.0, g.g(0.0));
  return {{"frame_origin", {g.origin().x(), g.origin().y()}},
          {"boundary_point", {foot.x(), foot.y()}},
          {"axis", g.axis()},
          {"orientation", g.orientation()},
          {"base", g.base()},
          {"L", g.L()},
          {"depth", g.depth()},
          {"M", g.M()}};
}

Payload run_net(const Domain& dom, const json& p, std::uint64_t seed) {
  const double delta = dbl(p, "delta");
  const Net net = greedy_maximal_net(dom, delta, uint_param(p, "candidates"), stream_seed(seed, 0, kNetTag));
  Csv csv({"index", "x", "y", "dist"});
  for (std::size_t k = 0; k < net.size(); ++k) csv << k << net.centers[k].x() << net.centers[k].y() << net.dists[k];
  Payload out{csv.str(), {}};
  out.summary = {{"nodes", net.size()},
                 {"min_separation", num(min_separation(dom, net))},
                 {"cardinality_scaled", net.size() * delta * delta},
                 {"candidates", net.candidates}};
  return out;
}

Payload run_partition(const Domain& dom, const json& p, std::uint64_t seed) {
  const double delta = dbl(p, "delta");
  const Net net = greedy_maximal_net(dom, delta, uint_param(p, "candidates"), stream_seed(seed, 0, kNetTag));
  const Partition part = make_partition(dom, net, uint_param(p, "samples"), stream_seed(seed, 0, kPartTag));
  std::ostringstream os;
  write_partition_table(os, part);
  double total = 0.0, smin = INFINITY, smax = 0.0;
  for (double m : part.measures) {
    total += m;
    smin = std::min(smin, m);
    smax = std::max(smax, m);
  }
  Payload out{os.str(), {}};
  out.summary = {{"cells", part.size()},     {"samples", part.samples}, {"unassigned", part.unassigned},
                 {"measure_sum", total},     {"area", part.area},       {"min_measure", num(smin)},
                 {"max_measure", smax}};
  return out;
}

Payload run_mz(const Domain& dom, const json& p, std::uint64_t seed) {
  const int n = int_param(p, "n");
  const double pp = parse_p(p.at("p"), "params.p");
  MZOptions opt;
  opt.candidates = uint_param(p, "candidates");
  opt.measure_samples = uint_param(p, "measure_samples");
  opt.stop_at_first_pass = p.at("stop_at_first_pass").get<bool>();
  const auto deltas = p.at("deltas").get<std::vector<double>>();
  const MZSweep sweep = mz_ratio_sweep(dom, n, pp, deltas, uint_param(p, "trials"), seed, opt);

  Csv csv({"delta", "trial", "ratio"});
  json per = json::array();
  for (const auto& r : sweep.reports) {
    for (std::size_t t = 0; t < r.ratios.size(); ++t) csv << r.delta << t << r.ratios[t];
    per.push_back({{"delta", r.delta},
                   {"separation", r.separation},
                   {"nodes", r.nodes},
                   {"samples", r.samples},
                   {"unassigned", r.unassigned},
                   {"min_ratio", r.min_ratio},
                   {"max_ratio", r.max_ratio},
                   {"in_band", r.in_band}});
  }
  Payload out{csv.str(), {}};
  out.summary = {{"delta0", sweep.delta0 ? json(*sweep.delta0) : json(nullptr)},
                 {"band", {opt.band_lo, opt.band_hi}},
                 {"sweep", per}};
  return out;
}

Payload run_cubature(const Domain& dom, const json& p, std::uint64_t seed) {
  const int n = int_param(p, "n");
  const double delta = dbl(p, "delta");
  const Net net = greedy_maximal_net(dom, net_separation(delta, n), uint_param(p, "candidates"),
                                     stream_seed(seed, 0, kNetTag));
  const Partition part = make_partition(dom, net, uint_param(p, "samples"), stream_seed(seed, 0, kPartTag));
  const auto volumes = unit_ball_volumes(dom, part.reps(), n, uint_param(p, "volume_samples"),
                                         stream_seed(seed, 0, kVolTag));
  CubatureRule rule;
  if (p.at("method").get<std::string>() == "nnls") {
    rule = nnls_weights(dom, part.reps(), n);
    rule.measures = part.measures;
  } else {
    MaxMinOptions opt;
    if (p.at("balance").get<bool>()) opt.volumes = volumes;
    rule = lp_maxmin_weights(dom, part, n, opt);
  }
  const std::size_t trials = uint_param(p, "verify_trials");
  const RuleVerification ver = verify_rule(rule, dom, trials, seed, volumes);
  const TFunctionalReport tf = t_functional_report(rule, dom, trials, seed);

  std::ostringstream os;
  write_rule_csv(os, rule);
  double wmin = INFINITY;
  for (double w : rule.weights) wmin = std::min(wmin, w);
  Payload out{os.str(), {}};
  out.summary = {{"method", rule.method},
                 {"degree", rule.degree},
                 {"nodes", rule.nodes.size()},
                 {"separation", net.delta},
                 {"unassigned", part.unassigned},
                 {"residual", rule.residual},
                 {"monomial_residual", rule.monomial_residual},
                 {"t_star", rule.t_star ? num(*rule.t_star) : json(nullptr)},
                 {"t_opt", rule.t_opt ? num(*rule.t_opt) : json(nullptr)},
                 {"min_weight", num(wmin)},
                 {"verification",
                  {{"trials", ver.trials},
                   {"max_rel_error", ver.max_rel_error},
                   {"higher_degree_error", ver.higher_degree_error},
                   {"upper_min", num(ver.upper_min)},
                   {"upper_max", num(ver.upper_max)},
                   {"upper_spread", num(ver.upper_spread)},
                   {"lower_pass", ver.lower_pass},
                   {"lower_fail", ver.lower_fail}}},
                 {"t_functional",
                  {{"min_coeff", tf.min_coeff},
                   {"coeff_sum", tf.coeff_sum},
                   {"max_identity_error", tf.max_identity_error},
                   {"convex", tf.convex}}}};
  return out;
}

Payload run_bernstein(const Domain& dom, const json& p, std::uint64_t seed) {
  const double pp = parse_p(p.at("p"), "params.p");
  const auto grid = p.at("n_grid").get<std::vector<int>>();
  for (int n : grid)
    if (n < 1) throw ConfigError("params.n_grid", "'params.n_grid' entries must be >= 1");
  const std::size_t trials = uint_param(p, "trials");
  const int r = int_param(p, "r"), i = int_param(p, "i"), j = int_param(p, "j"), l = int_param(p, "l");
  const auto family = random_family(dom, seed);

  GrowthFit fit;
  json extra;
  int exponent = 0;
  if (p.at("target").get<std::string>() == "domain") {
    MaximalDerivativeSpec spec;
    spec.r = r;
    spec.j = j;
    spec.l = l;
    spec.mu = dbl(p, "mu");
    spec.density = dbl(p, "density");
    spec.floor = int_param(p, "floor");
    exponent = spec.exponent();
    const MaximalDerivative op(dom, spec);
    extra = {{"mu", op.mu()}};
    fit = growth_exponent(dom, spec, family, pp, grid, trials);
  } else {
    const auto patches = decompose_boundary(dom, dbl(p, "requested_base"));
    const GraphPatch& g = pick_patch(patches, uint_param(p, "patch"));
    exponent = r + i + 2 * j;
    extra = {{"patch", patch_json(g)}};
    fit = patch_growth_exponent(g, family, r, i, j, pp, dbl(p, "lambda"), grid, trials);
  }
  Csv csv({"n", "ratio"});
  for (std::size_t k = 0; k < fit.n_used.size(); ++k) csv << fit.n_used[k] << fit.ratios[k];
  Payload out{csv.str(), {}};
  out.summary = {{"slope", num(fit.slope)},
                 {"exponent", exponent},
                 {"slope_bound", exponent + 0.3},
                 {"within_bound", !fit.degenerate && fit.slope <= exponent + 0.3},
                 {"degenerate", fit.degenerate},
                 {"n_used", fit.n_used},
                 {"n_skipped", fit.n_skipped}};
  out.summary.update(extra);
  return out;
}

Payload run_parabola(const Domain& dom, const json& p, std::uint64_t seed) {
  const auto patches = decompose_boundary(dom, dbl(p, "requested_base"));
  const GraphPatch& g = pick_patch(patches, uint_param(p, "patch"));
  const double M = ParabolaFamily::default_M(g);
  const double A = dbl(p, "A") > 0 ? dbl(p, "A") : ParabolaFamily::a_bar(g, M);
  const ParabolaFamily fam(g, A);
  const int r = int_param(p, "r");
  const std::size_t points = uint_param(p, "points");
  const Polynomial f = random_polynomial(2, std::max(r, 1) + 1, stream_seed(seed, 0, kProbeTag));

  Csv csv({"index", "x", "y", "z", "t", "roundtrip", "jacobian", "jacobian_fd", "jacobian_rel", "u", "u_lower",
           "u_upper", "bounds_ok", "s1", "full", "mismatch"});
  const auto pts = halton2(1, points, stream_seed(seed, 1, kProbeTag));
  double worst_rt = 0.0, worst_jac = 0.0, worst_mis = 0.0;
  std::size_t bound_fail = 0;
  for (std::size_t k = 0; k < points; ++k) {
    const Vec2 q = sample_patch_point(g, pts[k].first, pts[k].second);
    const auto [z, t] = fam.phi_inverse(q.x(), q.y());
    const double rt = (fam.phi_map(z, t) - q).norm();
    const double jac = fam.jacobian_det(z, t);
    // central differences of the map in (z, t)
    const double h = 1e-6 * std::max(1e-3, std::abs(t));
    auto safe = [&](double zz, double tt) { return fam.in_E(zz, tt, 1e-9); };
    double fd = NAN, rel = NAN;
    if (std::abs(t) >= 1e-3 && safe(z + h, t) && safe(z - h, t) && safe(z, t + h) && safe(z, t - h)) {
      const Vec2 dz = (fam.phi_map(z + h, t) - fam.phi_map(z - h, t)) / (2 * h);
      const Vec2 dt = (fam.phi_map(z, t + h) - fam.phi_map(z, t - h)) / (2 * h);
      fd = std::abs(dz.x() * dt.y() - dz.y() * dt.x());
      rel = std::abs(fd - jac) / std::max(std::abs(jac), 1e-300);
      worst_jac = std::max(worst_jac, rel);
    }
    const UBounds ub = u_bounds(fam, q.x(), q.y());
    const bool ok = ub.sqrt_bounds && ub.linear_bounds && ub.depth_bounds;
    if (!ok) ++bound_fail;
    const Decomposition dec = decomposition_check(fam, f, r, q.x(), q.y());
    worst_rt = std::max(worst_rt, rt);
    worst_mis = std::max(worst_mis, dec.mismatch / std::max(1.0, std::abs(dec.full)));
    csv << k << q.x() << q.y() << z << t << rt << jac << fd << rel << ub.u << ub.lower << ub.upper << ok << dec.s1
        << dec.full << dec.mismatch;
  }
  Payload out{csv.str(), {}};
  out.summary = {{"patch", patch_json(g)},
                 {"A", A},
                 {"M", M},
                 {"a0", fam.a0()},
                 {"a1", fam.a1()},
                 {"r", r},
                 {"points", points},
                 {"max_roundtrip", worst_rt},
                 {"max_jacobian_rel", worst_jac},
                 {"u_bound_failures", bound_fail},
                 {"max_decomposition_mismatch", worst_mis}};
  return out;
}

Payload run_decompose(const Domain& dom, const json& p, std::uint64_t) {
  DecompositionOptions dopt;
  const auto patches = decompose_boundary(dom, dbl(p, "requested_base"), dopt);
  Csv csv({"index", "origin_x", "origin_y", "axis", "orientation", "base", "L", "depth", "M", "grad_max",
           "hess_max"});
  for (std::size_t k = 0; k < patches.size(); ++k) {
    const auto& g = patches[k];
    csv << k << g.origin().x() << g.origin().y() << g.axis() << g.orientation() << g.base() << g.L() << g.depth()
        << g.M() << g.grad_max() << g.hess_max();
  }
  const CoverReport cover = boundary_cover_check(dom, patches, dopt.lambda0, 4096);
  std::size_t param_ok = 0;
  for (const auto& g : patches) param_ok += g.satisfies_parameter_bound() ? 1 : 0;
  Payload out{csv.str(), {}};
  out.summary = {{"patches", patches.size()},
                 {"lambda0", dopt.lambda0},
                 {"cover_pass", cover.pass},
                 {"cover_samples", cover.samples},
                 {"uncovered", cover.uncovered},
                 {"worst_margin", cover.worst_margin},
                 {"parameter_bound_ok", param_ok}};
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  os << text;
  if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

RunOutput run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const Domain dom = domain_from_json(cfg.domain);
  Payload pay;
  const auto& p = cfg.params;
  if (cfg.kind == "net") pay = run_net(dom, p, cfg.seed);
  else if (cfg.kind == "partition") pay = run_partition(dom, p, cfg.seed);
  else if (cfg.kind == "mz") pay = run_mz(dom, p, cfg.seed);
  else if (cfg.kind == "cubature") pay = run_cubature(dom, p, cfg.seed);
  else if (cfg.kind == "bernstein") pay = run_bernstein(dom, p, cfg.seed);
  else if (cfg.kind == "parabola-check") pay = run_parabola(dom, p, cfg.seed);
  else if (cfg.kind == "decompose") pay = run_decompose(dom, p, cfg.seed);
  else throw ConfigError("kind", "unknown experiment kind '" + cfg.kind + "'");
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json summary = {{"config", cfg.to_json()},
                  {"seed", cfg.seed},
                  {"version", version_string()},
                  {"result", pay.summary}};

  namespace fs = std::filesystem;
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  RunOutput out;
  const bool table = cfg.kind == "partition";
  const fs::path rows = dir / (cfg.prefix + (table ? ".table" : ".csv"));
  const fs::path sum = dir / (cfg.prefix + ".json");
  const fs::path timing = dir / (cfg.prefix + ".timing.json");
  write_file(rows, pay.rows);
  write_file(sum, summary.dump(2) + "\n");
  write_file(timing, json({{"wall_seconds", wall}, {"threads", thread_count()}}).dump(2) + "\n");
  out.files = {rows.string(), sum.string(), timing.string()};
  out.summary = std::move(summary);
  out.wall_seconds = wall;
  return out;
}

}  // namespace c2poly
