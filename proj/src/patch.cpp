#include "c2poly/patch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "c2poly/random.hpp"

namespace c2poly {

namespace {

constexpr int kStatGrid = 4097;

Vec2 unit(int axis) { return axis == 0 ? Vec2(1.0, 0.0) : Vec2(0.0, 1.0); }

}  // namespace

GraphPatch::GraphPatch(GraphEval g, double base, double L, int axis, int orientation,
                       const Vec2& origin)
    : g_(std::move(g)), b_(base), L_(L), axis_(axis), orientation_(orientation), origin_(origin) {
  if (!(base > 0)) throw DomainError("patch base must be positive");
  if (!(L >= 1)) throw DomainError("patch parameter L must be >= 1");
  if (axis != 0 && axis != 1) throw DomainError("patch axis must be 0 or 1");
  if (orientation != 1 && orientation != -1) throw DomainError("patch orientation must be +1 or -1");
  min_g_ = std::numeric_limits<double>::infinity();
  double xmin = 0.0;
  const double h = 4 * b_ / (kStatGrid - 1);
  for (int k = 0; k < kStatGrid; ++k) {
    const double x = -2 * b_ + h * k;
    const auto j = g_(x);
    grad_max_ = std::max(grad_max_, std::abs(j[1]));
    hess_max_ = std::max(hess_max_, std::abs(j[2]));
    if (j[0] < min_g_) {
      min_g_ = j[0];
      xmin = x;
    }
  }
  // Golden-section refinement of the minimum between grid neighbours.
  double lo = std::max(-2 * b_, xmin - h), hi = std::min(2 * b_, xmin + h);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80 && hi - lo > 1e-15 * b_; ++it) {
    const double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    if (this->g(x1) < this->g(x2))
      hi = x2;
    else
      lo = x1;
  }
  min_g_ = std::min(min_g_, this->g(0.5 * (lo + hi)));
  M_ = 1.25 * hess_max_;
}

GraphPatch GraphPatch::standalone(GraphEval g, double base, double L) {
  return GraphPatch(std::move(g), base, L, 1, 1, Vec2::Zero());
}

GraphPatch GraphPatch::quadratic(double c0, double c1, double c2, double base, double L) {
  return standalone(
      [c0, c1, c2](double x) {
        return std::array<double, 3>{c0 + c1 * x + 0.5 * c2 * x * x, c1 + c2 * x, c2};
      },
      base, L);
}

Vec2 GraphPatch::ex() const { return unit(1 - axis_); }
Vec2 GraphPatch::ey() const { return orientation_ * unit(axis_); }

Vec2 GraphPatch::to_global(double x, double y) const { return origin_ + x * ex() + y * ey(); }

Vec2 GraphPatch::to_local(const Vec2& p) const {
  const Vec2 d = p - origin_;
  return Vec2(d.dot(ex()), d.dot(ey()));
}

bool GraphPatch::in_G(double x, double y, double lambda, double tol) const {
  if (std::abs(x) >= lambda * b_) return false;
  const double gx = g(x);
  return y > gx - lambda * L_ * b_ && y <= gx + tol;
}

bool GraphPatch::in_Gstar(double x, double y, double tol) const {
  if (std::abs(x) >= 2 * b_) return false;
  return y > min_g_ - 4 * L_ * b_ && y <= g(x) + tol;
}

bool GraphPatch::on_essential_boundary(double x, double y, double lambda, double tol) const {
  return std::abs(x) < lambda * b_ && std::abs(y - g(x)) <= tol;
}

bool GraphPatch::normalized(double tol) const {
  return std::abs(min_g_ - 4 * L_ * b_) <= tol * std::max(1.0, 4 * L_ * b_);
}

bool GraphPatch::satisfies_parameter_bound() const {
  return L_ >= 4 * std::sqrt(2.0) * grad_max_ + 1;
}

double GraphPatch::dist_to_graph(double x, double y, int samples) const {
  double best_s = 0, best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const double s = -2 * b_ + 4 * b_ * k / (samples - 1);
    const double d = (s - x) * (s - x) + (g(s) - y) * (g(s) - y);
    if (d < best) {
      best = d;
      best_s = s;
    }
  }
  double s = best_s;
  for (int it = 0; it < 30; ++it) {
    const auto j = g_(s);
    const double F1 = 2 * (s - x) + 2 * (j[0] - y) * j[1];
    const double F2 = 2 + 2 * j[1] * j[1] + 2 * (j[0] - y) * j[2];
    if (F2 <= 0) break;
    const double next = std::clamp(s - F1 / F2, -2 * b_, 2 * b_);
    const double gn = g(next);
    const double dn = (next - x) * (next - x) + (gn - y) * (gn - y);
    if (dn > best) break;
    const bool done = std::abs(next - s) <= 1e-16 * std::max(1.0, b_);
    s = next;
    best = dn;
    if (done) break;
  }
  return std::sqrt(best);
}

double rho_hat(const GraphPatch& patch, const Vec2& xi, const Vec2& eta) {
  const double tol = 1e-12 * std::max(1.0, patch.depth());
  auto check = [&](const Vec2& p) {
    if (std::abs(p.x()) > 2 * patch.base() * (1 + 1e-12) ||
        p.y() < patch.min_g() - 4 * patch.depth() - tol || p.y() > patch.g(p.x()) + tol)
      throw DomainError("rho_hat: argument outside the closure of G*");
  };
  check(xi);
  check(eta);
  const double dx = std::abs(xi.x() - eta.x());
  const double a = std::sqrt(std::max(0.0, patch.g(xi.x()) - xi.y()));
  const double b = std::sqrt(std::max(0.0, patch.g(eta.x()) - eta.y()));
  return std::max(dx, std::abs(a - b));
}

GraphPatch make_patch(const Domain& dom, const BoundaryPoint& eta, double base, double depth) {
  const Vec2 n = eta.normal;
  const int axis = std::abs(n.y()) >= std::abs(n.x()) ? 1 : 0;
  const int orient = n[axis] >= 0 ? 1 : -1;
  const Vec2 ex = unit(1 - axis), ey = orient * unit(axis);
  const Vec2 p0 = eta.position;
  const double scale = std::max(dom.bbox().width(), dom.bbox().height());

  // Continuation table for initial guesses.
  const int K = 513;
  const double umax = 2.25 * base;
  std::vector<double> table(K, 0.0);
  auto solve = [dom, p0, ex, ey, scale](double u, double v) {
    for (int it = 0; it < 50; ++it) {
      const Vec2 q = p0 + u * ex + v * ey;
      const double F = dom.level(q);
      const double dF = dom.level_gradient(q).dot(ey);
      if (!(std::abs(dF) > 1e-14)) throw NumericalError("make_patch: graph direction tangent to the boundary");
      const double step = F / dF;
      v -= step;
      if (std::abs(step) <= 1e-15 * scale) return v;
    }
    throw NumericalError("make_patch: implicit-function Newton did not converge");
  };
  const int mid = K / 2;
  table[mid] = 0.0;
  for (int k = mid + 1; k < K; ++k) {
    const double u = -umax + 2 * umax * k / (K - 1), du = 2 * umax / (K - 1);
    const double slope = k - 1 > mid ? (table[k - 1] - table[k - 2]) / du : 0.0;
    table[k] = solve(u, table[k - 1] + slope * du);
  }
  for (int k = mid - 1; k >= 0; --k) {
    const double u = -umax + 2 * umax * k / (K - 1), du = 2 * umax / (K - 1);
    const double slope = k + 1 < mid ? (table[k + 1] - table[k + 2]) / du : 0.0;
    table[k] = solve(u, table[k + 1] + slope * du);
  }
  auto h_jet = [dom, p0, ex, ey, table, umax, K, solve](double u) {
    double t = (u + umax) / (2 * umax) * (K - 1);
    t = std::clamp(t, 0.0, static_cast<double>(K - 1));
    const int k = std::min(static_cast<int>(t), K - 2);
    const double w = t - k;
    const double v = solve(u, (1 - w) * table[k] + w * table[k + 1]);
    const Vec2 q = p0 + u * ex + v * ey;
    const Vec2 g = dom.level_gradient(q);
    const Mat2 H = dom.level_hessian(q);
    const double fa = g.dot(ey), fe = g.dot(ex);
    const double h1 = -fe / fa;
    const double hee = ex.dot(H * ex), hea = ex.dot(H * ey), haa = ey.dot(H * ey);
    const double h2 = -(hee + 2 * hea * h1 + haa * h1 * h1) / fa;
    return std::array<double, 3>{v, h1, h2};
  };
  // min of h on [-2b, 2b]: grid then Newton on h' = 0.
  double umin = 0, hmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    const double u = -umax + 2 * umax * k / (K - 1);
    if (std::abs(u) > 2 * base) continue;
    if (table[k] < hmin) {
      hmin = table[k];
      umin = u;
    }
  }
  for (int it = 0; it < 30; ++it) {
    if (std::abs(umin) >= 2 * base) break;
    const auto j = h_jet(umin);
    if (j[2] <= 0) break;
    const double next = std::clamp(umin - j[1] / j[2], -2 * base, 2 * base);
    if (h_jet(next)[0] > j[0]) break;
    const bool done = std::abs(next - umin) < 1e-15 * base;
    umin = next;
    if (done) break;
  }
  hmin = std::min({hmin, h_jet(umin)[0], h_jet(-2 * base)[0], h_jet(2 * base)[0]});
  const double L = depth / base;
  const double c = 4 * L * base - hmin;
  GraphEval g = [h_jet, c](double x) {
    auto j = h_jet(x);
    j[0] += c;
    return j;
  };
  return GraphPatch(std::move(g), base, L, axis, orient, p0 - c * ey);
}

AttachmentReport attachment_check(const Domain& dom, const GraphPatch& patch, int grid) {
  AttachmentReport rep;
  const double b = patch.base();
  const double bottom = patch.min_g() - 4 * patch.depth();
  const double scale = std::max(dom.bbox().width(), dom.bbox().height());
  for (int i = 0; i < grid; ++i) {
    const double x = -2 * b + 4 * b * (i + 0.5) / grid;
    const double gx = patch.g(x);
    const Vec2 top = patch.to_global(x, gx);
    const double lv = std::abs(dom.level(top)) / std::max(dom.level_gradient(top).norm(), 1e-300);
    rep.max_graph_level = std::max(rep.max_graph_level, lv);
    for (int k = 1; k <= grid; ++k) {
      // Below the graph (inside G*) and above it (the rest of the box).
      const double t = static_cast<double>(k) / grid;
      const Vec2 below = patch.to_global(x, gx - t * (gx - bottom));
      if (!(dom.contains(below, 0.0) && dom.level(below) < 0)) ++rep.outside_points;
      const Vec2 above = patch.to_global(x, gx + t * patch.depth());
      if (dom.contains(above, 0.0)) ++rep.outside_points;
    }
  }
  if (rep.max_graph_level > 1e-10 * scale) {
    rep.pass = false;
    rep.detail = "graph does not lie on the boundary";
  }
  if (rep.outside_points > 0) {
    rep.pass = false;
    rep.detail = "box around G* does not cut the domain in G*";
  }
  return rep;
}

std::vector<GraphPatch> decompose_boundary(const Domain& dom, double requested_base,
                                           const DecompositionOptions& opt) {
  const double k0 = dom.kappa0();
  if (!(requested_base > 0)) throw DomainError("decompose_boundary: base must be positive");
  if (requested_base > k0) throw DomainError("decompose_boundary: base too large for curvature (base > kappa0)");
  const double depth = opt.depth_fraction * k0;
  const double P = dom.perimeter();

  auto feasible = [&](double b, const BoundaryPoint& eta) -> std::optional<GraphPatch> {
    try {
      GraphPatch p = make_patch(dom, eta, b, depth);
      if (!p.satisfies_parameter_bound()) return std::nullopt;
      if (!attachment_check(dom, p, opt.validation_grid).pass) return std::nullopt;
      return p;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };

  double b = requested_base;
  const double floor_b = 1e-6 * k0;
  for (int k = 0; k < 64; ++k) {
    const BoundaryPoint eta = dom.boundary_at(P * k / 64.0);
    while (!feasible(b, eta)) {
      b *= 0.8;
      if (b < floor_b) throw NumericalError("decompose_boundary: no feasible base size");
    }
  }
  for (;;) {
    const std::size_t count =
        static_cast<std::size_t>(std::ceil(P / (1.6 * opt.lambda0 * b)));
    std::vector<GraphPatch> out;
    out.reserve(count);
    bool ok = true;
    for (std::size_t k = 0; k < count && ok; ++k) {
      auto p = feasible(b, dom.boundary_at(P * k / count));
      if (p)
        out.push_back(std::move(*p));
      else
        ok = false;
    }
    if (ok) {
      const auto cover = boundary_cover_check(dom, out, opt.lambda0, 2000);
      if (cover.pass) return out;
    }
    b *= 0.8;
    if (b < floor_b) throw NumericalError("decompose_boundary: no feasible base size");
  }
}

CoverReport boundary_cover_check(const Domain& dom, const std::vector<GraphPatch>& patches,
                                 double lambda0, std::size_t samples) {
  CoverReport rep;
  rep.samples = samples;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double P = dom.perimeter();
  const double scale = std::max(dom.bbox().width(), dom.bbox().height());
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec2 p = dom.boundary_at(P * (i + 0.5) / samples).position;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& patch : patches) {
      const Vec2 q = patch.to_local(p);
      const double margin = lambda0 * patch.base() - std::abs(q.x());
      if (margin <= best || margin <= 0) {
        best = std::max(best, margin);
        continue;
      }
      if (std::abs(q.y() - patch.g(q.x())) <= 1e-8 * scale) best = margin;
    }
    rep.worst_margin = std::min(rep.worst_margin, best);
    if (!(best > 0)) {
      ++rep.uncovered;
      rep.pass = false;
    }
  }
  return rep;
}

Vec2 sample_patch_point(const GraphPatch& patch, double u, double v, double lambda) {
  const double x = (2 * u - 1) * lambda * patch.base();
  const double d = v * v * lambda * patch.depth();
  return Vec2(x, patch.g(x) - d);
}

RatioReport metric_equivalence_report(const Domain& dom, const GraphPatch& patch,
                                      std::size_t pairs, std::uint64_t seed) {
  RatioReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  Rng rng(seed);
  auto draw = [&](bool adapted) {
    const double u = uniform01(rng), v = uniform01(rng);
    return adapted ? sample_patch_point(patch, u, v) : sample_patch_point(patch, u, std::sqrt(v));
  };
  for (std::size_t i = 0; i < pairs; ++i) {
    const Vec2 a = draw(i % 2 == 0), b = draw(i % 4 < 2);
    const Vec2 ga = patch.to_global(a), gb = patch.to_global(b);
    const double r = rho_omega(dom, ga, gb);
    if (r == 0.0) continue;
    const double ratio = rho_hat(patch, a, b) / r;
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    ++rep.pairs;
  }
  return rep;
}

DistBoundsReport patch_dist_bounds_check(const GraphPatch& patch, std::size_t samples,
                                         std::uint64_t seed) {
  DistBoundsReport rep;
  rep.samples = samples;
  rep.c_star = patch.c_star();
  rep.min_lower_slack = rep.min_upper_slack = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    const double u = uniform01(rng), v = uniform01(rng);
    const Vec2 p = sample_patch_point(patch, u, i % 2 ? v : std::sqrt(v));
    const double delta = patch.delta(p.x(), p.y());
    const double dist = patch.dist_to_graph(p.x(), p.y());
    const double sc = std::max(delta, 1e-300);
    const double lower = (dist - rep.c_star * delta) / sc;
    const double upper = (delta - dist) / sc;
    rep.min_lower_slack = std::min(rep.min_lower_slack, lower);
    rep.min_upper_slack = std::min(rep.min_upper_slack, upper);
    if (delta > 0 && (lower < -1e-10 || upper < -1e-10)) rep.pass = false;
  }
  return rep;
}

}  // namespace c2poly
