#include "c2poly/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "c2poly/discretize.hpp"
#include "c2poly/parabola.hpp"
#include "c2poly/parallel.hpp"
#include "c2poly/random.hpp"

namespace c2poly {

namespace {

constexpr std::size_t kMaxLevel = 12;  // 32 * 2^12 = 131072 boundary samples

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// d_tau^a d_nu^b f from the order a + b partials P[q] = d1^q d2^{a+b-q} f.
double directional(const std::vector<double>& P, int a, int b, const Vec2& tau, const Vec2& nu) {
  double s = 0.0;
  for (int i = 0; i <= a; ++i) {
    const double ti = binom(a, i) * std::pow(tau.x(), i) * std::pow(tau.y(), a - i);
    if (ti == 0.0) continue;
    for (int k = 0; k <= b; ++k)
      s += ti * binom(b, k) * std::pow(nu.x(), k) * std::pow(nu.y(), b - k) * P[i + k];
  }
  return s;
}

}  // namespace

MaximalDerivative::MaximalDerivative(const Domain& dom, const MaximalDerivativeSpec& spec)
    : dom_(dom), spec_(spec), perimeter_(dom.perimeter()) {
  if (spec.r < 0 || spec.j < 0 || spec.l < 0) throw DomainError("r, j, l must be >= 0");
  if (!(spec.density > 0)) throw DomainError("sampling density must be positive");
  if (spec.floor < 1) throw DomainError("sampling floor must be >= 1");
  const double mu_min = std::sqrt(dom.diameter()) + 1.0;
  mu_ = spec.mu > 0 ? spec.mu : mu_min;
  if (mu_ < mu_min * (1 - 1e-12)) throw DomainError("mu must be >= sqrt(diam) + 1");
  levels_.resize(kMaxLevel + 1);
}

const MaximalDerivative::Level& MaximalDerivative::level(std::size_t k) const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!levels_[k]) {
    auto lv = std::make_unique<Level>();
    const std::size_t M = std::size_t{32} << k;
    lv->pos.resize(M);
    lv->tangent.resize(M);
    lv->normal.resize(M);
    for (std::size_t i = 0; i < M; ++i) {
      const BoundaryPoint b = dom_.boundary_at(perimeter_ * static_cast<double>(i) / M);
      lv->pos[i] = b.position;
      lv->tangent[i] = b.tangent;
      lv->normal[i] = b.normal;
    }
    levels_[k] = std::move(lv);
  }
  return *levels_[k];
}

std::size_t MaximalDerivative::level_index(double radius) const {
  const double need = std::max<double>(spec_.floor, perimeter_ * spec_.density / (2.0 * radius));
  std::size_t k = 0;
  while (k < kMaxLevel && static_cast<double>(std::size_t{32} << k) < need) ++k;
  return k;
}

std::size_t MaximalDerivative::samples_for(const Vec2& xi, int n) const {
  return std::size_t{32} << level_index(mu_ * phi_n_gamma(dom_, xi, n));
}

double MaximalDerivative::eval(const PartialTable& T, const Vec2& xi, int n) const {
  const int a = spec_.tangential(), b = spec_.normal(), s = a + b;
  if (T.max_order() < s) throw DomainError("partial table order too low");
  std::vector<double> P(s + 1);
  for (int q = 0; q <= s; ++q) P[q] = T.eval(q, s - q, xi.x(), xi.y());
  const Projection proj = dom_.project(xi);
  const double R = mu_ * (std::sqrt(proj.distance) + 1.0 / n);
  // the nearest foot is always within mu phi since mu >= sqrt(diam) + 1
  double best = std::abs(directional(P, a, b, proj.foot.tangent, proj.foot.normal));
  const Level& lv = level(level_index(R));
  for (std::size_t i = 0; i < lv.pos.size(); ++i) {
    if ((lv.pos[i] - xi).squaredNorm() > R * R) continue;
    best = std::max(best, std::abs(directional(P, a, b, lv.tangent[i], lv.normal[i])));
  }
  return best;
}

double MaximalDerivative::operator()(const Polynomial& f, const Vec2& xi, int n) const {
  if (f.dim() != 2) throw DomainError("maximal_derivative needs a bivariate polynomial");
  if (n < 1) throw DomainError("n must be >= 1");
  return eval(PartialTable(f, spec_.order()), xi, n);
}

double maximal_derivative(const Domain& dom, const MaximalDerivativeSpec& spec, const Polynomial& f,
                          const Vec2& xi, int n) {
  return MaximalDerivative(dom, spec)(f, xi, n);
}

BernsteinValue bernstein_functional(const Domain& dom, const MaximalDerivativeSpec& spec,
                                    const Polynomial& f, int n, double p) {
  if (!(p >= 1.0)) throw DomainError("p must be >= 1 (or infinity)");
  if (n < 1) throw DomainError("n must be >= 1");
  if (f.dim() != 2) throw DomainError("bernstein_functional needs a bivariate polynomial");
  const MaximalDerivative D(dom, spec);
  const PartialTable T(f, spec.order());
  const QuadratureRule rule = domain_rule(dom, 2 * n + 10);

  std::vector<Vec2> pts = rule.nodes;
  if (std::isinf(p)) {
    const std::size_t nb = 256;
    const double P = dom.perimeter();
    for (std::size_t i = 0; i < nb; ++i) {
      const BoundaryPoint b = dom.boundary_at(P * (i + 0.5) / nb);
      pts.push_back(b.position);
      const Vec2 in = b.position - b.normal / (static_cast<double>(n) * n);
      if (dom.contains(in)) pts.push_back(in);
    }
  }
  std::vector<double> vals(pts.size());
  parallel_for(pts.size(), [&](std::size_t k) {
    const double phi = phi_n_gamma(dom, pts[k], n);
    vals[k] = std::pow(phi, spec.j) * D.eval(T, pts[k], n);
  });

  BernsteinValue out;
  out.nodes = pts.size();
  if (std::isinf(p)) {
    out.functional = *std::max_element(vals.begin(), vals.end());
  } else {
    double s = 0.0;
    for (std::size_t k = 0; k < vals.size(); ++k) s += rule.weights[k] * std::pow(vals[k], p);
    out.functional = std::pow(s, 1.0 / p);
  }
  out.norm = reference_norm(dom, f, p);
  out.ratio = out.norm > 0 ? out.functional / out.norm : 0.0;
  return out;
}

namespace {

GrowthFit fit_growth(int order, const std::vector<int>& n_grid, std::size_t trials,
                     const std::function<double(int, std::size_t)>& ratio) {
  if (trials == 0) throw DomainError("need at least one trial");
  GrowthFit fit;
  std::vector<double> xs, ys;
  for (int n : n_grid) {
    if (n < 1) throw DomainError("degrees must be >= 1");
    if (n < order) {
      fit.n_skipped.push_back(n);
      continue;
    }
    double logsum = 0.0;
    bool zero = false;
    for (std::size_t t = 0; t < trials; ++t) {
      const double r = ratio(n, t);
      if (!(r > 0)) {
        zero = true;
        break;
      }
      logsum += std::log(r);
    }
    fit.n_used.push_back(n);
    fit.ratios.push_back(zero ? 0.0 : std::exp(logsum / static_cast<double>(trials)));
    if (!zero) {
      xs.push_back(n);
      ys.push_back(fit.ratios.back());
    }
  }
  if (xs.size() < 2) {
    fit.degenerate = true;
    fit.slope = std::numeric_limits<double>::quiet_NaN();
  } else {
    fit.slope = loglog_slope(xs, ys);
  }
  return fit;
}

}  // namespace

GrowthFit growth_exponent(const Domain& dom, const MaximalDerivativeSpec& spec,
                          const std::function<Polynomial(int, std::size_t)>& family, double p,
                          const std::vector<int>& n_grid, std::size_t trials) {
  return fit_growth(spec.order(), n_grid, trials, [&](int n, std::size_t t) {
    return bernstein_functional(dom, spec, family(n, t), n, p).ratio;
  });
}

GrowthFit patch_growth_exponent(const GraphPatch& patch,
                                const std::function<Polynomial(int, std::size_t)>& family, int r,
                                int i, int j, double p, double lambda, const std::vector<int>& n_grid,
                                std::size_t trials) {
  return fit_growth(r + i + j, n_grid, trials, [&](int n, std::size_t t) {
    return patch_bernstein_check(patch, family(n, t), r, i, j, p, lambda, n).ratio;
  });
}

std::function<Polynomial(int, std::size_t)> random_family(const Domain& dom, std::uint64_t seed) {
  return [dom, seed](int n, std::size_t trial) {
    const OrthonormalBasis b = orthonormal_basis(dom, n);
    return random_orthonormal_polynomial(b, stream_seed(seed, trial, static_cast<std::uint64_t>(n)));
  };
}

Polynomial to_patch_local(const GraphPatch& patch, const Polynomial& f_global) {
  if (f_global.dim() != 2) throw DomainError("patch polynomials are bivariate");
  const Vec2 ex = patch.ex(), ey = patch.ey(), o = patch.origin();
  return affine_substitute(f_global, 2, {ex.x(), ey.x(), ex.y(), ey.y()}, {o.x(), o.y()});
}

PatchBernstein patch_bernstein_check(const GraphPatch& patch, const Polynomial& f_global, int r,
                                     int i, int j, double p, double lambda, int n, int order) {
  if (r < 0 || i < 0 || j < 0) throw DomainError("r, i, j must be >= 0");
  if (!(p >= 1.0)) throw DomainError("p must be >= 1 (or infinity)");
  if (!(lambda >= 1.0)) throw DomainError("lambda must be >= 1");
  if (n < 1) throw DomainError("n must be >= 1");
  const Polynomial f = to_patch_local(patch, f_global);
  if (order <= 0) order = std::max(20, 2 * f.degree() + 10);
  const QuadratureRule G = patch_rule(patch, order, order, 1.0);
  const QuadratureRule Gl = patch_rule(patch, order, order, lambda);
  const PartialTable T(f, r + i + j);

  auto lhs = [&](const Vec2& x) {
    const double phi = std::sqrt(std::max(0.0, patch.delta(x.x(), x.y()))) + 1.0 / n;
    return std::pow(phi, i) *
           std::abs(tangential_partial(T, patch.dg(x.x()), r, i + j, x.x(), x.y()));
  };
  PatchBernstein out;
  if (std::isinf(p)) {
    double a = 0.0, b = 0.0;
    for (const Vec2& x : G.nodes) {
      a = std::max(a, lhs(x));
      b = std::max(b, std::abs(f(x.x(), x.y())));
    }
    for (const Vec2& x : Gl.nodes) b = std::max(b, std::abs(f(x.x(), x.y())));
    out.functional = a;
    out.norm = b;
  } else {
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < G.size(); ++k) a += G.weights[k] * std::pow(lhs(G.nodes[k]), p);
    for (std::size_t k = 0; k < Gl.size(); ++k)
      b += Gl.weights[k] * std::pow(std::abs(f(Gl.nodes[k].x(), Gl.nodes[k].y())), p);
    out.functional = std::pow(a, 1.0 / p);
    out.norm = std::pow(b, 1.0 / p);
  }
  out.ratio = out.norm > 0 ? out.functional / out.norm : 0.0;
  return out;
}

FrameCheck tangential_frame_check(const std::function<std::array<double, 2>(double, double)>& grad_g,
                                  const Polynomial& f, const std::array<int, 2>& alpha,
                                  const std::array<double, 3>& xi) {
  if (f.dim() != 3) throw DomainError("tangential_frame_check needs a trivariate polynomial");
  if (alpha[0] < 0 || alpha[1] < 0) throw DomainError("alpha must be nonnegative");
  if (alpha[0] + alpha[1] > 4) throw DomainError("|alpha| must be <= 4");
  const auto dg = grad_g(xi[0], xi[1]);
  std::vector<std::vector<double>> dirs;
  for (int k = 0; k < alpha[0]; ++k) dirs.push_back({1.0, 0.0, dg[0]});
  for (int k = 0; k < alpha[1]; ++k) dirs.push_back({0.0, 1.0, dg[1]});
  FrameCheck out;
  if (dirs.empty()) {
    out.direct = out.kemperman = f(std::span<const double>(xi));
    out.terms = 1;
    return out;
  }
  out.direct = mixed_directional(f, dirs)(std::span<const double>(xi));
  const auto terms = kemperman_expand(dirs);
  out.terms = terms.size();
  out.kemperman = apply_kemperman(f, terms)(std::span<const double>(xi));
  out.difference = std::abs(out.direct - out.kemperman);
  return out;
}

NoncommutativityReport noncommutativity_witness(const GraphPatch& patch, const Polynomial& f_local,
                                                std::size_t probes, std::uint64_t seed,
                                                double tol) {
  if (f_local.dim() != 2) throw DomainError("noncommutativity_witness needs a bivariate polynomial");
  const PartialTable T(f_local, 2);
  NoncommutativityReport rep;
  rep.probes = probes;
  const auto pts = halton2(0, probes, seed);
  for (const auto& [u, v] : pts) {
    const Vec2 x = sample_patch_point(patch, u, v);
    const auto jet = patch.jet(x.x());
    const double g1 = jet[1], g2 = jet[2];
    const double f2 = T.eval(0, 1, x.x(), x.y()), f11 = T.eval(2, 0, x.x(), x.y()),
                 f12 = T.eval(1, 1, x.x(), x.y()), f22 = T.eval(0, 2, x.x(), x.y());
    // D1 (f1 + g'(x) f2) with the coefficient differentiated too
    const double d1d1 = (f11 + g2 * f2 + g1 * f12) + g1 * (f12 + g1 * f22);
    const double d2 = f11 + 2.0 * g1 * f12 + g1 * g1 * f22;
    const double diff = std::abs(d1d1 - d2);
    if (diff > rep.max_difference) {
      rep.max_difference = diff;
      rep.where = x;
    }
    if (diff > tol * std::max(1.0, std::abs(d2))) rep.witness = true;
  }
  return rep;
}

}  // namespace c2poly
