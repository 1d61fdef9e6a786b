#include "c2poly/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "c2poly/patch.hpp"
#include "c2poly/random.hpp"

namespace c2poly {

namespace {

GaussRule1D compute_gauss_legendre(int n) {
  GaussRule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

// Neumaier-compensated accumulator.
struct Sum {
  double s = 0.0, c = 0.0;
  void add(double v) {
    const double t = s + v;
    if (std::abs(s) >= std::abs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

QuadratureRule polar_rule(const Vec2& c, double ax, double ay, int exactness) {
  const int nr = exactness / 2 + 2;
  const int nt = exactness + 2;
  const auto& gl = gauss_legendre(nr);
  QuadratureRule rule;
  rule.exactness = exactness;
  rule.nodes.reserve(static_cast<std::size_t>(nr * nt));
  rule.weights.reserve(static_cast<std::size_t>(nr * nt));
  for (int i = 0; i < nr; ++i) {
    const double r = 0.5 * (gl.x[i] + 1.0);
    const double wr = 0.5 * gl.w[i] * r;
    for (int j = 0; j < nt; ++j) {
      const double th = 2 * kPi * (j + 0.5) / nt;
      rule.nodes.push_back(c + Vec2(ax * r * std::cos(th), ay * r * std::sin(th)));
      rule.weights.push_back(wr * (2 * kPi / nt) * ax * ay);
    }
  }
  return rule;
}

// Iterated integration for implicit domains.
struct ImplicitSlicer {
  const Domain& dom;
  std::vector<double> breaks;  // sorted x-values of vertical tangents
  double scale;

  explicit ImplicitSlicer(const Domain& d) : dom(d) {
    const auto& pts = dom.polyline();
    const Box bb = dom.bbox();
    scale = std::max(bb.width(), bb.height());
    const std::size_t m = pts.size();
    std::vector<double> xs;
    for (std::size_t i = 0; i < m; ++i) {
      const Vec2& a = pts[(i + m - 1) % m];
      const Vec2& b = pts[i];
      const Vec2& c = pts[(i + 1) % m];
      const double d1 = b.x() - a.x(), d2 = c.x() - b.x();
      if (d1 * d2 > 0) continue;
      if (d1 == 0 && d2 == 0) continue;
      // Local extremum of x along the curve: solve Phi = 0, Phi_y = 0.
      Vec2 p = b;
      for (int it = 0; it < 50; ++it) {
        const Vec2 g = dom.level_gradient(p);
        const Mat2 H = dom.level_hessian(p);
        Mat2 J;
        J << g.x(), g.y(), H(1, 0), H(1, 1);
        const Vec2 F(dom.level(p), g.y());
        const Vec2 step = J.fullPivLu().solve(-F);
        if (!step.allFinite()) break;
        p += step;
        if (step.norm() < 1e-15 * scale) break;
      }
      if ((p - b).norm() > 0.05 * scale) p = b;
      xs.push_back(p.x());
    }
    std::sort(xs.begin(), xs.end());
    for (double x : xs)
      if (breaks.empty() || x - breaks.back() > 1e-10 * scale) breaks.push_back(x);
    if (breaks.size() < 2) throw NumericalError("implicit quadrature: could not locate x-extent");
  }

  // Roots of Phi(x, .) as (lo, hi) pairs bounding interior segments.
  std::vector<std::pair<double, double>> slices(double x) const {
    const auto& pts = dom.polyline();
    const std::size_t m = pts.size();
    std::vector<double> roots;
    for (std::size_t i = 0; i < m; ++i) {
      const Vec2& a = pts[i];
      const Vec2& b = pts[(i + 1) % m];
      if ((a.x() - x) * (b.x() - x) > 0 || a.x() == b.x()) continue;
      if (b.x() == x && ((pts[(i + 2) % m].x() - x) * (a.x() - x) < 0)) continue;
      const double w = (x - a.x()) / (b.x() - a.x());
      double y = a.y() + w * (b.y() - a.y());
      // Safeguarded Newton in y.
      double lo = std::min(a.y(), b.y()) - 0.01 * scale, hi = std::max(a.y(), b.y()) + 0.01 * scale;
      double flo = dom.level(Vec2(x, lo)), fhi = dom.level(Vec2(x, hi));
      const bool bracket = flo * fhi < 0;
      for (int it = 0; it < 100; ++it) {
        const Vec2 p(x, y);
        const double f = dom.level(p);
        const double fy = dom.level_gradient(p).y();
        double next = fy != 0 ? y - f / fy : y;
        if (bracket) {
          if ((f < 0) == (flo < 0)) {
            lo = y;
            flo = f;
          } else {
            hi = y;
            fhi = f;
          }
          if (!(next > std::min(lo, hi) && next < std::max(lo, hi))) next = 0.5 * (lo + hi);
        }
        if (std::abs(next - y) < 1e-15 * scale) {
          y = next;
          break;
        }
        y = next;
      }
      roots.push_back(y);
    }
    std::sort(roots.begin(), roots.end());
    std::vector<std::pair<double, double>> out;
    for (std::size_t k = 0; k + 1 < roots.size(); ++k) {
      const double mid = 0.5 * (roots[k] + roots[k + 1]);
      if (roots[k + 1] - roots[k] > 0 && dom.level(Vec2(x, mid)) < 0) {
        out.emplace_back(roots[k], roots[k + 1]);
        ++k;
      }
    }
    return out;
  }

  // Root of Phi(x, .) between an interior point a and an exterior point b.
  double bracketed_root(double x, double a, double b) const {
    double fa = dom.level(Vec2(x, a));
    double y = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
      const double f = dom.level(Vec2(x, y));
      if (f == 0.0) return y;
      if ((f < 0) == (fa < 0)) {
        a = y;
        fa = f;
      } else {
        b = y;
      }
      if (std::abs(b - a) < 1e-15 * scale) break;
      const double fy = dom.level_gradient(Vec2(x, y)).y();
      double next = fy != 0 ? y - f / fy : 0.5 * (a + b);
      if (!(next > std::min(a, b) && next < std::max(a, b))) next = 0.5 * (a + b);
      if (std::abs(next - y) < 1e-16 * scale) return next;
      y = next;
    }
    return 0.5 * (a + b);
  }

  // Re-locate a slice at x starting from the previous slice (centre c, half width w).
  bool track(double x, double& c, double& w) const {
    double y0 = c;
    if (dom.level(Vec2(x, y0)) >= 0) {
      // Slide to the minimum of Phi(x, .) near the old centre.
      for (int it = 0; it < 20; ++it) {
        const Vec2 p(x, y0);
        const double gy = dom.level_gradient(p).y(), hyy = dom.level_hessian(p)(1, 1);
        if (!(hyy > 0)) break;
        const double step = std::clamp(-gy / hyy, -w - 1e-12 * scale, w + 1e-12 * scale);
        y0 += step;
        if (std::abs(step) < 1e-15 * scale) break;
      }
      if (dom.level(Vec2(x, y0)) >= 0) return false;
    }
    auto outward = [&](double dir) {
      double d = std::max(0.25 * w, 1e-9 * scale);
      for (int k = 0; k < 80; ++k) {
        const double y = y0 + dir * d;
        if (dom.level(Vec2(x, y)) > 0) return bracketed_root(x, y0, y);
        d *= 2;
      }
      throw NumericalError("implicit quadrature: slice not bounded");
    };
    const double lo = outward(-1.0), hi = outward(1.0);
    c = 0.5 * (lo + hi);
    w = 0.5 * (hi - lo);
    return true;
  }

  QuadratureRule rule(int ny, int ntheta) const {
    QuadratureRule r;
    const auto& gt = gauss_legendre(ntheta);
    const auto& gy = gauss_legendre(ny);
    for (std::size_t seg = 0; seg + 1 < breaks.size(); ++seg) {
      const double xa = breaks[seg], xb = breaks[seg + 1];
      const double half = 0.5 * (xb - xa), mid = 0.5 * (xb + xa);
      const auto start = slices(mid);
      std::vector<std::vector<std::pair<double, double>>> at(ntheta);
      // March from the middle towards each end so that slices pinching at a
      // vertical tangent are followed rather than re-found on the polyline.
      for (int dir : {-1, 1}) {
        std::vector<std::pair<double, double>> cw;
        for (const auto& [lo, hi] : start) cw.emplace_back(0.5 * (lo + hi), 0.5 * (hi - lo));
        std::vector<bool> alive(cw.size(), true);
        const int first = dir > 0 ? ntheta / 2 : ntheta / 2 - 1;
        for (int i = first; i >= 0 && i < ntheta; i += dir) {
          const double th = 0.5 * kPi * (gt.x[i] + 1.0);
          const double x = mid - half * std::cos(th);
          for (std::size_t k = 0; k < cw.size(); ++k) {
            if (!alive[k]) continue;
            alive[k] = track(x, cw[k].first, cw[k].second);
            if (alive[k]) at[i].emplace_back(cw[k].first - cw[k].second, cw[k].first + cw[k].second);
          }
        }
      }
      for (int i = 0; i < ntheta; ++i) {
        const double th = 0.5 * kPi * (gt.x[i] + 1.0);
        const double x = mid - half * std::cos(th);
        const double wx = gt.w[i] * 0.5 * kPi * half * std::sin(th);
        for (const auto& [ylo, yhi] : at[i]) {
          const double hy = 0.5 * (yhi - ylo), my = 0.5 * (yhi + ylo);
          for (int j = 0; j < ny; ++j) {
            r.nodes.emplace_back(x, my + hy * gy.x[j]);
            r.weights.push_back(wx * hy * gy.w[j]);
          }
        }
      }
    }
    return r;
  }
};

QuadratureRule implicit_rule(const Domain& dom, int exactness) {
  ImplicitSlicer sl(dom);
  const int ny = exactness / 2 + 2;
  int nt = std::max(32, exactness + 8);
  QuadratureRule prev = sl.rule(ny, nt);
  // Converge on the moments up to the exactness degree.
  auto probe = [&](const QuadratureRule& r) {
    std::vector<double> v;
    const int pd = std::min(exactness, 6);
    for (int k = 0; k <= pd; ++k)
      for (int b = 0; b <= k; ++b) {
        Sum s;
        for (std::size_t i = 0; i < r.size(); ++i)
          s.add(r.weights[i] * std::pow(r.nodes[i].x(), k - b) * std::pow(r.nodes[i].y(), b));
        v.push_back(s.value());
      }
    return v;
  };
  auto pv = probe(prev);
  double err = std::numeric_limits<double>::infinity();
  for (int level = 0; level < 6; ++level) {
    nt *= 2;
    QuadratureRule next = sl.rule(ny, nt);
    auto nv = probe(next);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < nv.size(); ++i) {
      num = std::max(num, std::abs(nv[i] - pv[i]));
      den = std::max(den, std::abs(nv[i]));
    }
    err = num / std::max(den, 1e-300);
    prev = std::move(next);
    pv = std::move(nv);
    if (err < 1e-12) {
      prev.exactness = exactness;
      return prev;
    }
  }
  throw NumericalError("implicit quadrature: refinement exhausted, achieved relative error " +
                       std::to_string(err));
}

}  // namespace

const GaussRule1D& gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: order must be >= 1");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule1D>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule1D>(compute_gauss_legendre(n));
  return *slot;
}

double QuadratureRule::total_weight() const {
  Sum s;
  for (double w : weights) s.add(w);
  return s.value();
}

QuadratureRule domain_rule(const Domain& dom, int exactness) {
  if (exactness < 0) throw DomainError("domain_rule: exactness must be >= 0");
  QuadratureRule r;
  switch (dom.kind()) {
    case Domain::Kind::Disk:
      r = polar_rule(dom.center(), dom.radius(), dom.radius(), exactness);
      break;
    case Domain::Kind::Ellipse:
      r = polar_rule(dom.center(), dom.semi_a(), dom.semi_b(), exactness);
      break;
    default:
      r = implicit_rule(dom, exactness);
  }
  r.region = dom.kind_name();
  return r;
}

double centered_disk_moment(double r, int a, int b) {
  if (a % 2 || b % 2) return 0.0;
  const double lg = std::lgamma((a + 1) / 2.0) + std::lgamma((b + 1) / 2.0) -
                    std::lgamma((a + b) / 2.0 + 1.0);
  return 2.0 * std::exp(lg) / (a + b + 2) * std::pow(r, a + b + 2);
}

std::vector<double> moments(const Domain& dom, int n) {
  if (n < 0) throw DomainError("moments: degree must be >= 0");
  const auto ex = monomial_exponents(2, n);
  std::vector<double> out(ex.size(), 0.0);
  if (dom.kind() == Domain::Kind::Implicit) {
    const QuadratureRule rule = domain_rule(dom, n);
    for (std::size_t k = 0; k < ex.size(); ++k) {
      Sum s;
      for (std::size_t i = 0; i < rule.size(); ++i)
        s.add(rule.weights[i] * std::pow(rule.nodes[i].x(), ex[k][0]) *
              std::pow(rule.nodes[i].y(), ex[k][1]));
      out[k] = s.value();
    }
    return out;
  }
  // Affine image of the unit disk: x = cx + sx u, y = cy + sy v.
  const Vec2 c = dom.center();
  const double sx = dom.kind() == Domain::Kind::Disk ? dom.radius() : dom.semi_a();
  const double sy = dom.kind() == Domain::Kind::Disk ? dom.radius() : dom.semi_b();
  for (std::size_t k = 0; k < ex.size(); ++k) {
    const int p = ex[k][0], q = ex[k][1];
    Sum s;
    for (int i = 0; i <= p; i += 1)
      for (int j = 0; j <= q; j += 1) {
        if (i % 2 || j % 2) continue;
        s.add(binom(p, i) * binom(q, j) * std::pow(c.x(), p - i) * std::pow(c.y(), q - j) *
              std::pow(sx, i) * std::pow(sy, j) * centered_disk_moment(1.0, i, j));
      }
    out[k] = s.value() * sx * sy;
  }
  return out;
}

double integrate(const QuadratureRule& rule, const Field& f) {
  Sum s;
  for (std::size_t i = 0; i < rule.size(); ++i) s.add(rule.weights[i] * f(rule.nodes[i]));
  return s.value();
}

double integrate(const QuadratureRule& rule, const Polynomial& f) {
  Sum s;
  for (std::size_t i = 0; i < rule.size(); ++i)
    s.add(rule.weights[i] * f(rule.nodes[i].x(), rule.nodes[i].y()));
  return s.value();
}

double integrate_by_moments(const Polynomial& p, const std::vector<double>& mom) {
  if (p.dim() != 2) throw DomainError("integrate_by_moments: bivariate only");
  if (mom.size() < p.coeffs().size()) throw DomainError("integrate_by_moments: not enough moments");
  Sum s;
  for (std::size_t i = 0; i < p.coeffs().size(); ++i) s.add(p.coeffs()[i] * mom[i]);
  return s.value();
}

double l2_norm_squared_gram(const Polynomial& p, const std::vector<double>& mom) {
  if (p.dim() != 2) throw DomainError("l2_norm_squared_gram: bivariate only");
  const auto ex = monomial_exponents(2, p.degree());
  if (mom.size() < monomial_count(2, 2 * p.degree()))
    throw DomainError("l2_norm_squared_gram: need moments up to twice the degree");
  Sum s;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    if (p.coeffs()[i] == 0.0) continue;
    for (std::size_t j = 0; j < ex.size(); ++j) {
      const Exponents e{ex[i][0] + ex[j][0], ex[i][1] + ex[j][1], 0};
      s.add(p.coeffs()[i] * p.coeffs()[j] * mom[monomial_index(2, e)]);
    }
  }
  return s.value();
}

double sup_norm(const Domain& dom, const Field& f, const QuadratureRule& rule,
                std::size_t boundary_samples) {
  const Box bb = dom.bbox();
  const double scale = std::max(bb.width(), bb.height());
  double best = 0.0;
  // Top interior candidates.
  std::vector<std::pair<double, std::size_t>> top;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = std::abs(f(rule.nodes[i]));
    best = std::max(best, v);
    top.emplace_back(v, i);
  }
  const std::size_t keep = std::min<std::size_t>(3, top.size());
  std::partial_sort(top.begin(), top.begin() + keep, top.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  const double h = 1e-5 * scale;
  for (std::size_t t = 0; t < keep; ++t) {
    Vec2 x = rule.nodes[top[t].second];
    const double sgn = f(x) >= 0 ? 1.0 : -1.0;
    auto F = [&](const Vec2& p) { return sgn * f(p); };
    double fx = F(x);
    for (int it = 0; it < 20; ++it) {
      const Vec2 ex(h, 0), ey(0, h);
      const Vec2 g((F(x + ex) - F(x - ex)) / (2 * h), (F(x + ey) - F(x - ey)) / (2 * h));
      Mat2 H;
      H(0, 0) = (F(x + ex) - 2 * fx + F(x - ex)) / (h * h);
      H(1, 1) = (F(x + ey) - 2 * fx + F(x - ey)) / (h * h);
      H(0, 1) = H(1, 0) = (F(x + ex + ey) - F(x + ex - ey) - F(x - ex + ey) + F(x - ex - ey)) / (4 * h * h);
      Vec2 step = -H.ldlt().solve(g);
      if (!(H.determinant() > 0 && H(0, 0) < 0) || !step.allFinite()) break;
      if (step.norm() > 0.05 * scale) step *= 0.05 * scale / step.norm();
      const Vec2 y = x + step;
      if (!dom.contains(y, 0.0)) break;
      const double fy = F(y);
      if (fy <= fx) break;
      x = y;
      fx = fy;
      if (step.norm() < 1e-12 * scale) break;
    }
    best = std::max(best, std::abs(fx));
  }
  // Boundary.
  const double P = dom.perimeter();
  std::vector<std::pair<double, double>> bvals;
  for (std::size_t k = 0; k < boundary_samples; ++k) {
    const double s = P * k / boundary_samples;
    bvals.emplace_back(std::abs(f(dom.boundary_at(s).position)), s);
  }
  const std::size_t bkeep = std::min<std::size_t>(4, bvals.size());
  std::partial_sort(bvals.begin(), bvals.begin() + bkeep, bvals.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  const double hs = 1e-4 * P / std::max<std::size_t>(boundary_samples, 1);
  for (std::size_t t = 0; t < bkeep; ++t) {
    double s = bvals[t].second;
    auto F = [&](double u) { return std::abs(f(dom.boundary_at(u).position)); };
    double fs = F(s);
    best = std::max(best, fs);
    for (int it = 0; it < 20; ++it) {
      const double fp = F(s + hs), fm = F(s - hs);
      const double d1 = (fp - fm) / (2 * hs), d2 = (fp - 2 * fs + fm) / (hs * hs);
      if (!(d2 < 0)) break;
      double step = -d1 / d2;
      const double cap = P / boundary_samples;
      step = std::clamp(step, -cap, cap);
      const double fn = F(s + step);
      if (fn <= fs) break;
      s += step;
      fs = fn;
      if (std::abs(step) < 1e-13 * P) break;
    }
    best = std::max(best, fs);
  }
  return best;
}

double lp_norm(const Domain& dom, const Field& f, double p, const QuadratureRule& rule) {
  if (rule.region != dom.kind_name())
    throw DomainError("lp_norm: rule was built for region '" + rule.region + "'");
  if (std::isinf(p)) return sup_norm(dom, f, rule);
  if (!(p > 0)) throw DomainError("lp_norm: p must be positive");
  Sum s;
  for (std::size_t i = 0; i < rule.size(); ++i) s.add(rule.weights[i] * std::pow(std::abs(f(rule.nodes[i])), p));
  return std::pow(s.value(), 1.0 / p);
}

double lp_norm(const Domain& dom, const Polynomial& f, double p, const QuadratureRule& rule) {
  return lp_norm(dom, Field([&f](const Vec2& x) { return f(x.x(), x.y()); }), p, rule);
}

QuadratureRule patch_rule(const GraphPatch& patch, int base_order, int depth_order, double lambda) {
  if (base_order < 1 || depth_order < 1) throw DomainError("patch_rule: orders must be >= 1");
  const auto& gx = gauss_legendre(base_order);
  const auto& gs = gauss_legendre(depth_order);
  QuadratureRule r;
  r.region = "patch";
  const double hb = lambda * patch.base(), D = lambda * patch.depth();
  for (int i = 0; i < base_order; ++i) {
    const double x = hb * gx.x[i];
    const double gxv = patch.g(x);
    for (int j = 0; j < depth_order; ++j) {
      const double s = 0.5 * (gs.x[j] + 1.0);
      r.nodes.emplace_back(x, gxv - s * D);
      r.weights.push_back(gx.w[i] * hb * gs.w[j] * 0.5 * D);
    }
  }
  return r;
}

}  // namespace c2poly

namespace c2poly {

namespace {

// T_a(u_x) T_b(u_y) over the exponents (a, b) in storage order; far better
// conditioned on the unit box than raw monomials.
Eigen::VectorXd u_chebyshev(int n, const Vec2& u) {
  Eigen::VectorXd m(static_cast<Eigen::Index>(monomial_count(2, n)));
  const auto ex = monomial_exponents(2, n);
  std::vector<double> tx(n + 1, 1.0), ty(n + 1, 1.0);
  if (n >= 1) {
    tx[1] = u.x();
    ty[1] = u.y();
  }
  for (int k = 2; k <= n; ++k) {
    tx[k] = 2.0 * u.x() * tx[k - 1] - tx[k - 2];
    ty[k] = 2.0 * u.y() * ty[k - 1] - ty[k - 2];
  }
  for (std::size_t i = 0; i < ex.size(); ++i) m[static_cast<Eigen::Index>(i)] = tx[ex[i][0]] * ty[ex[i][1]];
  return m;
}

// Column i: u-monomial coefficients of the i-th Chebyshev product.
Eigen::MatrixXd chebyshev_to_monomial(int n) {
  std::vector<std::vector<double>> T(n + 1);  // T[k][i]: coefficient of u^i in T_k
  for (int k = 0; k <= n; ++k) {
    T[k].assign(n + 1, 0.0);
    if (k == 0) T[k][0] = 1.0;
    else if (k == 1) T[k][1] = 1.0;
    else {
      for (int i = 0; i < n; ++i) T[k][i + 1] += 2.0 * T[k - 1][i];
      for (int i = 0; i <= n; ++i) T[k][i] -= T[k - 2][i];
    }
  }
  const auto ex = monomial_exponents(2, n);
  const Eigen::Index K = static_cast<Eigen::Index>(ex.size());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(K, K);
  for (Eigen::Index c = 0; c < K; ++c) {
    const int a = ex[c][0], b = ex[c][1];
    for (int i = 0; i <= a; ++i)
      for (int j = 0; j <= b; ++j) {
        const double v = T[a][i] * T[b][j];
        if (v != 0.0) C(static_cast<Eigen::Index>(monomial_index(2, {i, j, 0})), c) = v;
      }
  }
  return C;
}

Eigen::MatrixXd weighted_vandermonde(const QuadratureRule& rule, int n, const Vec2& shift,
                                     double scale) {
  const Eigen::Index K = static_cast<Eigen::Index>(monomial_count(2, n));
  Eigen::MatrixXd V(static_cast<Eigen::Index>(rule.size()), K);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    if (rule.weights[i] < 0) throw NumericalError("orthonormal_basis needs a positive rule");
    V.row(static_cast<Eigen::Index>(i)) =
        std::sqrt(rule.weights[i]) * u_chebyshev(n, (rule.nodes[i] - shift) / scale).transpose();
  }
  return V;
}

}  // namespace

Eigen::VectorXd OrthonormalBasis::eval(const Vec2& x) const {
  return coef.transpose() * u_chebyshev(n, (x - shift) / scale);
}

Polynomial OrthonormalBasis::poly(std::size_t k) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(coef.cols());
  c[static_cast<Eigen::Index>(k)] = 1.0;
  return combine(c);
}

Polynomial OrthonormalBasis::combine(const Eigen::VectorXd& c) const {
  if (c.size() != coef.cols()) throw DomainError("coefficient count does not match the basis");
  const Eigen::VectorXd m = chebyshev_to_monomial(n) * (coef * c);
  const Polynomial pu(2, n, std::vector<double>(m.data(), m.data() + m.size()));
  const double is = 1.0 / scale;
  return affine_substitute(pu, 2, {is, 0.0, 0.0, is}, {-shift.x() * is, -shift.y() * is});
}

OrthonormalBasis orthonormal_basis(const Domain& dom, int n) {
  if (n < 0) throw DomainError("basis degree must be >= 0");
  OrthonormalBasis b;
  b.n = n;
  const Box bb = dom.bbox();
  b.shift = 0.5 * (bb.lo + bb.hi);
  b.scale = 0.5 * std::max(bb.width(), bb.height());
  const QuadratureRule rule = domain_rule(dom, 2 * n);
  const Eigen::MatrixXd V = weighted_vandermonde(rule, n, b.shift, b.scale);
  const Eigen::Index K = V.cols();
  if (V.rows() < K) throw NumericalError("quadrature rule too small for the basis");
  // QR twice; the second pass restores orthogonality lost to conditioning
  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(K, K);
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(V * C);
    const Eigen::MatrixXd R = qr.matrixQR().topRows(K).triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < K; ++k)
      if (!(std::abs(R(k, k)) > 1e-14 * std::abs(R(0, 0))))
        throw NumericalError("monomial Vandermonde is rank deficient");
    C = C * R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(K, K));
  }
  b.coef = C;

  const QuadratureRule check = domain_rule(dom, 2 * n + 2);
  const Eigen::MatrixXd Q = weighted_vandermonde(check, n, b.shift, b.scale) * C;
  const Eigen::MatrixXd G = Q.transpose() * Q;
  b.gram_error = (G - Eigen::MatrixXd::Identity(K, K)).cwiseAbs().maxCoeff();
  b.integrals = Eigen::VectorXd::Zero(K);
  for (std::size_t i = 0; i < rule.size(); ++i)
    b.integrals += rule.weights[i] * b.eval(rule.nodes[i]);
  return b;
}

Polynomial random_orthonormal_polynomial(const OrthonormalBasis& basis, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd c(static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = normal(rng);
  return basis.combine(c);
}

}  // namespace c2poly
