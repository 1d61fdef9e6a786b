#include "c2poly/parabola.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <Eigen/Dense>

namespace c2poly {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

double ParabolaFamily::default_M(const GraphPatch& patch) {
  return std::max({patch.M(), std::abs(patch.dg(0.0)), 1.0});
}

double ParabolaFamily::a_bar(const GraphPatch& patch, double M) {
  return (2.0 + 16.0 * patch.L() / patch.base()) * M * M + M;
}

ParabolaFamily::ParabolaFamily(const GraphPatch& patch, double A, std::optional<double> M,
                               std::optional<double> lambda)
    : patch_(patch), A_(A) {
  M_ = M ? *M : default_M(patch);
  if (!(M_ > 0)) throw DomainError("ParabolaFamily: M must be positive");
  if (M_ < patch.hess_max() * (1 - 1e-12) || M_ < std::abs(patch.dg(0.0)) * (1 - 1e-12))
    throw DomainError("ParabolaFamily: M must bound |g''| and |g'(0)|");
  if (!(A > M_)) throw DomainError("ParabolaFamily: A must exceed M");
  abar_ = a_bar(patch, M_);
  if (A < abar_ * (1 - 1e-12))
    throw DomainError("ParabolaFamily: A = " + std::to_string(A) + " is below A_bar = " +
                      std::to_string(abar_));
  lambda_ = lambda ? *lambda : 1.0 + 1.0 / M_;
  if (!(lambda_ > 1.0)) throw DomainError("ParabolaFamily: lambda must exceed 1");
  const double La = patch.depth();
  a0_ = std::sqrt(2.0 * La * lambda_ / (A + M_));
  a1_ = std::sqrt(2.0 * La / (A - M_));
}

double ParabolaFamily::Q(double z, double t) const {
  const auto j = patch_.jet(z);
  return j[0] + j[1] * t - 0.5 * A_ * t * t;
}

bool ParabolaFamily::in_E(double z, double t, double tol) const {
  const double la = lambda_ * a();
  const double s = tol * std::max(1.0, la);
  return std::abs(t) <= a0_ + s && std::abs(z) <= la + s && std::abs(z + t) <= la + s;
}

Vec2 ParabolaFamily::phi_map(double z, double t) const {
  if (!in_E(z, t)) throw DomainError("phi_map: (z, t) outside E_A");
  const Vec2 img(z + t, Q(z, t));
  // E_A is closed, so the image is checked against the closure of G(lambda).
  const double tol = 1e-10 * std::max(1.0, patch_.depth());
  const double depth = patch_.g(img.x()) - img.y();
  if (std::abs(img.x()) > lambda_ * a() + tol || depth < -tol || depth > lambda_ * patch_.depth() + tol)
    throw NumericalError("phi_map: image left G(lambda); M underestimates |g''|");
  return img;
}

std::pair<double, double> ParabolaFamily::phi_inverse(double x, double y) const {
  const double tol = 1e-12 * std::max(1.0, patch_.depth());
  if (std::abs(x) > a() * (1 + 1e-12)) throw DomainError("phi_inverse: x outside [-a, a]");
  const double target = patch_.g(x) - y;
  if (target < -tol || target > patch_.depth() + tol)
    throw DomainError("phi_inverse: point outside G");
  if (target <= 0) return {x, 0.0};
  auto h = [&](double s) {
    const auto j = patch_.jet(x - s);
    return patch_.g(x) - (j[0] + j[1] * s - 0.5 * A_ * s * s);
  };
  double lo = 0.0, hi = a1_;
  if (h(hi) < target - tol)
    throw NumericalError("phi_inverse: root not bracketed on [0, a1]; patch parameters violate the family bounds");
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {
    const double dh = (A_ + patch_.d2g(x - s)) * s;
    if (!(dh > 0)) break;
    const double next = s - (h(s) - target) / dh;
    if (!(next >= 0 && next <= a1_)) break;
    if (std::abs(next - s) <= 1e-17 * a1_) {
      s = next;
      break;
    }
    s = next;
  }
  return {x - s, s};
}

double ParabolaFamily::jacobian_det(double z, double t) const {
  return (A_ + patch_.d2g(z)) * std::abs(t);
}

double ParabolaFamily::w_A(double z, double t) const {
  return patch_.dg(z + t) - patch_.dg(z) + A_ * t;
}

double ParabolaFamily::u_A(double x, double y) const {
  const auto [z, t] = phi_inverse(x, y);
  return w_A(z, t);
}

UBounds u_bounds(const ParabolaFamily& fam, double x, double y, double rel_tol) {
  UBounds b;
  const auto [z, t] = fam.phi_inverse(x, y);
  const double A = fam.A(), M = fam.M();
  b.t = t;
  b.u = fam.w_A(z, t);
  b.delta = std::max(0.0, fam.patch().g(x) - y);
  const double sd = std::sqrt(b.delta);
  b.lower = (A - M) * std::sqrt(2.0) / std::sqrt(A + M) * sd;
  b.upper = (A + M) * std::sqrt(2.0) / std::sqrt(A - M) * sd;
  auto le = [&](double a, double c) { return a <= c + rel_tol * std::max(std::abs(a), std::abs(c)); };
  b.sqrt_bounds = le(b.lower, b.u) && le(b.u, b.upper);
  b.linear_bounds = le((A - M) * t, b.u) && le(b.u, (A + M) * t);
  b.depth_bounds = le(0.5 * (A - M) * t * t, b.delta) && le(b.delta, 0.5 * (A + M) * t * t);
  return b;
}

double tangential_partial(const PartialTable& T, double gp, int l, int j, double x, double y) {
  double s = 0.0, gk = 1.0;
  for (int k = 0; k <= l; ++k) {
    s += binom(l, k) * gk * T.eval(l - k, k + j, x, y);
    gk *= gp;
  }
  return s;
}

double s1_term(const ParabolaFamily& fam, const Polynomial& f, int r, double x0, double y0) {
  if (f.dim() != 2) throw DomainError("s1_term: bivariate polynomial required");
  if (r < 0) throw DomainError("s1_term: r must be non-negative");
  const double u = r > 0 ? fam.u_A(x0, y0) : 0.0;
  const std::vector<double> dir{1.0, fam.patch().dg(x0)};
  double s = 0.0;
  Polynomial d2j = f;
  for (int j = 0; j <= r; ++j) {
    if (j > 0) d2j = d2j.partial(1);
    const Polynomial term = directional_power(d2j, dir, r - j);
    s += binom(r, j) * std::pow(-u, j) * term(x0, y0);
  }
  return s;
}

Decomposition decomposition_check(const ParabolaFamily& fam, const Polynomial& f, int r,
                                  double x0, double y0) {
  Decomposition d;
  d.r = r;
  d.x0 = x0;
  d.y0 = y0;
  const auto [z0, t0] = fam.phi_inverse(x0, y0);
  d.z0 = z0;
  d.t0 = t0;
  const auto j = fam.patch().jet(z0);
  d.full = composite_derivative(f, z0, Quadratic{j[0], j[1], -fam.A()}, r, t0);
  d.s1 = s1_term(fam, f, r, x0, y0);
  d.residual = d.full - d.s1;
  // Terms of the closed form with at least one factor Q'' = -A, written in
  // the sheared frame where Q' = -u_A and the x-derivative is D^(i).
  const PartialTable T(f, r);
  const double u = fam.w_A(z0, t0), gp = fam.patch().dg(x0);
  double block = 0.0;
  for (int k = 1; 2 * k <= r; ++k)
    for (int a = 0; a + 2 * k <= r; ++a) {
      const int i = r - a - 2 * k;
      const double c = factorial(r) / (factorial(i) * factorial(a) * factorial(k) * std::ldexp(1.0, k));
      block += c * std::pow(-u, a) * std::pow(-fam.A(), k) * tangential_partial(T, gp, i, a + k, x0, y0);
    }
  d.curvature_block = block;
  d.mismatch = std::abs(d.s1 + block - d.full);
  return d;
}

std::vector<double> separated_a_grid(double abar, double M, int r) {
  if (r < 0) throw DomainError("separated_a_grid: r must be non-negative");
  if (!(abar > M && M > 0)) throw DomainError("separated_a_grid: need A_bar > M > 0");
  std::vector<double> A{abar};
  auto rhs = [M](double a) { return (a - M) / std::sqrt(a + M); };  // increasing for a > M
  for (int i = 0; i < r; ++i) {
    const double Ai = A.back();
    const double need = 2.0 * (Ai + M) / std::sqrt(Ai - M);
    double lo = Ai, hi = 2 * Ai;
    while (rhs(hi) <= need) hi *= 2;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (rhs(mid) > need)
        hi = mid;
      else
        lo = mid;
      if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) break;
    }
    A.push_back(hi);
  }
  return A;
}

VandermondeRecovery vandermonde_recover(const std::vector<ParabolaFamily>& fams,
                                        const Polynomial& f, int r, double x0, double y0,
                                        double max_condition) {
  if (static_cast<int>(fams.size()) != r + 1)
    throw DomainError("vandermonde_recover: need r + 1 families");
  const GraphPatch& patch = fams.front().patch();
  const double delta = patch.g(x0) - y0;
  if (!(delta > 0)) throw DomainError("vandermonde_recover: needs delta(x0, y0) > 0");
  using LD = long double;
  using MatL = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<LD, Eigen::Dynamic, 1>;
  const int n = r + 1;
  // S_1 grows like B^r |u_r| while u_0 can be O(1), so the sums and the
  // solve run in extended precision. The D^(r-j) d_2^j f values enter both
  // S_1 and the matrix-free side consistently, so their own rounding does
  // not matter.
  std::vector<LD> T(static_cast<std::size_t>(n));
  {
    const std::vector<double> dir{1.0, patch.dg(x0)};
    Polynomial d2j = f;
    for (int j = 0; j <= r; ++j) {
      if (j > 0) d2j = d2j.partial(1);
      T[static_cast<std::size_t>(j)] = directional_power(d2j, dir, r - j)(x0, y0);
    }
  }
  const LD sd = std::sqrt(static_cast<LD>(delta));
  MatL V(n, n);
  VecL S(n);
  VandermondeRecovery out;
  for (int i = 0; i < n; ++i) {
    const LD u = fams[static_cast<std::size_t>(i)].u_A(x0, y0);
    const LD B = -u / sd;
    out.nodes.push_back(static_cast<double>(B));
    LD s = 0, p = 1;
    for (int j = 0; j < n; ++j) {
      V(i, j) = std::pow(B, j);
      s += static_cast<LD>(binom(r, j)) * p * T[static_cast<std::size_t>(j)];
      p *= -u;
    }
    S(i) = s;
  }
  // Column equilibration before judging the conditioning.
  VecL scale(n);
  for (int j = 0; j < n; ++j) scale(j) = V.col(j).cwiseAbs().maxCoeff();
  const MatL Ve = V * scale.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<MatL> svd(Ve);
  const VecL sv = svd.singularValues();
  out.condition = static_cast<double>(sv(0) / sv(n - 1));
  if (!(out.condition <= max_condition))
    throw NumericalError("vandermonde_recover: condition number " + std::to_string(out.condition) +
                         " exceeds limit");
  const VecL ue = Ve.fullPivLu().solve(S);
  const PartialTable tab(f, r);
  const double gp = patch.dg(x0);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j) {
    out.recovered.push_back(static_cast<double>(ue(j) / scale(j)));
    out.direct.push_back(static_cast<double>(static_cast<LD>(binom(r, j)) * std::pow(sd, j) *
                                             static_cast<LD>(tangential_partial(tab, gp, r - j, j, x0, y0))));
    num = std::max(num, std::abs(out.recovered.back() - out.direct.back()));
    den = std::max(den, std::abs(out.direct.back()));
  }
  out.rel_error = den > 0 ? num / den : num;
  return out;
}

InjectivityReport injectivity_probe(const ParabolaFamily& fam, double h) {
  if (!(h > 0)) throw DomainError("injectivity_probe: h must be positive");
  InjectivityReport rep;
  rep.h = h;
  rep.eps_img = h * h * (fam.A() + fam.M());
  rep.worst_image_gap = std::numeric_limits<double>::infinity();
  const double la = fam.lambda() * fam.a();
  const int nz = static_cast<int>(std::floor(2 * la / h));
  const int nt = static_cast<int>(std::floor(fam.a0() / h));
  std::vector<Vec2> par, img;
  for (int i = 0; i <= nz; ++i)
    for (int k = 0; k <= nt; ++k) {
      const double z = -la + i * h, t = k * h;
      if (z + t > la) break;
      par.emplace_back(z, t);
      img.push_back(fam.phi_map(z, t));
    }
  rep.points = par.size();
  const double cell = rep.eps_img;
  auto key = [cell](const Vec2& p) {
    const auto ix = static_cast<std::int64_t>(std::floor(p.x() / cell));
    const auto iy = static_cast<std::int64_t>(std::floor(p.y() / cell));
    return std::make_pair(ix, iy);
  };
  struct PairHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const {
      return std::hash<std::int64_t>()(k.first * 73856093LL ^ k.second * 19349663LL);
    }
  };
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>, PairHash> grid;
  for (std::size_t q = 0; q < img.size(); ++q) grid[key(img[q])].push_back(q);
  for (std::size_t q = 0; q < img.size(); ++q) {
    const auto [kx, ky] = key(img[q]);
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = grid.find({kx + dx, ky + dy});
        if (it == grid.end()) continue;
        for (std::size_t o : it->second) {
          if (o <= q) continue;
          if ((par[q] - par[o]).norm() <= 10 * h) continue;
          const double gap = (img[q] - img[o]).norm();
          rep.worst_image_gap = std::min(rep.worst_image_gap, gap);
          if (gap < rep.eps_img) ++rep.violations;
        }
      }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

}  // namespace c2poly
