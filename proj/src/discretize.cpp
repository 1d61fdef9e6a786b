#include "c2poly/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "c2poly/parallel.hpp"
#include "c2poly/random.hpp"

namespace c2poly {

namespace {

void check_p(double p) {
  if (!(p >= 1.0)) throw DomainError("p must be >= 1 (or infinity)");
}

// Neumaier summation
struct Sum {
  double s = 0.0, c = 0.0;
  void add(double v) {
    const double t = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

double weighted_pnorm(const std::vector<double>& vals, const std::vector<double>& w, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : vals) m = std::max(m, std::abs(v));
    return m;
  }
  Sum s;
  for (std::size_t i = 0; i < vals.size(); ++i) s.add(std::pow(std::abs(vals[i]), p) * w[i]);
  return std::pow(std::max(0.0, s.value()), 1.0 / p);
}

}  // namespace

double discrete_norm(const Partition& part, const Field& f, double p) {
  check_p(p);
  if (part.measures.size() != part.size()) throw DomainError("partition measures missing");
  std::vector<double> vals(part.size());
  for (std::size_t j = 0; j < part.size(); ++j) vals[j] = f(part.reps()[j]);
  return weighted_pnorm(vals, part.measures, p);
}

double discrete_norm(const Partition& part, const Polynomial& f, double p) {
  if (f.dim() != 2) throw DomainError("discrete_norm needs a bivariate polynomial");
  return discrete_norm(part, Field([&f](const Vec2& x) { return f(x.x(), x.y()); }), p);
}

double reference_norm(const Domain& dom, const Polynomial& f, double p) {
  check_p(p);
  const int n = f.degree();
  if (std::isinf(p)) return lp_norm(dom, f, p, domain_rule(dom, std::max(2 * n, 24)));
  // |f|^p is smooth only for even integer p
  const bool smooth = p == std::floor(p) && static_cast<long>(p) % 2 == 0;
  const int E = smooth ? static_cast<int>(p) * n : static_cast<int>(std::ceil(p)) * n + 40;
  return lp_norm(dom, f, p, domain_rule(dom, E));
}

MZSweep mz_ratio_sweep(const Domain& dom, int n, double p, const std::vector<double>& deltas,
                       std::size_t trials, std::uint64_t seed, const MZOptions& opt) {
  check_p(p);
  if (n < 0) throw DomainError("degree must be >= 0");
  if (trials == 0) throw DomainError("need at least one trial");
  for (double d : deltas)
    if (!(d > 0)) throw DomainError("sweep values must be positive");

  // trial polynomials, normalised to unit L^p norm; shared by every delta
  const OrthonormalBasis basis = orthonormal_basis(dom, n);
  std::vector<Polynomial> polys(trials);
  parallel_for(trials, [&](std::size_t t) {
    Polynomial f = random_orthonormal_polynomial(basis, stream_seed(seed, t, 0x6d7aULL));
    const double nf = reference_norm(dom, f, p);
    if (!(nf > 0)) throw NumericalError("trial polynomial has zero norm");
    polys[t] = f * (1.0 / nf);
  });

  MZSweep out;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const double delta = deltas[k];
    const double sep = n > 0 ? delta / n : delta;
    const Net net = greedy_maximal_net(dom, sep, opt.candidates, stream_seed(seed, k, 0x6e6574ULL));
    const Partition part =
        make_partition(dom, net, opt.measure_samples, stream_seed(seed, k, 0x706172ULL));
    MZReport rep;
    rep.domain = dom.kind_name();
    rep.n = n;
    rep.delta = delta;
    rep.separation = sep;
    rep.p = p;
    rep.nodes = part.size();
    rep.samples = part.samples;
    rep.candidates = net.candidates;
    rep.unassigned = part.unassigned;
    rep.ratios.resize(trials);
    parallel_for(trials, [&](std::size_t t) { rep.ratios[t] = discrete_norm(part, polys[t], p); });
    rep.min_ratio = *std::min_element(rep.ratios.begin(), rep.ratios.end());
    rep.max_ratio = *std::max_element(rep.ratios.begin(), rep.ratios.end());
    rep.in_band = rep.min_ratio >= opt.band_lo && rep.max_ratio <= opt.band_hi;
    const bool pass = rep.in_band;
    out.reports.push_back(std::move(rep));
    if (pass && (!out.delta0 || delta > *out.delta0)) out.delta0 = delta;
    if (pass && opt.stop_at_first_pass) break;
  }
  return out;
}

OscillationSampler::OscillationSampler(const Domain& dom, const Net& net, double ell, double eps,
                                       int n, std::size_t osc_samples,
                                       std::size_t volume_samples, std::uint64_t seed)
    : osc_samples_(osc_samples), eps_(eps) {
  if (!(ell > 0) || !(eps > 0)) throw DomainError("ell and eps must be positive");
  if (n < 1) throw DomainError("oscillation functional needs n >= 1");
  if (osc_samples == 0 || volume_samples == 0) throw DomainError("sample counts must be positive");
  const double rv = eps / n, ro = ell * eps / n;
  const Box bb = dom.bbox();
  const std::size_t N = net.size();
  points_.resize(N);
  volumes_.resize(N);
  parallel_for(N, [&](std::size_t j) {
    const Vec2 xi = net.centers[j];
    const double dxi = net.dists.size() == N ? net.dists[j] : dom.dist(xi);
    const double sxi = std::sqrt(dxi);
    auto clip = [&](double r) {
      return Box{(xi - Vec2(r, r)).cwiseMax(bb.lo), (xi + Vec2(r, r)).cwiseMin(bb.hi)};
    };
    auto rho_to = [&](const Vec2& eta) -> double {
      const double e = (eta - xi).norm();
      if (!dom.contains(eta, 0.0)) return std::numeric_limits<double>::infinity();
      return e + std::abs(sxi - std::sqrt(dom.dist(eta)));
    };

    // volume of U(xi, eps/n)
    const Box bv = clip(rv);
    const auto hv = halton2(0, volume_samples, stream_seed(seed, j, 0x766fULL));
    std::size_t hits = 0;
    for (const auto& [u, v] : hv) {
      const Vec2 eta(bv.lo.x() + u * bv.width(), bv.lo.y() + v * bv.height());
      if ((eta - xi).norm() <= rv && rho_to(eta) <= rv) ++hits;
    }
    volumes_[j] = bv.area() * static_cast<double>(hits) / volume_samples;

    // oscillation samples in U(xi, ell eps/n): center, boundary foot, then
    // quasi-random points by rejection with a capped budget
    auto& pts = points_[j];
    pts.push_back(xi);
    if (dxi + sxi <= ro) pts.push_back(dom.project(xi).foot.position);
    const Box bo = clip(ro);
    const std::size_t budget = 64 * osc_samples;
    const std::size_t block = 4 * osc_samples;
    std::size_t used = 0, got = 0;
    const std::uint64_t s = stream_seed(seed, j, 0x6f7363ULL);
    while (got < osc_samples && used < budget) {
      const auto h = halton2(used, block, s);
      used += block;
      for (const auto& [u, v] : h) {
        const Vec2 eta(bo.lo.x() + u * bo.width(), bo.lo.y() + v * bo.height());
        if ((eta - xi).norm() > ro || rho_to(eta) > ro) continue;
        pts.push_back(eta);
        if (++got == osc_samples) break;
      }
    }
  });
}

double OscillationSampler::functional(const Field& f, double p) const {
  check_p(p);
  const std::size_t N = points_.size();
  std::vector<double> osc(N);
  for (std::size_t j = 0; j < N; ++j) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vec2& x : points_[j]) {
      const double v = f(x);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    osc[j] = hi - lo;
  }
  return weighted_pnorm(osc, volumes_, p);
}

double OscillationSampler::functional(const Polynomial& f, double p) const {
  if (f.dim() != 2) throw DomainError("oscillation functional needs a bivariate polynomial");
  return functional(Field([&f](const Vec2& x) { return f(x.x(), x.y()); }), p);
}

OscillationResult oscillation_sum(const Domain& dom, const Net& net, const Polynomial& f,
                                  double ell, double eps, int n, double p, std::uint64_t seed,
                                  std::size_t osc_samples) {
  const OscillationSampler S(dom, net, ell, eps, n, osc_samples, 1024, seed);
  OscillationResult r;
  r.functional = S.functional(f, p);
  const double nf = reference_norm(dom, f, p);
  r.ratio = nf > 0 ? r.functional / (eps * nf) : 0.0;
  r.centers = net.size();
  r.samples_per_ball = osc_samples;
  return r;
}

NodeInequality univariate_node_inequality(const Polynomial& f, const std::vector<double>& theta,
                                          int n, double p, double ell, int grid_per_node) {
  check_p(p);
  if (f.dim() != 1) throw DomainError("univariate_node_inequality needs a univariate polynomial");
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(ell > 0)) throw DomainError("ell must be positive");
  if (theta.empty()) throw DomainError("no nodes");
  if (grid_per_node < 2) throw DomainError("grid_per_node must be >= 2");
  std::vector<double> th = theta;
  std::sort(th.begin(), th.end());
  for (double t : th)
    if (t < 0.0 || t > kPi) throw DomainError("nodes must lie in [0, pi]");
  // small slack so uniform nodes i pi / n pass
  for (std::size_t i = 1; i < th.size(); ++i)
    if (th[i] - th[i - 1] < 1.0 / n - 1e-12) throw DomainError("node gaps must be >= 1/n");

  const int k = f.degree();
  auto absf = [&](double t) { return std::abs(f(std::cos(t))); };

  std::vector<double> vals(th.size()), w(th.size());
  for (std::size_t i = 0; i < th.size(); ++i) {
    const double a = std::max(0.0, th[i] - ell / n), b = std::min(kPi, th[i] + ell / n);
    double m = absf(th[i]);
    for (int q = 0; q <= grid_per_node; ++q) m = std::max(m, absf(a + (b - a) * q / grid_per_node));
    vals[i] = m;
    w[i] = std::sin(th[i]) / n + 1.0 / (static_cast<double>(n) * n);
  }

  NodeInequality out;
  double norm;
  if (std::isinf(p)) {
    out.lhs = *std::max_element(vals.begin(), vals.end());
    double m = 0.0;
    const int G = 64 * (k + 1);
    for (int q = 0; q <= G; ++q) m = std::max(m, std::abs(f(-1.0 + 2.0 * q / G)));
    // extremes of a polynomial: also check critical points
    const Polynomial d = f.partial(0);
    for (int q = 0; q < G; ++q) {
      double a = -1.0 + 2.0 * q / G, b = -1.0 + 2.0 * (q + 1) / G;
      double fa = d(a), fb = d(b);
      if (fa * fb > 0) continue;
      for (int it = 0; it < 80; ++it) {
        const double c = 0.5 * (a + b), fc = d(c);
        if ((fa <= 0) == (fc <= 0)) { a = c; fa = fc; } else { b = c; }
      }
      m = std::max(m, std::abs(f(0.5 * (a + b))));
    }
    norm = m;
  } else {
    out.lhs = weighted_pnorm(vals, w, p);
    // composite Gauss-Legendre; |f|^p is piecewise smooth
    const bool smooth = p == std::floor(p) && static_cast<long>(p) % 2 == 0;
    const int panels = smooth ? 1 : 64;
    const int order = smooth ? static_cast<int>(p) * std::max(k, 0) / 2 + 2 : 24;
    const GaussRule1D& g = gauss_legendre(order);
    Sum s;
    for (int q = 0; q < panels; ++q) {
      const double a = -1.0 + 2.0 * q / panels, b = -1.0 + 2.0 * (q + 1) / panels;
      const double c = 0.5 * (a + b), h = 0.5 * (b - a);
      for (std::size_t i = 0; i < g.x.size(); ++i)
        s.add(h * g.w[i] * std::pow(std::abs(f(c + h * g.x[i])), p));
    }
    norm = std::pow(s.value(), 1.0 / p);
  }
  out.rhs_core = (1.0 + static_cast<double>(k) / n) * norm;
  out.ratio = out.rhs_core > 0 ? out.lhs / out.rhs_core : 0.0;
  return out;
}

Polynomial chebyshev_t(int k) {
  if (k < 0) throw DomainError("Chebyshev degree must be >= 0");
  Polynomial t0 = Polynomial::constant(1, 1.0).raised_to(k);
  if (k == 0) return t0;
  Polynomial t1 = Polynomial::coordinate(1, 0).raised_to(k);
  const Polynomial x2 = 2.0 * Polynomial::coordinate(1, 0);
  for (int j = 2; j <= k; ++j) {
    Polynomial t2 = (x2 * t1).trimmed().raised_to(k) - t0;
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  return t1;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw DomainError("slope needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  const double den = m * sxx - sx * sx;
  if (!(den > 0)) throw DomainError("slope needs distinct abscissae");
  return (m * sxy - sx * sy) / den;
}

}  // namespace c2poly
