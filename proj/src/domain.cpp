#include "c2poly/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "c2poly/parallel.hpp"
#include "c2poly/quadrature.hpp"
#include "c2poly/random.hpp"

namespace c2poly {

struct Domain::Impl {
  Kind kind = Kind::Disk;
  Vec2 c = Vec2::Zero();
  double R = 1.0;     // disk radius
  double a = 1.0;     // ellipse semi-axes
  double b = 1.0;
  ImplicitField field;
  std::optional<Polynomial> poly;
  Box box;
  double k0 = 0.0;
  Vec2 interior = Vec2::Zero();
  double diam = 0.0;
  double perim = 0.0;

  // Ellipse: cumulative arc length at theta_k = k * 2 pi / K.
  std::vector<double> arc_table;
  // Implicit: traced polyline and cumulative chord length.
  std::vector<Vec2> pts;
  std::vector<double> cum;

  mutable std::once_flag area_once;
  mutable double area_value = 0.0;

  double scale() const { return std::max(box.width(), box.height()); }
};

namespace {

constexpr int kArcTable = 512;

double ellipse_speed(double a, double b, double th) {
  const double s = std::sin(th), c = std::cos(th);
  return std::sqrt(a * a * s * s + b * b * c * c);
}

double ellipse_arc(double a, double b, double t0, double t1) {
  const auto& gl = gauss_legendre(10);
  const double h = 0.5 * (t1 - t0), m = 0.5 * (t1 + t0);
  double s = 0.0;
  for (std::size_t i = 0; i < gl.x.size(); ++i) s += gl.w[i] * ellipse_speed(a, b, m + h * gl.x[i]);
  return s * h;
}

double wrap_angle(double th) {
  th = std::fmod(th, 2.0 * kPi);
  if (th < 0) th += 2.0 * kPi;
  return th;
}

// Root of (r0 z0/(s+r0))^2 + (z1/(s+1))^2 - 1 by bisection to full precision.
double ellipse_root(double r0, double z0, double z1, double g) {
  const double n0 = r0 * z0;
  double s0 = z1 - 1.0;
  double s1 = g < 0 ? 0.0 : std::hypot(n0, z1) - 1.0;
  double s = 0.0;
  for (int i = 0; i < 2000; ++i) {
    s = 0.5 * (s0 + s1);
    if (s == s0 || s == s1) break;
    const double q0 = n0 / (s + r0), q1 = z1 / (s + 1.0);
    const double gg = q0 * q0 + q1 * q1 - 1.0;
    if (gg > 0)
      s0 = s;
    else if (gg < 0)
      s1 = s;
    else
      break;
  }
  return s;
}

// Nearest point of the ellipse (e0 >= e1) to (y0, y1) in the first quadrant.
void ellipse_nearest_q1(double e0, double e1, double y0, double y1, double& x0, double& x1) {
  if (y1 > 0) {
    if (y0 > 0) {
      const double z0 = y0 / e0, z1 = y1 / e1, g = z0 * z0 + z1 * z1 - 1.0;
      if (g != 0) {
        const double r0 = (e0 / e1) * (e0 / e1);
        const double sbar = ellipse_root(r0, z0, z1, g);
        x0 = r0 * y0 / (sbar + r0);
        x1 = y1 / (sbar + 1.0);
      } else {
        x0 = y0;
        x1 = y1;
      }
    } else {
      x0 = 0.0;
      x1 = e1;
    }
  } else {
    const double numer0 = e0 * y0, denom0 = e0 * e0 - e1 * e1;
    if (numer0 < denom0) {
      const double xde0 = numer0 / denom0;
      x0 = e0 * xde0;
      x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0));
    } else {
      x0 = e0;
      x1 = 0.0;
    }
  }
}

BoundaryPoint make_bp(const Vec2& p, const Vec2& n, double s) {
  BoundaryPoint bp;
  bp.position = p;
  bp.normal = n;
  bp.tangent = Vec2(-n.y(), n.x());
  bp.param = s;
  return bp;
}

// Newton steps along the gradient onto Phi = 0.
Vec2 project_along_gradient(const ImplicitField& f, Vec2 x, double scale) {
  for (int it = 0; it < 60; ++it) {
    const double v = f.value(x);
    const Vec2 g = f.gradient(x);
    const double gg = g.squaredNorm();
    if (gg == 0.0) throw NumericalError("implicit domain: vanishing gradient during projection");
    const Vec2 step = v / gg * g;
    x -= step;
    if (step.norm() <= 1e-15 * scale) break;
  }
  return x;
}

void trace_implicit(Domain::Impl& d) {
  const auto& f = d.field;
  const double scale = d.scale();
  if (f.value(d.interior) >= 0) throw DomainError("implicit domain: interior_point is not inside");
  // March in +x to the first sign change, then bisect.
  const double march = 1e-3 * scale;
  Vec2 lo = d.interior, hi = d.interior;
  bool found = false;
  while (hi.x() <= d.box.hi.x() + march) {
    hi.x() += march;
    if (f.value(hi) > 0) {
      found = true;
      break;
    }
    lo = hi;
  }
  if (!found) throw DomainError("implicit domain: no boundary crossing inside the bounding box");
  for (int i = 0; i < 200; ++i) {
    Vec2 mid = 0.5 * (lo + hi);
    (f.value(mid) > 0 ? hi : lo) = mid;
  }
  const Vec2 start = project_along_gradient(f, 0.5 * (lo + hi), scale);

  const double h = std::min(1.5e-3 * scale, 0.02 * d.k0);
  d.pts.clear();
  d.pts.push_back(start);
  double traveled = 0.0;
  Vec2 x = start;
  const std::size_t max_steps = 20'000'000;
  for (std::size_t k = 0; k < max_steps; ++k) {
    const Vec2 n = f.gradient(x).normalized();
    const Vec2 t(-n.y(), n.x());
    // Midpoint predictor for a better second-order step.
    Vec2 mid = project_along_gradient(f, x + 0.5 * h * t, scale);
    const Vec2 nm = f.gradient(mid).normalized();
    const Vec2 tm(-nm.y(), nm.x());
    Vec2 next = project_along_gradient(f, x + h * tm, scale);
    traveled += (next - x).norm();
    if (traveled > 4 * h && (next - start).norm() < 1.5 * h) {
      if ((next - start).norm() > 0.5 * h) d.pts.push_back(next);
      break;
    }
    d.pts.push_back(next);
    x = next;
    if (k + 1 == max_steps) throw NumericalError("implicit domain: boundary trace did not close");
  }
  d.cum.assign(d.pts.size() + 1, 0.0);
  for (std::size_t i = 0; i < d.pts.size(); ++i) {
    const Vec2& p = d.pts[i];
    const Vec2& q = d.pts[(i + 1) % d.pts.size()];
    d.cum[i + 1] = d.cum[i] + (q - p).norm();
  }
  d.perim = d.cum.back();
}

}  // namespace

ImplicitField ImplicitField::from_polynomial(const Polynomial& phi) {
  if (phi.dim() != 2) throw DomainError("implicit level polynomial must be bivariate");
  auto px = std::make_shared<Polynomial>(phi.partial(0));
  auto py = std::make_shared<Polynomial>(phi.partial(1));
  auto pxx = std::make_shared<Polynomial>(px->partial(0));
  auto pxy = std::make_shared<Polynomial>(px->partial(1));
  auto pyy = std::make_shared<Polynomial>(py->partial(1));
  auto p0 = std::make_shared<Polynomial>(phi);
  ImplicitField f;
  f.value = [p0](const Vec2& x) { return (*p0)(x.x(), x.y()); };
  f.gradient = [px, py](const Vec2& x) { return Vec2((*px)(x.x(), x.y()), (*py)(x.x(), x.y())); };
  f.hessian = [pxx, pxy, pyy](const Vec2& x) {
    Mat2 H;
    const double xy = (*pxy)(x.x(), x.y());
    H << (*pxx)(x.x(), x.y()), xy, xy, (*pyy)(x.x(), x.y());
    return H;
  };
  return f;
}

Domain Domain::disk(const Vec2& center, double radius) {
  if (!(radius > 0)) throw DomainError("disk radius must be positive");
  auto d = std::make_shared<Impl>();
  d->kind = Kind::Disk;
  d->c = center;
  d->R = radius;
  d->box = {center - Vec2(radius, radius), center + Vec2(radius, radius)};
  d->k0 = radius;
  d->diam = 2 * radius;
  d->perim = 2 * kPi * radius;
  d->interior = center;
  const Vec2 c = center;
  const double r = radius;
  d->field.value = [c, r](const Vec2& x) { return ((x - c).squaredNorm() - r * r) / (2 * r); };
  d->field.gradient = [c, r](const Vec2& x) { return Vec2((x - c) / r); };
  d->field.hessian = [r](const Vec2&) { return Mat2(Mat2::Identity() / r); };
  return Domain(d);
}

Domain Domain::ellipse(double a, double b, const Vec2& center) {
  if (!(b > 0) || !(a >= b)) throw DomainError("ellipse needs semi-axes a >= b > 0");
  auto d = std::make_shared<Impl>();
  d->kind = Kind::Ellipse;
  d->c = center;
  d->a = a;
  d->b = b;
  d->box = {center - Vec2(a, b), center + Vec2(a, b)};
  d->k0 = b * b / a;
  d->diam = 2 * a;
  d->interior = center;
  d->arc_table.assign(kArcTable + 1, 0.0);
  const double dt = 2 * kPi / kArcTable;
  for (int k = 0; k < kArcTable; ++k)
    d->arc_table[k + 1] = d->arc_table[k] + ellipse_arc(a, b, k * dt, (k + 1) * dt);
  d->perim = d->arc_table.back();
  const Vec2 c = center;
  d->field.value = [c, a, b](const Vec2& x) {
    const Vec2 u = x - c;
    return 0.5 * b * (u.x() * u.x() / (a * a) + u.y() * u.y() / (b * b) - 1.0);
  };
  d->field.gradient = [c, a, b](const Vec2& x) {
    const Vec2 u = x - c;
    return Vec2(b * u.x() / (a * a), u.y() / b);
  };
  d->field.hessian = [a, b](const Vec2&) {
    Mat2 H;
    H << b / (a * a), 0, 0, 1 / b;
    return H;
  };
  return Domain(d);
}

Domain Domain::implicit(ImplicitField field, const Box& bbox, double kappa0,
                        const Vec2& interior_point, std::optional<Polynomial> level_poly) {
  if (!field.value || !field.gradient || !field.hessian)
    throw DomainError("implicit domain needs value, gradient and hessian oracles");
  if (!(bbox.width() > 0 && bbox.height() > 0)) throw DomainError("implicit domain: empty bounding box");
  if (!(kappa0 > 0)) throw DomainError("implicit domain: kappa0 must be positive");
  auto d = std::make_shared<Impl>();
  d->kind = Kind::Implicit;
  d->field = std::move(field);
  d->poly = std::move(level_poly);
  d->box = bbox;
  d->k0 = kappa0;
  d->interior = interior_point;
  d->c = interior_point;
  trace_implicit(*d);
  // Diameter from a boundary subsample.
  const std::size_t m = std::min<std::size_t>(d->pts.size(), 720);
  double diam = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      diam = std::max(diam, (d->pts[i * d->pts.size() / m] - d->pts[j * d->pts.size() / m]).norm());
  d->diam = diam;
  return Domain(d);
}

Domain::Kind Domain::kind() const { return impl_->kind; }

std::string Domain::kind_name() const {
  switch (impl_->kind) {
    case Kind::Disk:
      return "disk";
    case Kind::Ellipse:
      return "ellipse";
    default:
      return "implicit";
  }
}

Vec2 Domain::center() const { return impl_->c; }
double Domain::radius() const { return impl_->R; }
double Domain::semi_a() const { return impl_->a; }
double Domain::semi_b() const { return impl_->b; }
Vec2 Domain::interior_point() const { return impl_->interior; }
const std::optional<Polynomial>& Domain::level_polynomial() const { return impl_->poly; }

double Domain::level(const Vec2& x) const { return impl_->field.value(x); }
Vec2 Domain::level_gradient(const Vec2& x) const { return impl_->field.gradient(x); }
Mat2 Domain::level_hessian(const Vec2& x) const { return impl_->field.hessian(x); }

bool Domain::contains(const Vec2& x, double tol) const {
  const auto& d = *impl_;
  switch (d.kind) {
    case Kind::Disk:
      return (x - d.c).norm() <= d.R + tol;
    case Kind::Ellipse:
      return d.field.value(x) <= tol;
    default:
      if (x.x() < d.box.lo.x() - tol || x.x() > d.box.hi.x() + tol || x.y() < d.box.lo.y() - tol ||
          x.y() > d.box.hi.y() + tol)
        return false;
      return d.field.value(x) <= tol;
  }
}

Vec2 Domain::normal_at(const Vec2& x) const {
  const auto& d = *impl_;
  if (d.kind == Kind::Disk) {
    const Vec2 u = x - d.c;
    const double r = u.norm();
    return r == 0.0 ? Vec2(1.0, 0.0) : Vec2(u / r);
  }
  return d.field.gradient(x).normalized();
}

double Domain::param_of(const Vec2& p) const {
  const auto& d = *impl_;
  switch (d.kind) {
    case Kind::Disk: {
      const Vec2 u = p - d.c;
      if (u.norm() == 0.0) return 0.0;
      return wrap_angle(std::atan2(u.y(), u.x())) * d.R;
    }
    case Kind::Ellipse: {
      const Vec2 u = p - d.c;
      const double th = wrap_angle(std::atan2(u.y() / d.b, u.x() / d.a));
      const double dt = 2 * kPi / kArcTable;
      const int k = std::min(kArcTable - 1, static_cast<int>(th / dt));
      return d.arc_table[k] + ellipse_arc(d.a, d.b, k * dt, th);
    }
    default: {
      std::size_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < d.pts.size(); ++i) {
        const double dd = (d.pts[i] - p).squaredNorm();
        if (dd < bd) {
          bd = dd;
          best = i;
        }
      }
      const std::size_t m = d.pts.size();
      const Vec2& q0 = d.pts[best];
      const Vec2& q1 = d.pts[(best + 1) % m];
      const Vec2& qm = d.pts[(best + m - 1) % m];
      double s = d.cum[best];
      const double fwd = (p - q0).dot(q1 - q0) / std::max((q1 - q0).squaredNorm(), 1e-300);
      if (fwd >= 0) {
        s += std::min(fwd, 1.0) * (q1 - q0).norm();
      } else {
        const double bwd = (p - q0).dot(qm - q0) / std::max((qm - q0).squaredNorm(), 1e-300);
        s -= std::clamp(bwd, 0.0, 1.0) * (qm - q0).norm();
      }
      s = std::fmod(s, d.perim);
      if (s < 0) s += d.perim;
      return s;
    }
  }
}

BoundaryPoint Domain::boundary_at(double s) const {
  const auto& d = *impl_;
  s = std::fmod(s, d.perim);
  if (s < 0) s += d.perim;
  switch (d.kind) {
    case Kind::Disk: {
      const double th = s / d.R;
      const Vec2 n(std::cos(th), std::sin(th));
      return make_bp(d.c + d.R * n, n, s);
    }
    case Kind::Ellipse: {
      auto it = std::upper_bound(d.arc_table.begin(), d.arc_table.end(), s);
      int k = static_cast<int>(it - d.arc_table.begin()) - 1;
      k = std::clamp(k, 0, kArcTable - 1);
      const double dt = 2 * kPi / kArcTable;
      const double t0 = k * dt;
      double th = t0 + (s - d.arc_table[k]) / ellipse_speed(d.a, d.b, t0);
      for (int it2 = 0; it2 < 8; ++it2) {
        const double F = d.arc_table[k] + ellipse_arc(d.a, d.b, t0, th) - s;
        th -= F / ellipse_speed(d.a, d.b, th);
        if (std::abs(F) < 1e-15 * d.perim) break;
      }
      const Vec2 p = d.c + Vec2(d.a * std::cos(th), d.b * std::sin(th));
      return make_bp(p, d.field.gradient(p).normalized(), s);
    }
    default: {
      auto it = std::upper_bound(d.cum.begin(), d.cum.end(), s);
      std::size_t k = static_cast<std::size_t>(it - d.cum.begin());
      k = k == 0 ? 0 : k - 1;
      k = std::min(k, d.pts.size() - 1);
      const Vec2& p0 = d.pts[k];
      const Vec2& p1 = d.pts[(k + 1) % d.pts.size()];
      const double seg = d.cum[k + 1] - d.cum[k];
      const double w = seg > 0 ? (s - d.cum[k]) / seg : 0.0;
      const Vec2 p = project_along_gradient(d.field, (1 - w) * p0 + w * p1, d.scale());
      return make_bp(p, d.field.gradient(p).normalized(), s);
    }
  }
}

namespace {

// Lagrange-Newton for the nearest point of {Phi = 0} to xi from start.
std::optional<Vec2> lagrange_newton(const ImplicitField& f, const Vec2& xi, Vec2 p, double scale) {
  Vec2 g = f.gradient(p);
  double lam = (p - xi).dot(g) / std::max(g.squaredNorm(), 1e-300);
  for (int it = 0; it < 25; ++it) {
    g = f.gradient(p);
    const Mat2 H = f.hessian(p);
    const double phi = f.value(p);
    Eigen::Vector3d F;
    F << p - xi - lam * g, phi;
    Eigen::Matrix3d J;
    J.topLeftCorner<2, 2>() = Mat2::Identity() - lam * H;
    J.topRightCorner<2, 1>() = -g;
    J.bottomLeftCorner<1, 2>() = g.transpose();
    J(2, 2) = 0.0;
    const Eigen::Vector3d step = J.fullPivLu().solve(-F);
    if (!step.allFinite()) return std::nullopt;
    p += step.head<2>();
    lam += step(2);
    if (step.head<2>().norm() <= 1e-15 * scale) break;
  }
  // Final polish keeps |Phi| at round-off level.
  const double phi = f.value(p);
  g = f.gradient(p);
  p -= phi / g.squaredNorm() * g;
  if (std::abs(f.value(p)) > 1e-12 * std::max(1.0, g.norm() * scale)) return std::nullopt;
  const Vec2 n = f.gradient(p).normalized();
  const Vec2 r = xi - p;
  if (std::abs(r.x() * n.y() - r.y() * n.x()) > 1e-8 * (1.0 + r.norm())) return std::nullopt;
  return p;
}

}  // namespace

Projection Domain::project(const Vec2& x) const {
  const auto& d = *impl_;
  const double tol = 1e-12 * std::max(1.0, d.scale());
  if (!contains(x, tol)) throw DomainError("dist_to_boundary: point lies outside the domain");
  switch (d.kind) {
    case Kind::Disk: {
      const Vec2 u = x - d.c;
      const double r = u.norm();
      const Vec2 n = r == 0.0 ? Vec2(1.0, 0.0) : Vec2(u / r);
      Projection pr;
      pr.distance = std::max(0.0, d.R - r);
      pr.foot = make_bp(d.c + d.R * n, n, wrap_angle(std::atan2(n.y(), n.x())) * d.R);
      return pr;
    }
    case Kind::Ellipse: {
      const Vec2 u = x - d.c;
      double x0 = 0, x1 = 0;
      ellipse_nearest_q1(d.a, d.b, std::abs(u.x()), std::abs(u.y()), x0, x1);
      // Sign choice: exact zeros resolve to the upper/right branch, which has
      // the smaller boundary parameter.
      const Vec2 foot_local(u.x() < 0 ? -x0 : x0, u.y() < 0 ? -x1 : x1);
      const Vec2 foot = d.c + foot_local;
      Projection pr;
      pr.distance = (foot - x).norm();
      if (d.field.value(x) > 0) pr.distance = 0.0;
      pr.foot = make_bp(foot, d.field.gradient(foot).normalized(), param_of(foot));
      return pr;
    }
    default: {
      const double scale = d.scale();
      std::vector<Vec2> starts;
      std::size_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < d.pts.size(); ++i) {
        const double dd = (d.pts[i] - x).squaredNorm();
        if (dd < bd) {
          bd = dd;
          best = i;
        }
      }
      starts.push_back(d.pts[best]);
      for (int k = 0; k < 8; ++k) starts.push_back(boundary_at(d.perim * k / 8.0).position);
      starts.push_back(project_along_gradient(d.field, x, scale));
      bool have = false;
      Vec2 foot;
      double dist = std::numeric_limits<double>::infinity(), fparam = 0.0;
      for (const auto& s0 : starts) {
        auto p = lagrange_newton(d.field, x, s0, scale);
        if (!p) continue;
        const double dd = (*p - x).norm();
        const double ps = param_of(*p);
        if (!have || dd < dist - 1e-12 * scale ||
            (std::abs(dd - dist) <= 1e-12 * scale && ps < fparam)) {
          have = true;
          foot = *p;
          dist = dd;
          fparam = ps;
        }
      }
      if (!have) throw NumericalError("dist_to_boundary: Newton projection failed from every start");
      Projection pr;
      pr.distance = d.field.value(x) > 0 ? 0.0 : dist;
      pr.foot = make_bp(foot, d.field.gradient(foot).normalized(), fparam);
      return pr;
    }
  }
}

double Domain::dist(const Vec2& x) const {
  const auto& d = *impl_;
  if (d.kind == Kind::Disk) {
    const double r = (x - d.c).norm();
    if (r > d.R * (1 + 1e-12) + 1e-12) throw DomainError("dist_to_boundary: point lies outside the domain");
    return std::max(0.0, d.R - r);
  }
  return project(x).distance;
}

double Domain::perimeter() const { return impl_->perim; }
Box Domain::bbox() const { return impl_->box; }
double Domain::kappa0() const { return impl_->k0; }
double Domain::diameter() const { return impl_->diam; }
const std::vector<Vec2>& Domain::polyline() const { return impl_->pts; }

double Domain::area() const {
  const auto& d = *impl_;
  switch (d.kind) {
    case Kind::Disk:
      return kPi * d.R * d.R;
    case Kind::Ellipse:
      return kPi * d.a * d.b;
    default:
      std::call_once(d.area_once, [&] { d.area_value = moments(*this, 0)[0]; });
      return d.area_value;
  }
}

Projection dist_to_boundary(const Domain& dom, const Vec2& xi) { return dom.project(xi); }

double rho_omega(const Domain& dom, const Vec2& xi, const Vec2& eta) {
  return rho_from_dists(xi, dom.dist(xi), eta, dom.dist(eta));
}

double phi_n_gamma(const Domain& dom, const Vec2& xi, int n) {
  if (n < 1) throw DomainError("phi_n_gamma needs n >= 1");
  return std::sqrt(dom.dist(xi)) + 1.0 / n;
}

VolumeEstimate ball_volume_mc(const Domain& dom, const Vec2& xi, double t, std::size_t samples,
                              std::uint64_t seed) {
  if (!(t > 0)) throw DomainError("ball_volume_mc needs t > 0");
  const double dxi = dom.dist(xi);
  const Box bb = dom.bbox();
  const Vec2 lo = xi - Vec2(t, t), hi = xi + Vec2(t, t);
  const Box box{lo.cwiseMax(bb.lo), hi.cwiseMin(bb.hi)};
  const std::size_t chunk = 4096;
  const std::size_t chunks = (samples + chunk - 1) / chunk;
  std::vector<std::size_t> hits(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng(stream_seed(seed, c, 0x766f6cULL));
    const std::size_t m = std::min(chunk, samples - c * chunk);
    std::size_t h = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double u = uniform01(rng), v = uniform01(rng);
      const Vec2 eta(box.lo.x() + u * box.width(), box.lo.y() + v * box.height());
      const double e = (eta - xi).norm();
      if (e > t || !dom.contains(eta, 0.0)) continue;
      if (e + std::abs(std::sqrt(dxi) - std::sqrt(dom.dist(eta))) <= t) ++h;
    }
    hits[c] = h;
  });
  std::size_t total = 0;
  for (auto h : hits) total += h;
  VolumeEstimate out;
  out.samples = samples;
  const double frac = samples ? static_cast<double>(total) / samples : 0.0;
  out.estimate = box.area() * frac;
  out.stderr_ = box.area() * std::sqrt(frac * (1 - frac) / std::max<std::size_t>(samples, 1));
  out.comparator = t * t * (std::sqrt(dxi) + t);
  return out;
}

RollingBallReport rolling_ball_check(const Domain& dom, double kappa, std::size_t boundary_samples,
                                     std::size_t ball_samples, std::uint64_t seed) {
  if (!(kappa > 0)) throw DomainError("rolling_ball_check needs kappa > 0");
  RollingBallReport rep;
  Rng rng(seed);
  const double P = dom.perimeter();
  const double offset = uniform01(rng);
  const double tol = 1e-10 * std::max(1.0, dom.diameter());
  const Box bb = dom.bbox();
  auto in_box = [&](const Vec2& p) {
    return p.x() >= bb.lo.x() && p.x() <= bb.hi.x() && p.y() >= bb.lo.y() && p.y() <= bb.hi.y();
  };
  for (std::size_t k = 0; k < boundary_samples && rep.pass; ++k) {
    const BoundaryPoint eta = dom.boundary_at(P * (k + offset) / boundary_samples);
    ++rep.boundary_points;
    const Vec2 cin = eta.position - kappa * eta.normal;
    const Vec2 cout = eta.position + kappa * eta.normal;
    for (std::size_t i = 0; i < ball_samples; ++i) {
      const double r = kappa * std::sqrt(uniform01(rng)), th = 2 * kPi * uniform01(rng);
      const Vec2 off(r * std::cos(th), r * std::sin(th));
      const Vec2 pin = cin + off, pout = cout + off;
      rep.ball_points += 2;
      const bool in_ok = in_box(pin) && dom.level(pin) <= tol;
      if (!in_ok) {
        rep.pass = false;
        rep.witness = pin;
        rep.witness_foot = eta.position;
        rep.detail = "inner ball point outside the domain";
        break;
      }
      const bool out_ok = !in_box(pout) || dom.level(pout) >= -tol;
      if (!out_ok) {
        rep.pass = false;
        rep.witness = pout;
        rep.witness_foot = eta.position;
        rep.detail = "outer ball point inside the domain";
        break;
      }
    }
  }
  return rep;
}

}  // namespace c2poly
