#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "c2poly/common.hpp"
#include "c2poly/polynomial.hpp"

namespace c2poly {

struct Box {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{0.0, 0.0};
  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
  double area() const { return width() * height(); }
};

struct BoundaryPoint {
  Vec2 position;
  Vec2 normal;   // outward, unit
  Vec2 tangent;  // normal rotated by +90 degrees (counter-clockwise traversal)
  double param = 0.0;  // arc length from the boundary origin
};

struct Projection {
  double distance = 0.0;
  BoundaryPoint foot;
};

// Level function Phi with Omega = {Phi <= 0}; gradient must not vanish on
// the zero set.
struct ImplicitField {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;
  std::function<Mat2(const Vec2&)> hessian;

  static ImplicitField from_polynomial(const Polynomial& phi);
};

class Domain {
 public:
  enum class Kind { Disk, Ellipse, Implicit };

  static Domain disk(const Vec2& center, double radius);
  // Axis-aligned ellipse x^2/a^2 + y^2/b^2 <= 1 about center, a >= b > 0.
  static Domain ellipse(double a, double b, const Vec2& center = Vec2::Zero());
  // The boundary component traced from the first crossing of the ray
  // interior_point + s e1 is the one used for arc-length queries.
  static Domain implicit(ImplicitField field, const Box& bbox, double kappa0,
                         const Vec2& interior_point,
                         std::optional<Polynomial> level_poly = std::nullopt);

  Kind kind() const;
  std::string kind_name() const;

  // Shape parameters (meaningful for the matching kind only).
  Vec2 center() const;
  double radius() const;
  double semi_a() const;
  double semi_b() const;
  Vec2 interior_point() const;
  const std::optional<Polynomial>& level_polynomial() const;

  double level(const Vec2& x) const;
  Vec2 level_gradient(const Vec2& x) const;
  Mat2 level_hessian(const Vec2& x) const;

  // Membership with a small absolute tolerance on the level value.
  bool contains(const Vec2& x, double tol = 1e-12) const;

  // Nearest boundary point. Throws DomainError outside the domain and
  // NumericalError if the projection cannot be certified.
  Projection project(const Vec2& x) const;
  // Distance only; cheaper than project for the built-in shapes.
  double dist(const Vec2& x) const;

  double perimeter() const;
  BoundaryPoint boundary_at(double s) const;
  // Outward unit normal at a boundary point (not checked to lie on the curve).
  Vec2 normal_at(const Vec2& x) const;
  // Arc-length parameter of a boundary point.
  double param_of(const Vec2& boundary_point) const;

  Box bbox() const;
  double area() const;
  double kappa0() const;
  double diameter() const;

  // Traced boundary polyline (implicit domains; empty otherwise).
  const std::vector<Vec2>& polyline() const;

  struct Impl;

 private:
  explicit Domain(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

Projection dist_to_boundary(const Domain& dom, const Vec2& xi);

// Boundary-adapted metric.
double rho_omega(const Domain& dom, const Vec2& xi, const Vec2& eta);
// Same, with the two boundary distances already known.
inline double rho_from_dists(const Vec2& xi, double dxi, const Vec2& eta, double deta) {
  return (xi - eta).norm() + std::abs(std::sqrt(dxi) - std::sqrt(deta));
}

double phi_n_gamma(const Domain& dom, const Vec2& xi, int n);

struct VolumeEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  double comparator = 0.0;  // t^2 (sqrt(dist) + t)
  std::size_t samples = 0;
};

VolumeEstimate ball_volume_mc(const Domain& dom, const Vec2& xi, double t,
                              std::size_t samples, std::uint64_t seed);

struct RollingBallReport {
  bool pass = true;
  std::size_t boundary_points = 0;
  std::size_t ball_points = 0;
  std::optional<Vec2> witness;
  std::optional<Vec2> witness_foot;
  std::string detail;
};

RollingBallReport rolling_ball_check(const Domain& dom, double kappa,
                                     std::size_t boundary_samples,
                                     std::size_t ball_samples, std::uint64_t seed);

}  // namespace c2poly
