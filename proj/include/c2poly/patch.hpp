#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "c2poly/common.hpp"
#include "c2poly/domain.hpp"

namespace c2poly {

// (g, g', g'') at x.
using GraphEval = std::function<std::array<double, 3>(double)>;

// Upward x2-graph domain in local coordinates,
//   G = {(x, y): |x| < b, g(x) - L b < y <= g(x)},
// placed in the plane by global = origin + x ex + y ey, where (ex, ey) is a
// signed permutation of the standard basis (the reflections that turn an
// upward x2-domain into an upward/downward x1- or x2-domain).
class GraphPatch {
 public:
  // axis: global coordinate playing the graph role (0 or 1);
  // orientation: +1 upward, -1 downward.
  GraphPatch(GraphEval g, double base, double L, int axis, int orientation, const Vec2& origin);

  // Identity placement, for synthetic patches.
  static GraphPatch standalone(GraphEval g, double base, double L);
  // g(x) = c0 + c1 x + c2 x^2 / 2 (handy for tests).
  static GraphPatch quadratic(double c0, double c1, double c2, double base, double L);

  double g(double x) const { return g_(x)[0]; }
  double dg(double x) const { return g_(x)[1]; }
  double d2g(double x) const { return g_(x)[2]; }
  std::array<double, 3> jet(double x) const { return g_(x); }
  const GraphEval& graph() const { return g_; }

  double base() const { return b_; }
  double L() const { return L_; }
  double depth() const { return L_ * b_; }
  int axis() const { return axis_; }
  int orientation() const { return orientation_; }
  const Vec2& origin() const { return origin_; }
  Vec2 ex() const;
  Vec2 ey() const;

  // Grid maxima over [-2b, 2b] (4097 points).
  double grad_max() const { return grad_max_; }
  double hess_max() const { return hess_max_; }
  double min_g() const { return min_g_; }
  // Hessian bound: grid max of |g''| times 1.25 (overridable).
  double M() const { return M_; }
  void set_M(double M) { M_ = M; }

  Vec2 to_global(double x, double y) const;
  Vec2 to_global(const Vec2& local) const { return to_global(local.x(), local.y()); }
  Vec2 to_local(const Vec2& global) const;

  // g(x) - y.
  double delta(double x, double y) const { return g(x) - y; }

  bool in_G(double x, double y, double lambda = 1.0, double tol = 1e-12) const;
  bool in_Gstar(double x, double y, double tol = 1e-12) const;
  bool on_essential_boundary(double x, double y, double lambda = 1.0, double tol = 1e-12) const;

  // 1 / (3 sqrt(1 + ||g'||_inf^2)).
  double c_star() const { return 1.0 / (3.0 * std::sqrt(1.0 + grad_max_ * grad_max_)); }

  // min g = 4 L b within tol.
  bool normalized(double tol = 1e-9) const;
  // L >= 4 sqrt(2) max|g'| + 1.
  bool satisfies_parameter_bound() const;

  // Distance from a local point to the graph over [-2b, 2b] by dense
  // sampling and Newton polish.
  double dist_to_graph(double x, double y, int samples = 2001) const;

 private:
  GraphEval g_;
  double b_, L_;
  int axis_, orientation_;
  Vec2 origin_;
  double grad_max_ = 0, hess_max_ = 0, min_g_ = 0, M_ = 0;
};

// max{|xi_x - eta_x|, |sqrt(g(xi_x) - xi_y) - sqrt(g(eta_x) - eta_y)|} in local
// coordinates of the patch. Arguments must lie in the closure of G*.
double rho_hat(const GraphPatch& patch, const Vec2& xi_local, const Vec2& eta_local);

struct DecompositionOptions {
  double lambda0 = 0.5;       // essential boundaries G(lambda0) cover the boundary
  double depth_fraction = 0.2;  // patch depth L b as a fraction of kappa0
  int validation_grid = 41;   // per-direction samples for the G* containment check
};

// Covers the boundary by graph patches. requested_base is an upper bound:
// the base is shrunk until the parameter bound and attachment hold.
std::vector<GraphPatch> decompose_boundary(const Domain& dom, double requested_base,
                                           const DecompositionOptions& opt = {});

// Patch whose essential boundary is centred at eta, base b, depth L b = depth.
GraphPatch make_patch(const Domain& dom, const BoundaryPoint& eta, double base, double depth);

// Every boundary sample lies in the relative interior of some G_j(lambda0)
// essential boundary.
struct CoverReport {
  bool pass = true;
  std::size_t samples = 0;
  std::size_t uncovered = 0;
  double worst_margin = 0.0;  // min over samples of max_j (lambda0 b_j - |x_j|)
};
CoverReport boundary_cover_check(const Domain& dom, const std::vector<GraphPatch>& patches,
                                 double lambda0, std::size_t samples);

struct AttachmentReport {
  bool pass = true;
  double max_graph_level = 0.0;  // max |Phi| on the graph over [-2b, 2b]
  std::size_t outside_points = 0;  // samples of G* not strictly inside
  std::string detail;
};
AttachmentReport attachment_check(const Domain& dom, const GraphPatch& patch, int grid = 41);

struct RatioReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::size_t pairs = 0;
};
RatioReport metric_equivalence_report(const Domain& dom, const GraphPatch& patch,
                                      std::size_t pairs, std::uint64_t seed);

struct DistBoundsReport {
  bool pass = true;
  std::size_t samples = 0;
  double min_lower_slack = 0.0;  // min of dist - c* delta, relative
  double min_upper_slack = 0.0;  // min of delta - dist, relative
  double c_star = 0.0;
};
DistBoundsReport patch_dist_bounds_check(const GraphPatch& patch, std::size_t samples,
                                         std::uint64_t seed);

// Uniform-in-(x, sqrt depth) random local point of G(lambda).
Vec2 sample_patch_point(const GraphPatch& patch, double u, double v, double lambda = 1.0);

}  // namespace c2poly
