#pragma once

#include <optional>
#include <vector>

#include "c2poly/common.hpp"
#include "c2poly/patch.hpp"
#include "c2poly/polynomial.hpp"

namespace c2poly {

// Parabolas y = Q_A(z, x - z) = g(z) + g'(z)(x - z) - A (x - z)^2 / 2 touching
// the graph of a patch from below. The patch base plays the role of a.
class ParabolaFamily {
 public:
  // M defaults to max(patch.M(), |g'(0)|, 1) and must dominate both |g''|
  // on [-2a, 2a] and |g'(0)|. lambda defaults to 1 + 1/M.
  ParabolaFamily(const GraphPatch& patch, double A, std::optional<double> M = std::nullopt,
                 std::optional<double> lambda = std::nullopt);

  // (2 + 16 L / a) M^2 + M.
  static double a_bar(const GraphPatch& patch, double M);
  static double default_M(const GraphPatch& patch);

  const GraphPatch& patch() const { return patch_; }
  double A() const { return A_; }
  double M() const { return M_; }
  double lambda() const { return lambda_; }
  double a() const { return patch_.base(); }
  double a0() const { return a0_; }
  double a1() const { return a1_; }
  double abar() const { return abar_; }

  double Q(double z, double t) const;
  bool in_E(double z, double t, double tol = 1e-12) const;

  // (z + t, Q_A(z, t)); throws outside E_A, and NumericalError if the image
  // leaves G(lambda).
  Vec2 phi_map(double z, double t) const;
  // (z, t) with 0 <= t <= a1 for a point of G.
  std::pair<double, double> phi_inverse(double x, double y) const;
  // (A + g''(z)) |t|.
  double jacobian_det(double z, double t) const;
  // g'(z + t) - g'(z) + A t.
  double w_A(double z, double t) const;
  double u_A(double x, double y) const;

 private:
  GraphPatch patch_;
  double A_, M_, lambda_, a0_, a1_, abar_;
};

struct UBounds {
  double u = 0.0, t = 0.0, delta = 0.0;
  double lower = 0.0, upper = 0.0;  // the sqrt(delta) bounds on u
  bool sqrt_bounds = true;   // lower <= u <= upper
  bool linear_bounds = true; // (A - M) t <= u <= (A + M) t
  bool depth_bounds = true;  // (A - M) t^2/2 <= delta <= (A + M) t^2/2
};
UBounds u_bounds(const ParabolaFamily& fam, double x, double y, double rel_tol = 1e-12);

// (d/dx_1 + g'(x0) d/dx_2)^l d_2^j f at (x0, y0) through the partial table.
double tangential_partial(const PartialTable& T, double gp, int l, int j, double x, double y);

// sum_j C(r, j) (-u_A)^j (D^(r-j) d_2^j f)(x0, y0).
double s1_term(const ParabolaFamily& fam, const Polynomial& f, int r, double x0, double y0);

struct Decomposition {
  int r = 0;
  double x0 = 0, y0 = 0, z0 = 0, t0 = 0;
  double s1 = 0.0;
  double full = 0.0;          // d^r/dt^r f(Phi_A(z0, t)) at t0
  double residual = 0.0;      // full - s1
  double curvature_block = 0.0;  // closed-form terms carrying (-A)^k, k >= 1
  double mismatch = 0.0;      // |s1 + curvature_block - full|
};
Decomposition decomposition_check(const ParabolaFamily& fam, const Polynomial& f, int r,
                                  double x0, double y0);

// A_0 = a_bar, then each A_{i+1} is the smallest value with
// 2 (A_i + M) / sqrt(A_i - M) < (A_{i+1} - M) / sqrt(A_{i+1} + M).
std::vector<double> separated_a_grid(double abar, double M, int r);

struct VandermondeRecovery {
  std::vector<double> recovered;  // C(r, j) delta^{j/2} D^(r-j) d_2^j f
  std::vector<double> direct;
  std::vector<double> nodes;      // B_i = -u_{A_i} / sqrt(delta)
  double condition = 0.0;         // after column equilibration
  double rel_error = 0.0;         // max |rec - direct| / max |direct|
};
// Families must share the patch and be ordered by A.
VandermondeRecovery vandermonde_recover(const std::vector<ParabolaFamily>& fams,
                                        const Polynomial& f, int r, double x0, double y0,
                                        double max_condition = 1e10);

struct InjectivityReport {
  bool pass = true;
  std::size_t points = 0;
  std::size_t violations = 0;
  double h = 0.0, eps_img = 0.0;
  double worst_image_gap = 0.0;  // smallest image distance among far-apart pairs seen
};
InjectivityReport injectivity_probe(const ParabolaFamily& fam, double h);

}  // namespace c2poly
