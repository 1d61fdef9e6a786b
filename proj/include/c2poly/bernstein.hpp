#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "c2poly/domain.hpp"
#include "c2poly/patch.hpp"
#include "c2poly/polynomial.hpp"
#include "c2poly/quadrature.hpp"

namespace c2poly {

// Operator D_{n,mu}^{r, j+l}: r tangential and j + l normal derivatives.
struct MaximalDerivativeSpec {
  int r = 0, j = 0, l = 0;
  double mu = 0.0;        // 0 means sqrt(diam) + 1
  double density = 64.0;  // boundary samples per neighbourhood diameter 2 mu phi
  int floor = 32;         // minimum samples over the whole boundary

  int tangential() const { return r; }
  int normal() const { return j + l; }
  int order() const { return r + j + l; }
  int exponent() const { return r + j + 2 * l; }
};

// Evaluates the maximal operator for one domain and operator spec. Boundary
// samples come from nested uniform arc-length grids (32 * 2^k points), so a
// higher density always scans a superset.
class MaximalDerivative {
 public:
  MaximalDerivative(const Domain& dom, const MaximalDerivativeSpec& spec);

  double mu() const { return mu_; }
  const MaximalDerivativeSpec& spec() const { return spec_; }

  // Samples scanned for xi at degree n (grid level actually used).
  std::size_t samples_for(const Vec2& xi, int n) const;
  double operator()(const Polynomial& f, const Vec2& xi, int n) const;
  // Same, with the partial table of f precomputed (order >= spec.order()).
  double eval(const PartialTable& T, const Vec2& xi, int n) const;

 private:
  struct Level {
    std::vector<Vec2> pos, tangent, normal;
  };
  const Level& level(std::size_t k) const;
  std::size_t level_index(double radius) const;

  Domain dom_;
  MaximalDerivativeSpec spec_;
  double mu_;
  double perimeter_;
  mutable std::vector<std::unique_ptr<Level>> levels_;
  mutable std::mutex mutex_;
};

double maximal_derivative(const Domain& dom, const MaximalDerivativeSpec& spec, const Polynomial& f,
                          const Vec2& xi, int n);

struct BernsteinValue {
  double functional = 0.0;  // || phi^j D f ||_p
  double norm = 0.0;        // || f ||_p
  double ratio = 0.0;
  std::size_t nodes = 0;
};
// p finite: quadrature with the rule of exactness 2n + 10; p = infinity:
// max over the rule nodes plus boundary and depth-1/n^2 samples.
BernsteinValue bernstein_functional(const Domain& dom, const MaximalDerivativeSpec& spec,
                                    const Polynomial& f, int n, double p);

struct GrowthFit {
  std::vector<int> n_used;
  std::vector<double> ratios;  // geometric mean over trials, per n
  double slope = 0.0;
  bool degenerate = false;     // fewer than two positive ratios
  std::vector<int> n_skipped;  // degrees below the derivative order
};
// family(n, trial) returns a degree-n polynomial; degrees below the operator
// order are skipped (the derivative vanishes identically).
GrowthFit growth_exponent(const Domain& dom, const MaximalDerivativeSpec& spec,
                          const std::function<Polynomial(int, std::size_t)>& family, double p,
                          const std::vector<int>& n_grid, std::size_t trials = 1);

// Random family: Gaussian coefficients in the orthonormal basis, seeded by
// (seed, n, trial).
std::function<Polynomial(int, std::size_t)> random_family(const Domain& dom, std::uint64_t seed);

// || phi_n^i D^(r) d_2^{i+j} f ||_{L^p(G)} / || f ||_{L^p(G(lambda))}, patch
// local coordinates, phi_n = sqrt(g(x) - y) + 1/n.
struct PatchBernstein {
  double functional = 0.0;
  double norm = 0.0;
  double ratio = 0.0;
};
PatchBernstein patch_bernstein_check(const GraphPatch& patch, const Polynomial& f_global, int r,
                                     int i, int j, double p, double lambda, int n,
                                     int order = 0);

// n-sweep of patch_bernstein_check over a family of global polynomials;
// degrees below r + i + j are skipped.
GrowthFit patch_growth_exponent(const GraphPatch& patch,
                                const std::function<Polynomial(int, std::size_t)>& family, int r,
                                int i, int j, double p, double lambda, const std::vector<int>& n_grid,
                                std::size_t trials = 1);

// f expressed in the patch's local coordinates.
Polynomial to_patch_local(const GraphPatch& patch, const Polynomial& f_global);

// d = 3 graph patch x3 = g(x1, x2): D_tan^alpha f at xi with frames
// e_k + d_k g(x0) e_3, x0 = (xi_1, xi_2), evaluated by nested directional
// derivatives and through the Kemperman expansion.
struct FrameCheck {
  double direct = 0.0;
  double kemperman = 0.0;
  double difference = 0.0;
  std::size_t terms = 0;
};
FrameCheck tangential_frame_check(const std::function<std::array<double, 2>(double, double)>& grad_g,
                                  const Polynomial& f, const std::array<int, 2>& alpha,
                                  const std::array<double, 3>& xi);

// D^(1) applied twice (variable coefficient g'(x)) against the frozen
// second power D^(2); they differ by g''(x) d_2 f.
struct NoncommutativityReport {
  bool witness = false;
  double max_difference = 0.0;
  Vec2 where = Vec2::Zero();
  std::size_t probes = 0;
};
NoncommutativityReport noncommutativity_witness(const GraphPatch& patch, const Polynomial& f_local,
                                                std::size_t probes, std::uint64_t seed,
                                                double tol = 1e-9);

}  // namespace c2poly
