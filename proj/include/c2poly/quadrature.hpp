#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "c2poly/common.hpp"
#include "c2poly/domain.hpp"
#include "c2poly/polynomial.hpp"

namespace c2poly {

class GraphPatch;

// Gauss-Legendre nodes and weights on [-1, 1]; cached per order.
struct GaussRule1D {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule1D& gauss_legendre(int n);

struct QuadratureRule {
  std::vector<Vec2> nodes;
  std::vector<double> weights;
  int exactness = -1;  // total degree integrated exactly, -1 if not applicable
  std::string region;

  std::size_t size() const { return nodes.size(); }
  double total_weight() const;
};

using Field = std::function<double(const Vec2&)>;

// Rule integrating polynomials of total degree <= exactness on the domain.
// Exact for disk and ellipse; for implicit domains the y-direction is exact
// and the x-direction converged to about 1e-11 relative.
QuadratureRule domain_rule(const Domain& dom, int exactness);

// Integrals of x^a y^b over the domain for a + b <= n, in graded-lex order.
std::vector<double> moments(const Domain& dom, int n);

// Closed-form moments of a disk of radius r centered at the origin.
double centered_disk_moment(double r, int a, int b);

double integrate(const QuadratureRule& rule, const Field& f);
double integrate(const QuadratureRule& rule, const Polynomial& f);

// Integral of p over the domain from its moments.
double integrate_by_moments(const Polynomial& p, const std::vector<double>& mom);

// ||p||_2^2 as sum_{alpha,beta} c_alpha c_beta m_{alpha+beta}; needs moments
// up to degree 2 deg(p).
double l2_norm_squared_gram(const Polynomial& p, const std::vector<double>& mom);

// L^p norm. Finite p by quadrature of |f|^p; p = infinity by the node
// maximum followed by interior and boundary polishing.
double lp_norm(const Domain& dom, const Field& f, double p, const QuadratureRule& rule);
double lp_norm(const Domain& dom, const Polynomial& f, double p, const QuadratureRule& rule);

// Sup of |f| over the domain: node max, then local polish in the interior and
// along the boundary (boundary_samples points, Newton in arc length).
double sup_norm(const Domain& dom, const Field& f, const QuadratureRule& rule,
                std::size_t boundary_samples = 512);

// Tensor rule on the patch G(lambda) mapped by (x, s) -> (x, g(x) - s lambda L b),
// nodes returned in patch-local coordinates.
QuadratureRule patch_rule(const GraphPatch& patch, int base_order, int depth_order,
                          double lambda = 1.0);

// L^2(Omega)-orthonormal basis of bivariate polynomials of degree <= n,
// stored against Chebyshev products T_a(u_1) T_b(u_2), u = (x - shift) / scale.
struct OrthonormalBasis {
  int n = 0;
  Vec2 shift = Vec2::Zero();
  double scale = 1.0;
  Eigen::MatrixXd coef;       // column k holds q_k in Chebyshev products
  Eigen::VectorXd integrals;  // int q_k over the domain
  double gram_error = 0.0;    // max |<q_i, q_j> - delta_ij| on a finer rule

  std::size_t size() const { return static_cast<std::size_t>(coef.cols()); }
  Eigen::VectorXd eval(const Vec2& x) const;
  // q_k as a polynomial in x.
  Polynomial poly(std::size_t k) const;
  // sum_k c_k q_k in x.
  Polynomial combine(const Eigen::VectorXd& c) const;
};
OrthonormalBasis orthonormal_basis(const Domain& dom, int n);

// Gaussian coefficients in the orthonormal basis: a rotation-invariant
// random element of the degree-n polynomials.
Polynomial random_orthonormal_polynomial(const OrthonormalBasis& basis, std::uint64_t seed);

}  // namespace c2poly
