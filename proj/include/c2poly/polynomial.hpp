#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace c2poly {

// Exponent tuple; unused trailing slots are zero.
using Exponents = std::array<int, 3>;

// Number of monomials of total degree <= n in dim variables.
std::size_t monomial_count(int dim, int n);

// Position of x^e in graded-lex order (degree first, then lexicographically
// descending in the leading variable). The index does not depend on the
// degree of the containing space, so lower-degree spaces are prefixes.
std::size_t monomial_index(int dim, const Exponents& e);

// All exponents of total degree <= n, in storage order.
std::vector<Exponents> monomial_exponents(int dim, int n);

// Dense polynomial in up to three variables. The stored degree is part of
// the value: the zero polynomial of degree 4 is not the same object as the
// zero polynomial of degree 0.
class Polynomial {
 public:
  Polynomial() : Polynomial(1, 0) {}
  Polynomial(int dim, int degree);
  Polynomial(int dim, int degree, std::vector<double> coeffs);

  static Polynomial constant(int dim, double c);
  static Polynomial monomial(int dim, const Exponents& e, double c = 1.0);
  // Coordinate function x_i (0-based).
  static Polynomial coordinate(int dim, int i);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  double coeff(const Exponents& e) const;
  void set_coeff(const Exponents& e, double c);

  double operator()(std::span<const double> x) const;
  double operator()(double x) const;
  double operator()(double x, double y) const;
  double operator()(double x, double y, double z) const;

  Polynomial partial(int axis) const;
  // Same function, stored with degree max(degree, n).
  Polynomial raised_to(int n) const;
  // Drops (near-)zero leading blocks; degree becomes the true degree.
  Polynomial trimmed(double tol = 0.0) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  double max_abs_coeff() const;

 private:
  void check_point(std::size_t n) const;

  int dim_;
  int degree_;
  std::vector<double> coeffs_;
};

// Ordered first-order directions with repetition counts. Applying it to p
// yields prod_k (dir_k . grad)^{power_k} p.
struct DirectionalOperator {
  std::vector<std::vector<double>> directions;
  std::vector<int> powers;

  int order() const;
  Polynomial apply(const Polynomial& p) const;
};

// (xi . grad)^ell p at the coefficient level.
Polynomial directional_power(const Polynomial& p, std::span<const double> xi, int ell);

// d_{xi_1} ... d_{xi_r} p applied left to right.
Polynomial mixed_directional(const Polynomial& p,
                             const std::vector<std::vector<double>>& dirs);

struct KempermanTerm {
  int sign;
  std::vector<double> direction;
  int power;
};

// The 2^r signed pure powers whose sum equals the mixed product of dirs.
std::vector<KempermanTerm> kemperman_expand(const std::vector<std::vector<double>>& dirs);

// Sum of sign * (direction . grad)^power p over the terms.
Polynomial apply_kemperman(const Polynomial& p, const std::vector<KempermanTerm>& terms);

// Quadratic Q(t) = q0 + q1 t + (q2/2) t^2.
struct Quadratic {
  double q0 = 0.0, q1 = 0.0, q2 = 0.0;
  double value(double t) const { return q0 + q1 * t + 0.5 * q2 * t * t; }
  double slope(double t) const { return q1 + q2 * t; }
};

// d^r/dt^r p(z + t, Q(t)) at the given t, via the closed-form chain rule.
double composite_derivative(const Polynomial& p, double z, const Quadratic& Q, int r,
                            double t);

// Same quantity computed by composing into a univariate polynomial in t and
// differentiating its coefficients. Used as an independent check.
Polynomial compose_along_parabola(const Polynomial& p, double z, const Quadratic& Q);

// p(A u + c), where u has dimension A.cols() and x = A u + c has p.dim().
// A is row-major with p.dim() rows.
Polynomial affine_substitute(const Polynomial& p, int new_dim,
                             const std::vector<double>& A, const std::vector<double>& c);

// i.i.d. standard normal coefficients from a seeded mt19937_64.
Polynomial random_polynomial(int dim, int degree, std::uint64_t seed);

// Precomputed table of all partials d^alpha p with |alpha| <= k, for fast
// pointwise evaluation of derivative tensors (dim 2 only).
class PartialTable {
 public:
  PartialTable(const Polynomial& p, int max_order);
  int max_order() const { return max_order_; }
  // d1^{a} d2^{b} p at (x, y).
  double eval(int a, int b, double x, double y) const;
  const Polynomial& get(int a, int b) const;

 private:
  int max_order_;
  std::vector<Polynomial> table_;  // indexed by monomial_index of (a, b)
};

}  // namespace c2poly
