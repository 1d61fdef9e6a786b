#include "c2poly/polynomial.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <string>

#include "c2poly/common.hpp"

namespace c2poly {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw DomainError("polynomial dimension must be 1, 2 or 3");
}

int total(const Exponents& e) { return e[0] + e[1] + e[2]; }

// Calls f(index, exponents) for every monomial of degree <= n in order.
template <class F>
void for_each_monomial(int dim, int n, F&& f) {
  std::size_t idx = 0;
  for (int k = 0; k <= n; ++k) {
    if (dim == 1) {
      f(idx++, Exponents{k, 0, 0});
    } else if (dim == 2) {
      for (int a = k; a >= 0; --a) f(idx++, Exponents{a, k - a, 0});
    } else {
      for (int a = k; a >= 0; --a)
        for (int b = k - a; b >= 0; --b) f(idx++, Exponents{a, b, k - a - b});
    }
  }
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Univariate helpers (coefficients in increasing powers).
std::vector<double> umul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

}  // namespace

std::size_t monomial_count(int dim, int n) {
  check_dim(dim);
  if (n < 0) return 0;
  std::size_t num = 1, den = 1;
  for (int i = 1; i <= dim; ++i) {
    num *= static_cast<std::size_t>(n + i);
    den *= static_cast<std::size_t>(i);
  }
  return num / den;
}

std::size_t monomial_index(int dim, const Exponents& e) {
  const std::size_t k = static_cast<std::size_t>(total(e));
  switch (dim) {
    case 1:
      return k;
    case 2:
      return k * (k + 1) / 2 + static_cast<std::size_t>(e[1]);
    case 3: {
      const std::size_t m = k - static_cast<std::size_t>(e[0]);
      return k * (k + 1) * (k + 2) / 6 + m * (m + 1) / 2 + static_cast<std::size_t>(e[2]);
    }
    default:
      throw DomainError("polynomial dimension must be 1, 2 or 3");
  }
}

std::vector<Exponents> monomial_exponents(int dim, int n) {
  std::vector<Exponents> out;
  out.reserve(monomial_count(dim, n));
  for_each_monomial(dim, n, [&](std::size_t, const Exponents& e) { out.push_back(e); });
  return out;
}

Polynomial::Polynomial(int dim, int degree) : dim_(dim), degree_(degree) {
  check_dim(dim);
  if (degree < 0) throw DomainError("polynomial degree must be non-negative");
  coeffs_.assign(monomial_count(dim, degree), 0.0);
}

Polynomial::Polynomial(int dim, int degree, std::vector<double> coeffs)
    : dim_(dim), degree_(degree), coeffs_(std::move(coeffs)) {
  check_dim(dim);
  if (degree < 0) throw DomainError("polynomial degree must be non-negative");
  if (coeffs_.size() != monomial_count(dim, degree))
    throw DomainError("coefficient count " + std::to_string(coeffs_.size()) +
                      " does not match binomial(n+d, d) = " +
                      std::to_string(monomial_count(dim, degree)));
}

Polynomial Polynomial::constant(int dim, double c) {
  Polynomial p(dim, 0);
  p.coeffs_[0] = c;
  return p;
}

Polynomial Polynomial::monomial(int dim, const Exponents& e, double c) {
  for (int i = dim; i < 3; ++i)
    if (e[i] != 0) throw DomainError("exponent beyond polynomial dimension");
  Polynomial p(dim, total(e));
  p.coeffs_[monomial_index(dim, e)] = c;
  return p;
}

Polynomial Polynomial::coordinate(int dim, int i) {
  Exponents e{0, 0, 0};
  e.at(static_cast<std::size_t>(i)) = 1;
  return monomial(dim, e);
}

double Polynomial::coeff(const Exponents& e) const {
  if (total(e) > degree_) return 0.0;
  return coeffs_[monomial_index(dim_, e)];
}

void Polynomial::set_coeff(const Exponents& e, double c) {
  if (total(e) > degree_) throw DomainError("exponent exceeds stored degree");
  coeffs_[monomial_index(dim_, e)] = c;
}

void Polynomial::check_point(std::size_t n) const {
  if (n != static_cast<std::size_t>(dim_))
    throw DomainError("point has " + std::to_string(n) + " coordinates, polynomial has dim " +
                      std::to_string(dim_));
}

double Polynomial::operator()(std::span<const double> x) const {
  check_point(x.size());
  if (dim_ == 1) return (*this)(x[0]);
  if (dim_ == 2) return (*this)(x[0], x[1]);
  return (*this)(x[0], x[1], x[2]);
}

double Polynomial::operator()(double x) const {
  check_point(1);
  double r = 0.0;
  for (int k = degree_; k >= 0; --k) r = r * x + coeffs_[static_cast<std::size_t>(k)];
  return r;
}

double Polynomial::operator()(double x, double y) const {
  check_point(2);
  // Within degree k the block is sum_b c_{k-b,b} x^{k-b} y^b: Horner in y/x
  // is unstable near x = 0, so use explicit power tables instead.
  double px[64], py[64];
  const int n = degree_;
  if (n >= 64) {
    double r = 0.0;
    for_each_monomial(2, n, [&](std::size_t i, const Exponents& e) {
      r += coeffs_[i] * std::pow(x, e[0]) * std::pow(y, e[1]);
    });
    return r;
  }
  px[0] = py[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    px[i] = px[i - 1] * x;
    py[i] = py[i - 1] * y;
  }
  double r = 0.0;
  std::size_t idx = 0;
  for (int k = 0; k <= n; ++k)
    for (int b = 0; b <= k; ++b) r += coeffs_[idx++] * px[k - b] * py[b];
  return r;
}

double Polynomial::operator()(double x, double y, double z) const {
  check_point(3);
  const int n = degree_;
  std::vector<double> px(n + 1), py(n + 1), pz(n + 1);
  px[0] = py[0] = pz[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    px[i] = px[i - 1] * x;
    py[i] = py[i - 1] * y;
    pz[i] = pz[i - 1] * z;
  }
  double r = 0.0;
  for_each_monomial(3, n, [&](std::size_t i, const Exponents& e) {
    r += coeffs_[i] * px[e[0]] * py[e[1]] * pz[e[2]];
  });
  return r;
}

Polynomial Polynomial::partial(int axis) const {
  if (axis < 0 || axis >= dim_) throw DomainError("partial: axis out of range");
  Polynomial r(dim_, std::max(degree_ - 1, 0));
  for_each_monomial(dim_, degree_, [&](std::size_t i, const Exponents& e) {
    if (e[axis] == 0 || coeffs_[i] == 0.0) return;
    Exponents f = e;
    f[axis] -= 1;
    r.coeffs_[monomial_index(dim_, f)] += coeffs_[i] * e[axis];
  });
  return r;
}

Polynomial Polynomial::raised_to(int n) const {
  if (n <= degree_) return *this;
  Polynomial r(dim_, n);
  std::copy(coeffs_.begin(), coeffs_.end(), r.coeffs_.begin());
  return r;
}

Polynomial Polynomial::trimmed(double tol) const {
  int n = degree_;
  while (n > 0) {
    const std::size_t lo = monomial_count(dim_, n - 1), hi = monomial_count(dim_, n);
    bool zero = true;
    for (std::size_t i = lo; i < hi; ++i)
      if (std::abs(coeffs_[i]) > tol) zero = false;
    if (!zero) break;
    --n;
  }
  std::vector<double> c(coeffs_.begin(), coeffs_.begin() + monomial_count(dim_, n));
  return Polynomial(dim_, n, std::move(c));
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.dim_ != dim_) throw DomainError("dimension mismatch in polynomial sum");
  if (o.degree_ > degree_) *this = raised_to(o.degree_);
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.dim_ != dim_) throw DomainError("dimension mismatch in polynomial difference");
  if (o.degree_ > degree_) *this = raised_to(o.degree_);
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.dim_ != b.dim_) throw DomainError("dimension mismatch in polynomial product");
  Polynomial r(a.dim_, a.degree_ + b.degree_);
  const auto eb = monomial_exponents(b.dim_, b.degree_);
  for_each_monomial(a.dim_, a.degree_, [&](std::size_t i, const Exponents& e) {
    if (a.coeffs_[i] == 0.0) return;
    for (std::size_t j = 0; j < eb.size(); ++j) {
      if (b.coeffs_[j] == 0.0) continue;
      const Exponents f{e[0] + eb[j][0], e[1] + eb[j][1], e[2] + eb[j][2]};
      r.coeffs_[monomial_index(a.dim_, f)] += a.coeffs_[i] * b.coeffs_[j];
    }
  });
  return r;
}

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

int DirectionalOperator::order() const {
  int s = 0;
  for (int k : powers) s += k;
  return s;
}

Polynomial DirectionalOperator::apply(const Polynomial& p) const {
  if (directions.size() != powers.size())
    throw DomainError("directional operator: directions and powers differ in length");
  Polynomial r = p;
  for (std::size_t k = 0; k < directions.size(); ++k) {
    if (powers[k] < 1) throw DomainError("directional operator: powers must be positive");
    r = directional_power(r, directions[k], powers[k]);
  }
  return r;
}

Polynomial directional_power(const Polynomial& p, std::span<const double> xi, int ell) {
  if (static_cast<int>(xi.size()) != p.dim())
    throw DomainError("direction length does not match polynomial dimension");
  if (ell < 0) throw DomainError("directional power must be non-negative");
  Polynomial r = p;
  for (int k = 0; k < ell; ++k) {
    Polynomial next(p.dim(), std::max(r.degree() - 1, 0));
    for (int i = 0; i < p.dim(); ++i)
      if (xi[i] != 0.0) next += r.partial(i) * xi[i];
    r = std::move(next);
  }
  return r;
}

Polynomial mixed_directional(const Polynomial& p,
                             const std::vector<std::vector<double>>& dirs) {
  Polynomial r = p;
  for (const auto& d : dirs) r = directional_power(r, d, 1);
  return r;
}

std::vector<KempermanTerm> kemperman_expand(const std::vector<std::vector<double>>& dirs) {
  const std::size_t r = dirs.size();
  if (r == 0) throw DomainError("kemperman_expand needs at least one direction");
  if (r > 20) throw DomainError("kemperman_expand: too many directions");
  const std::size_t dim = dirs[0].size();
  for (const auto& d : dirs)
    if (d.size() != dim) throw DomainError("kemperman_expand: directions differ in length");
  std::vector<KempermanTerm> out;
  out.reserve(std::size_t{1} << r);
  for (std::uint32_t mask = 0; mask < (1u << r); ++mask) {
    KempermanTerm t{std::popcount(mask) % 2 ? -1 : 1, std::vector<double>(dim, 0.0),
                    static_cast<int>(r)};
    for (std::size_t j = 0; j < r; ++j)
      if (mask & (1u << j))
        for (std::size_t i = 0; i < dim; ++i)
          t.direction[i] -= dirs[j][i] / static_cast<double>(j + 1);
    out.push_back(std::move(t));
  }
  return out;
}

Polynomial apply_kemperman(const Polynomial& p, const std::vector<KempermanTerm>& terms) {
  Polynomial sum(p.dim(), 0);
  for (const auto& t : terms) sum += directional_power(p, t.direction, t.power) * double(t.sign);
  return sum;
}

double composite_derivative(const Polynomial& p, double z, const Quadratic& Q, int r,
                            double t) {
  if (p.dim() != 2) throw DomainError("composite_derivative needs a bivariate polynomial");
  if (r < 0) throw DomainError("composite_derivative: r must be non-negative");
  const double x = z + t, y = Q.value(t), d1 = Q.slope(t), d2 = Q.q2;
  PartialTable tab(p, r);
  double sum = 0.0;
  for (int b = 0; 2 * b <= r; ++b)
    for (int a = 0; a + 2 * b <= r; ++a) {
      const int i = r - a - 2 * b;
      const double c = factorial(r) / (factorial(i) * factorial(a) * factorial(b) *
                                       std::ldexp(1.0, b));
      sum += c * std::pow(d1, a) * std::pow(d2, b) * tab.eval(i, a + b, x, y);
    }
  return sum;
}

Polynomial compose_along_parabola(const Polynomial& p, double z, const Quadratic& Q) {
  if (p.dim() != 2) throw DomainError("compose_along_parabola needs a bivariate polynomial");
  const int n = p.degree();
  std::vector<std::vector<double>> xp(n + 1), yp(n + 1);
  xp[0] = yp[0] = {1.0};
  const std::vector<double> lx{z, 1.0}, ly{Q.q0, Q.q1, 0.5 * Q.q2};
  for (int k = 1; k <= n; ++k) {
    xp[k] = umul(xp[k - 1], lx);
    yp[k] = umul(yp[k - 1], ly);
  }
  std::vector<double> out(static_cast<std::size_t>(2 * n + 1), 0.0);
  for_each_monomial(2, n, [&](std::size_t i, const Exponents& e) {
    const double c = p.coeffs()[i];
    if (c == 0.0) return;
    const auto term = umul(xp[e[0]], yp[e[1]]);
    for (std::size_t k = 0; k < term.size(); ++k) out[k] += c * term[k];
  });
  return Polynomial(1, 2 * n, std::move(out));
}

Polynomial affine_substitute(const Polynomial& p, int new_dim, const std::vector<double>& A,
                             const std::vector<double>& c) {
  check_dim(new_dim);
  const int d = p.dim();
  if (A.size() != static_cast<std::size_t>(d * new_dim) || c.size() != static_cast<std::size_t>(d))
    throw DomainError("affine_substitute: matrix/offset shape mismatch");
  const int n = p.degree();
  // powers[i][k] = (row_i . u + c_i)^k
  std::vector<std::vector<Polynomial>> powers(d);
  for (int i = 0; i < d; ++i) {
    Polynomial lin = Polynomial::constant(new_dim, c[i]).raised_to(1);
    for (int j = 0; j < new_dim; ++j) {
      Exponents e{0, 0, 0};
      e[j] = 1;
      lin.set_coeff(e, A[static_cast<std::size_t>(i * new_dim + j)]);
    }
    powers[i].push_back(Polynomial::constant(new_dim, 1.0));
    for (int k = 1; k <= n; ++k) powers[i].push_back(powers[i].back() * lin);
  }
  Polynomial out(new_dim, n);
  for_each_monomial(d, n, [&](std::size_t idx, const Exponents& e) {
    const double cf = p.coeffs()[idx];
    if (cf == 0.0) return;
    Polynomial term = powers[0][e[0]];
    for (int i = 1; i < d; ++i) term = term * powers[i][e[i]];
    out += term * cf;
  });
  return out.raised_to(n);
}

Polynomial random_polynomial(int dim, int degree, std::uint64_t seed) {
  Polynomial p(dim, degree);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> c(p.coeffs().size());
  for (double& v : c) v = normal(rng);
  return Polynomial(dim, degree, std::move(c));
}

PartialTable::PartialTable(const Polynomial& p, int max_order) : max_order_(max_order) {
  if (p.dim() != 2) throw DomainError("PartialTable is bivariate only");
  table_.resize(monomial_count(2, max_order));
  for (int a = 0; a <= max_order; ++a) {
    Polynomial pa = a == 0 ? p : table_[monomial_index(2, {a - 1, 0, 0})].partial(0);
    table_[monomial_index(2, {a, 0, 0})] = pa;
    for (int b = 1; a + b <= max_order; ++b)
      table_[monomial_index(2, {a, b, 0})] = table_[monomial_index(2, {a, b - 1, 0})].partial(1);
  }
}

double PartialTable::eval(int a, int b, double x, double y) const {
  return get(a, b)(x, y);
}

const Polynomial& PartialTable::get(int a, int b) const {
  if (a < 0 || b < 0 || a + b > max_order_) throw DomainError("PartialTable: order out of range");
  return table_[monomial_index(2, {a, b, 0})];
}

}  // namespace c2poly
