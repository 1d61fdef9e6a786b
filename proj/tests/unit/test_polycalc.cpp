#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "c2poly/polynomial.hpp"

using namespace c2poly;

namespace {

using Dir = std::vector<double>;

// Oracle: the restriction s -> p(x + s v) is a univariate polynomial of
// degree <= deg. Interpolate it at Chebyshev points and read off the
// ell-th derivative at s = 0.
double line_derivative(const Polynomial& p, const std::vector<double>& x, const Dir& v, int ell) {
  const int deg = p.degree();
  const int m = deg + 1;
  Eigen::MatrixXd V(m, m);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    const double s = std::cos(M_PI * (i + 0.5) / m);
    std::vector<double> q(x);
    for (std::size_t k = 0; k < q.size(); ++k) q[k] += s * v[k];
    y(i) = p(std::span<const double>(q));
    for (int j = 0; j < m; ++j) V(i, j) = std::pow(s, j);
  }
  const Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
  if (ell > deg) return 0.0;
  return std::tgamma(ell + 1.0) * c(ell);
}

Dir random_dir(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Dir d(dim);
  for (auto& v : d) v = g(rng);
  return d;
}

double coeff_dist(const Polynomial& a, const Polynomial& b) {
  const int n = std::max(a.degree(), b.degree());
  const auto ca = a.raised_to(n).coeffs(), cb = b.raised_to(n).coeffs();
  double m = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) m = std::max(m, std::abs(ca[i] - cb[i]));
  return m;
}

Polynomial xy() { return Polynomial::monomial(2, {1, 1, 0}); }

}  // namespace

TEST_CASE("coefficient count and storage") {
  for (int dim = 1; dim <= 3; ++dim)
    for (int n = 0; n <= 6; ++n) {
      const double binom = std::tgamma(n + dim + 1.0) / (std::tgamma(n + 1.0) * std::tgamma(dim + 1.0));
      CHECK(Polynomial(dim, n).coeffs().size() == static_cast<std::size_t>(std::lround(binom)));
      CHECK(monomial_count(dim, n) == static_cast<std::size_t>(std::lround(binom)));
    }
}

TEST_CASE("evaluation") {
  CHECK(Polynomial::constant(2, 1.0)(0.3, -0.7) == 1.0);
  CHECK(xy()(2.0, 3.0) == 6.0);
  const Polynomial r2 = Polynomial::monomial(2, {2, 0, 0}) + Polynomial::monomial(2, {0, 2, 0});
  CHECK(r2(0.6, 0.8) == doctest::Approx(1.0).epsilon(1e-15));
  std::vector<double> bad{1.0, 2.0, 3.0};
  CHECK_THROWS(r2(std::span<const double>(bad)));
}

TEST_CASE("derivative degree") {
  const Polynomial p = random_polynomial(2, 5, 3);
  CHECK(p.partial(0).degree() == 4);
  CHECK(Polynomial::constant(2, 2.0).partial(1).degree() == 0);
  DirectionalOperator op{{{1.0, 0.5}, {0.0, 1.0}}, {2, 1}};
  CHECK(op.order() == 3);
  CHECK(op.apply(p).degree() == 2);
  CHECK(op.apply(random_polynomial(2, 2, 1)).degree() == 0);
}

TEST_CASE("directional_power examples") {
  const Dir e1{1, 0}, ones{1, 1};
  CHECK(coeff_dist(directional_power(xy(), e1, 1), Polynomial::coordinate(2, 1)) == 0.0);
  const Polynomial two = directional_power(xy(), ones, 2);
  CHECK(two(0.3, -4.0) == doctest::Approx(2.0));
  CHECK(two.degree() == 0);
  const Polynomial p = random_polynomial(2, 4, 9);
  CHECK(coeff_dist(directional_power(p, ones, 0), p) == 0.0);
  CHECK_THROWS(directional_power(p, Dir{1, 0, 0}, 1));
}

TEST_CASE("directional_power is iterated first power and matches the line oracle") {
  std::mt19937_64 rng(11);
  for (int dim = 1; dim <= 3; ++dim)
    for (int trial = 0; trial < 10; ++trial) {
      const Polynomial p = random_polynomial(dim, 5, 100 + trial);
      const Dir v = random_dir(rng, dim);
      Polynomial it = p;
      for (int ell = 1; ell <= 4; ++ell) {
        it = directional_power(it, v, 1);
        const Polynomial direct = directional_power(p, v, ell);
        CHECK(coeff_dist(it, direct) <= 1e-12 * std::max(1.0, direct.max_abs_coeff()));
        const std::vector<double> x = random_dir(rng, dim);
        const double want = line_derivative(p, x, v, ell);
        CHECK(direct(std::span<const double>(x)) == doctest::Approx(want).epsilon(1e-8).scale(1.0));
      }
    }
}

TEST_CASE("mixed_directional examples and permutation invariance") {
  CHECK(mixed_directional(xy(), {{1, 0}, {0, 1}})(5.0, -2.0) == doctest::Approx(1.0));
  const Polynomial x3 = Polynomial::monomial(2, {3, 0, 0});
  CHECK(mixed_directional(x3, {{0, 1}}).max_abs_coeff() == 0.0);
  CHECK(coeff_dist(mixed_directional(x3, {}), x3) == 0.0);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Polynomial p = random_polynomial(3, 5, trial);
    std::vector<Dir> dirs{random_dir(rng, 3), random_dir(rng, 3), random_dir(rng, 3)};
    const Polynomial a = mixed_directional(p, dirs);
    std::reverse(dirs.begin(), dirs.end());
    const Polynomial b = mixed_directional(p, dirs);
    std::swap(dirs[0], dirs[1]);
    const Polynomial c = mixed_directional(p, dirs);
    CHECK(coeff_dist(a, b) <= 1e-12 * std::max(1.0, a.max_abs_coeff()));
    CHECK(coeff_dist(a, c) <= 1e-12 * std::max(1.0, a.max_abs_coeff()));
  }
}

TEST_CASE("kemperman_expand examples") {
  const auto t1 = kemperman_expand({{2.0, -1.0}});
  REQUIRE(t1.size() == 2);
  // S = {} has the zero direction, S = {1} has -xi_1 with sign -1
  int nonzero = 0;
  for (const auto& t : t1) {
    CHECK(t.power == 1);
    if (t.direction[0] != 0.0 || t.direction[1] != 0.0) {
      ++nonzero;
      CHECK(t.sign == -1);
      CHECK(t.direction[0] == -2.0);
      CHECK(t.direction[1] == 1.0);
    }
  }
  CHECK(nonzero == 1);

  const auto t2 = kemperman_expand({{1, 0}, {0, 1}});
  CHECK(t2.size() == 4);
  CHECK(apply_kemperman(xy(), t2)(0.2, 0.9) == doctest::Approx(1.0));
}

TEST_CASE("Kemperman identity, r <= 4, dim <= 3, 100 random instances") {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + trial % 3;
    const int r = 1 + (trial / 3) % 4;
    std::vector<Dir> dirs;
    for (int k = 0; k < r; ++k) dirs.push_back(random_dir(rng, dim));
    const Polynomial p = random_polynomial(dim, 4, 7000 + trial);
    const auto terms = kemperman_expand(dirs);
    CHECK(terms.size() == (1u << r));
    const Polynomial lhs = apply_kemperman(p, terms);
    const Polynomial rhs = mixed_directional(p, dirs);
    worst = std::max(worst, coeff_dist(lhs, rhs));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("composite_derivative") {
  SUBCASE("r = 1 is the chain rule") {
    const Polynomial p = random_polynomial(2, 4, 1);
    const Quadratic Q{0.3, -0.4, 1.7};
    const double z = 0.2, t = 0.35;
    const double x = z + t, y = Q.value(t);
    const double want = p.partial(0)(x, y) + Q.slope(t) * p.partial(1)(x, y);
    CHECK(composite_derivative(p, z, Q, 1, t) == doctest::Approx(want).epsilon(1e-13));
  }
  SUBCASE("p = y, Q'' = -A, r = 2") {
    const double A = 7.5;
    CHECK(composite_derivative(Polynomial::coordinate(2, 1), 0.1, Quadratic{1.0, 0.5, -A}, 2, 0.3) ==
          doctest::Approx(-A));
  }
  SUBCASE("matches differentiation of the composed polynomial") {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 60; ++trial) {
      const int deg = 1 + trial % 6;
      const Polynomial p = random_polynomial(2, deg, 500 + trial);
      const Quadratic Q{g(rng), g(rng), g(rng)};
      const double z = 0.5 * g(rng), t = 0.5 * g(rng);
      // independent oracle: sample F(t) = p(z + t, Q(t)), degree <= 2 deg
      Polynomial F(1, 2 * deg);
      {
        const int m = 2 * deg + 1;
        Eigen::MatrixXd V(m, m);
        Eigen::VectorXd y(m);
        for (int i = 0; i < m; ++i) {
          const double s = t + std::cos(M_PI * (i + 0.5) / m);
          y(i) = p(z + s, Q.value(s));
          for (int j = 0; j < m; ++j) V(i, j) = std::pow(s - t, j);
        }
        const Eigen::VectorXd c = V.colPivHouseholderQr().solve(y);
        for (int j = 0; j < m; ++j) F.set_coeff({j, 0, 0}, c(j));
      }
      const Polynomial composed = compose_along_parabola(p, z, Q);
      for (int r = 0; r <= 4; ++r) {
        const double closed = composite_derivative(p, z, Q, r, t);
        const double oracle = r <= F.degree() ? std::tgamma(r + 1.0) * F.coeff({r, 0, 0}) : 0.0;
        Polynomial d = composed;
        for (int k = 0; k < r; ++k) d = d.partial(0);
        const double exact = d(t);
        const double scale = std::max(1.0, std::abs(exact));
        CHECK(std::abs(closed - exact) <= 1e-9 * scale);
        CHECK(std::abs(oracle - exact) <= 1e-6 * scale);
      }
    }
  }
}

TEST_CASE("random_polynomial") {
  CHECK(random_polynomial(2, 4, 42).coeffs() == random_polynomial(2, 4, 42).coeffs());
  CHECK(random_polynomial(3, 0, 1).coeffs().size() == 1);
  CHECK(random_polynomial(2, 4, 42).coeffs() != random_polynomial(2, 4, 43).coeffs());
  // standard normal: sample moments of many coefficients
  const auto c = random_polynomial(2, 60, 9).coeffs();
  double m = 0, v = 0;
  for (double x : c) m += x;
  m /= c.size();
  for (double x : c) v += (x - m) * (x - m);
  v /= c.size();
  CHECK(std::abs(m) < 0.1);
  CHECK(std::abs(v - 1.0) < 0.1);
}

TEST_CASE("affine_substitute agrees with pointwise composition") {
  const Polynomial p = random_polynomial(2, 5, 3);
  const std::vector<double> A{0.3, -1.2, 0.8, 0.5}, c{0.1, -0.4};
  const Polynomial q = affine_substitute(p, 2, A, c);
  for (double u : {-0.7, 0.2, 1.1})
    for (double v : {-0.3, 0.6}) {
      const double x = A[0] * u + A[1] * v + c[0], y = A[2] * u + A[3] * v + c[1];
      CHECK(q(u, v) == doctest::Approx(p(x, y)).epsilon(1e-12));
    }
}
