#include <doctest.h>

#include <cmath>

#include "c2poly/patch.hpp"
#include "c2poly/quadrature.hpp"

using namespace c2poly;

namespace {

Domain unit_disk() { return Domain::disk(Vec2(0, 0), 1.0); }

Domain implicit_disk() {
  Polynomial phi(2, 2);
  phi.set_coeff({2, 0, 0}, 1.0);
  phi.set_coeff({0, 2, 0}, 1.0);
  phi.set_coeff({0, 0, 0}, -1.0);
  Box box;
  box.lo = Vec2(-1.1, -1.1);
  box.hi = Vec2(1.1, 1.1);
  return Domain::implicit(ImplicitField::from_polynomial(phi), box, 1.0, Vec2(0, 0), phi);
}

double moment(const std::vector<double>& m, int a, int b) { return m[monomial_index(2, {a, b, 0})]; }

// Polar oracle on the unit disk: int x^a y^b = int_0^1 r^{a+b+1} dr * int cos^a sin^b.
// The angular factor is B((a+1)/2, (b+1)/2) for even a, b and 0 otherwise.
double disk_oracle(int a, int b) {
  if (a % 2 || b % 2) return 0.0;
  const double ang = 2 * std::tgamma((a + 1) / 2.0) * std::tgamma((b + 1) / 2.0) / std::tgamma((a + b + 2) / 2.0);
  return ang / (a + b + 2);
}

}  // namespace

TEST_CASE("Gauss-Legendre") {
  const auto& g = gauss_legendre(7);
  double s = 0;
  for (double w : g.w) {
    CHECK(w > 0);
    s += w;
  }
  CHECK(s == doctest::Approx(2.0).epsilon(1e-15));
  double m12 = 0;
  for (std::size_t i = 0; i < g.x.size(); ++i) m12 += g.w[i] * std::pow(g.x[i], 12);
  CHECK(m12 == doctest::Approx(2.0 / 13).epsilon(1e-14));
}

TEST_CASE("disk moments") {
  const auto m = moments(unit_disk(), 8);
  CHECK(moment(m, 0, 0) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(moment(m, 1, 0) == 0.0);
  CHECK(moment(m, 2, 0) == doctest::Approx(kPi / 4).epsilon(1e-15));
  CHECK(moment(m, 2, 2) == doctest::Approx(kPi / 24).epsilon(1e-15));
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; a + b <= 8; ++b) CHECK(std::abs(moment(m, a, b) - disk_oracle(a, b)) <= 1e-14);
}

TEST_CASE("ellipse moments are the affine image of the disk's") {
  const double A = 2.0, B = 0.7;
  const Vec2 c(0.3, -0.2);
  const auto m = moments(Domain::ellipse(A, B, c), 6);
  CHECK(moment(m, 0, 0) == doctest::Approx(kPi * A * B).epsilon(1e-14));
  // x = c + (A u, B v): expand (c_x + A u)^a (c_y + B v)^b binomially
  auto binom = [](int n, int k) { return std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)); };
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; a + b <= 6; ++b) {
      double want = 0;
      for (int i = 0; i <= a; ++i)
        for (int j = 0; j <= b; ++j)
          want += binom(a, i) * binom(b, j) * std::pow(c.x(), a - i) * std::pow(A, i) * std::pow(c.y(), b - j) *
                  std::pow(B, j) * disk_oracle(i, j) * A * B;
      CHECK(std::abs(moment(m, a, b) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("implicit-domain moments reach the analytic values") {
  const auto m = moments(implicit_disk(), 6);
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; a + b <= 6; ++b) CHECK(std::abs(moment(m, a, b) - disk_oracle(a, b)) <= 1e-10);
}

TEST_CASE("domain_rule") {
  const QuadratureRule r = domain_rule(unit_disk(), 10);
  CHECK(r.total_weight() == doctest::Approx(kPi).epsilon(1e-13));
  for (double w : r.weights) CHECK(w > 0);
  const Polynomial p = random_polynomial(2, 10, 4);
  CHECK(integrate(r, p) == doctest::Approx(integrate_by_moments(p, moments(unit_disk(), 10))).epsilon(1e-12));
}

TEST_CASE("lp_norm examples") {
  const Domain D = unit_disk();
  const QuadratureRule r = domain_rule(D, 8);
  CHECK(lp_norm(D, Polynomial::constant(2, -3.0), 2.0, r) == doctest::Approx(3 * std::sqrt(kPi)).epsilon(1e-13));
  CHECK(lp_norm(D, Polynomial::coordinate(2, 0), 2.0, r) == doctest::Approx(std::sqrt(kPi) / 2).epsilon(1e-13));
  CHECK(lp_norm(D, Polynomial::coordinate(2, 0), INFINITY, r) == doctest::Approx(1.0).epsilon(1e-10));
  // |x| on the disk: int = 4/3, the kink at x = 0 slows the rule down
  const QuadratureRule fine = domain_rule(D, 60);
  CHECK(lp_norm(D, Polynomial::coordinate(2, 0), 1.0, fine) == doctest::Approx(4.0 / 3).epsilon(2e-3));
}

TEST_CASE("lp_norm(f, 2)^2 equals the Gram value") {
  const Domain D = Domain::ellipse(1.5, 0.8, Vec2(0.1, 0.2));
  const auto mom = moments(D, 16);
  for (int deg = 0; deg <= 8; ++deg) {
    const Polynomial p = random_polynomial(2, deg, 30 + deg);
    const double l2 = lp_norm(D, p, 2.0, domain_rule(D, 2 * deg));
    CHECK(l2 * l2 == doctest::Approx(l2_norm_squared_gram(p, mom)).epsilon(1e-9));
  }
}

TEST_CASE("sup_norm finds boundary maxima") {
  const Domain D = unit_disk();
  // x + y peaks at sqrt(2) on the boundary
  const Field f = [](const Vec2& x) { return x.x() + x.y(); };
  CHECK(sup_norm(D, f, domain_rule(D, 4)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("patch_rule") {
  const double b = 0.3, L = 2.0;
  SUBCASE("constant g, f = 1") {
    const GraphPatch g =
        GraphPatch::standalone([=](double) { return std::array<double, 3>{4 * L * b, 0.0, 0.0}; }, b, L);
    const QuadratureRule r = patch_rule(g, 4, 4);
    CHECK(r.total_weight() == doctest::Approx(2 * b * L * b).epsilon(1e-14));
  }
  SUBCASE("linear g, f = y") {
    const double c = 4 * L * b + 2 * b, s = 0.5;
    const GraphPatch g =
        GraphPatch::standalone([=](double x) { return std::array<double, 3>{c + s * x, s, 0.0}; }, b, L);
    const QuadratureRule r = patch_rule(g, 4, 4);
    // int_{-b}^{b} int_{g - Lb}^{g} y dy dx = int (g Lb - (Lb)^2 / 2) dx = 2b (c Lb - (Lb)^2 / 2)
    const double want = 2 * b * (c * L * b - 0.5 * L * b * L * b);
    CHECK(integrate(r, Polynomial::coordinate(2, 1)) == doctest::Approx(want).epsilon(1e-13));
  }
  SUBCASE("transcendental g converges with base order") {
    const GraphPatch g = GraphPatch::standalone(
        [=](double x) {
          return std::array<double, 3>{4 * L * b + 1 + std::sin(5 * x), 5 * std::cos(5 * x), -25 * std::sin(5 * x)};
        },
        b, L);
    // f = xy: only the odd part of g survives, Lb int x sin(5x) dx
    const double want = L * b * 2 * (-b * std::cos(5 * b) / 5 + std::sin(5 * b) / 25);
    const Polynomial xy = Polynomial::monomial(2, {1, 1, 0});
    const double first = std::abs(integrate(patch_rule(g, 2, 3), xy) - want);
    const double last = std::abs(integrate(patch_rule(g, 8, 3), xy) - want);
    CHECK(first > 1e-6);
    CHECK(last < 1e-10);
  }
}

TEST_CASE("patch_rule on a curved graph matches iterated Gauss") {
  // upper disk arc, stopped short of the vertical tangent
  const double b = 0.999;
  const double L = 1.0 / b;
  const GraphPatch upper = GraphPatch::standalone(
      [](double x) {
        const double s = std::sqrt(1 - x * x);
        return std::array<double, 3>{s, -x / s, -1 / (s * s * s)};
      },
      b, L);
  const QuadratureRule r = patch_rule(upper, 200, 8);
  // region {|x| < b, sqrt(1 - x^2) - 1 < y < sqrt(1 - x^2)}
  const auto& gx = gauss_legendre(200);
  const auto& gy = gauss_legendre(8);
  double want = 0;
  for (std::size_t i = 0; i < gx.x.size(); ++i) {
    const double x = b * gx.x[i];
    const double top = std::sqrt(1 - x * x);
    for (std::size_t j = 0; j < gy.x.size(); ++j) {
      const double y = top - 0.5 * (1 + gy.x[j]);
      want += b * gx.w[i] * 0.5 * gy.w[j] * x * x * (1 + y * y);
    }
  }
  const Polynomial f = Polynomial::monomial(2, {2, 0, 0}) + Polynomial::monomial(2, {2, 2, 0});
  CHECK(integrate(r, f) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("orthonormal basis") {
  for (const Domain& D : {unit_disk(), Domain::ellipse(2.0, 1.0)}) {
    for (int n : {0, 3, 8}) {
      const OrthonormalBasis B = orthonormal_basis(D, n);
      CHECK(B.size() == monomial_count(2, n));
      CHECK(B.gram_error <= 1e-10);
      const QuadratureRule r = domain_rule(D, 2 * n + 2);
      // independent Gram check through the polynomial form
      for (std::size_t i = 0; i < B.size(); i += 3)
        for (std::size_t j = i; j < B.size(); j += 2) {
          const double g = integrate(r, B.poly(i) * B.poly(j));
          CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) <= 1e-9);
        }
      const Vec2 x(0.2, -0.3);
      const Eigen::VectorXd v = B.eval(x);
      for (std::size_t k = 0; k < B.size(); k += 4) CHECK(B.poly(k)(x.x(), x.y()) == doctest::Approx(v(k)).epsilon(1e-9));
    }
  }
}
