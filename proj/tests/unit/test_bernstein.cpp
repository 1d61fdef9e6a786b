#include <doctest.h>

#include <cmath>
#include <random>

#include "c2poly/bernstein.hpp"

using namespace c2poly;

namespace {

Domain unit_disk() { return Domain::disk(Vec2(0, 0), 1.0); }

MaximalDerivativeSpec spec(int r, int j, int l) {
  MaximalDerivativeSpec s;
  s.r = r;
  s.j = j;
  s.l = l;
  return s;
}

}  // namespace

TEST_CASE("maximal_derivative") {
  const Domain D = unit_disk();
  CHECK(MaximalDerivative(D, spec(0, 0, 0)).mu() == doctest::Approx(std::sqrt(2.0) + 1));
  const Polynomial c = Polynomial::constant(2, 7.0);
  CHECK(maximal_derivative(D, spec(1, 0, 0), c, Vec2(0.2, 0.1), 4) == 0.0);
  CHECK(maximal_derivative(D, spec(0, 1, 1), c, Vec2(0.9, 0.0), 4) == 0.0);

  // f = x: the normal derivative at eta = (1, 0) is 1
  const Polynomial x = Polynomial::coordinate(2, 0);
  CHECK(maximal_derivative(D, spec(0, 0, 1), x, Vec2(1 - 1e-3, 0), 8) >= 1.0 - 1e-12);
  CHECK(maximal_derivative(D, spec(0, 0, 1), x, Vec2(1 - 1e-3, 0), 8) <= 1.0 + 1e-12);
  // and the tangential one vanishes there but not nearby
  CHECK(maximal_derivative(D, spec(1, 0, 0), x, Vec2(1 - 1e-3, 0), 8) > 0.0);

  // a denser scan never finds less
  const Polynomial f = random_polynomial(2, 6, 3);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (int k = 0; k < 30; ++k) {
    const Vec2 xi(u(rng), u(rng));
    for (const auto& s0 : {spec(1, 0, 0), spec(2, 1, 0), spec(0, 0, 2)}) {
      MaximalDerivativeSpec lo = s0, hi = s0;
      lo.density = 8;
      hi.density = 64;
      const double a = maximal_derivative(D, lo, f, xi, 6), b = maximal_derivative(D, hi, f, xi, 6);
      CHECK(b >= a);
      CHECK(MaximalDerivative(D, hi).samples_for(xi, 6) >= MaximalDerivative(D, lo).samples_for(xi, 6));
    }
  }
}

TEST_CASE("bernstein_functional") {
  const Domain D = unit_disk();
  CHECK(bernstein_functional(D, spec(1, 0, 0), Polynomial::constant(2, 2.0), 4, 2.0).ratio == 0.0);

  // |d_tau x| <= 1 pointwise
  const Polynomial x = Polynomial::coordinate(2, 0);
  const BernsteinValue v2 = bernstein_functional(D, spec(1, 0, 0), x, 16, 2.0);
  CHECK(v2.ratio > 0);
  CHECK(v2.ratio <= std::sqrt(kPi) / (std::sqrt(kPi) / 2) + 1e-9);
  CHECK(bernstein_functional(D, spec(1, 0, 0), x, 16, INFINITY).ratio <= 1.0 + 1e-9);

  const Polynomial f = random_polynomial(2, 5, 8);
  for (double p : {1.0, 2.0, static_cast<double>(INFINITY)}) {
    const double a = bernstein_functional(D, spec(1, 1, 0), f, 5, p).ratio;
    const double b = bernstein_functional(D, spec(1, 1, 0), f * -40.0, 5, p).ratio;
    CHECK(b == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("growth_exponent") {
  const Domain D = unit_disk();
  const std::vector<int> grid{2, 4, 8, 16};
  SUBCASE("constant family is degenerate") {
    const auto fam = [](int, std::size_t) { return Polynomial::constant(2, 1.0); };
    const GrowthFit g = growth_exponent(D, spec(1, 0, 0), fam, 2.0, grid);
    CHECK(g.degenerate);
  }
  SUBCASE("random families on the disk") {
    const auto fam = random_family(D, 2024);
    for (double p : {2.0, static_cast<double>(INFINITY)}) {
      CAPTURE(p);
      const GrowthFit t = growth_exponent(D, spec(1, 0, 0), fam, p, grid, 2);
      CHECK(!t.degenerate);
      CHECK(t.n_used.size() == 4);
      CHECK(t.slope <= 1.3);
      CHECK(t.slope > 0.5);
      const GrowthFit nrm = growth_exponent(D, spec(0, 0, 1), fam, p, grid, 2);
      CHECK(nrm.slope <= 2.3);
      CHECK(nrm.slope > 0.5);
    }
  }
  SUBCASE("degrees below the order are skipped") {
    const GrowthFit g = growth_exponent(D, spec(2, 0, 1), random_family(D, 1), 2.0, grid);
    CHECK(g.n_skipped == std::vector<int>{2});
    CHECK(g.n_used == std::vector<int>{4, 8, 16});
  }
}

TEST_CASE("patch_bernstein_check") {
  const double b = 0.25, L = 2.0, c = 4 * L * b;
  const GraphPatch flat = GraphPatch::quadratic(c, 0.0, 0.0, b, L);
  SUBCASE("r = i = j = 0 is norm monotonicity") {
    for (int k = 0; k < 5; ++k) {
      const Polynomial f = random_polynomial(2, 4, 60 + k);
      for (double p : {1.0, 2.0, static_cast<double>(INFINITY)})
        CHECK(patch_bernstein_check(flat, f, 0, 0, 0, p, 1.5, 4).ratio <= 1.0 + 1e-12);
    }
    const Polynomial f = random_polynomial(2, 4, 70);
    CHECK(patch_bernstein_check(flat, f, 0, 0, 0, 2.0, 1.0, 4).ratio == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("f = y, j = 1") {
    const double lam = 1.5;
    const double area = 2 * b * L * b;
    const double lo = c - lam * L * b;
    const double ny2 = 2 * lam * b * (c * c * c - lo * lo * lo) / 3;
    const PatchBernstein pb = patch_bernstein_check(flat, Polynomial::coordinate(2, 1), 0, 0, 1, 2.0, lam, 4);
    CHECK(pb.functional == doctest::Approx(std::sqrt(area)).epsilon(1e-12));
    CHECK(pb.ratio == doctest::Approx(std::sqrt(area / ny2)).epsilon(1e-12));
  }
  SUBCASE("patch growth on a disk patch") {
    // tiny patches make single-trial ratios noisy at n = 2, so average many
    const auto patches = decompose_boundary(unit_disk(), 0.2);
    const auto fam = random_family(unit_disk(), 5);
    const GrowthFit g = patch_growth_exponent(patches.front(), fam, 1, 0, 0, 2.0, 1.5, {2, 4, 8, 16}, 32);
    CHECK(!g.degenerate);
    CHECK(g.slope <= 1.3);
  }
}

TEST_CASE("tangential_frame_check") {
  const auto flat = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
  const Polynomial f = random_polynomial(3, 4, 12);
  const std::array<double, 3> xi{0.2, -0.1, 0.4};
  SUBCASE("alpha = (1, 0), constant g") {
    const FrameCheck fc = tangential_frame_check(flat, f, {1, 0}, xi);
    CHECK(fc.direct == doctest::Approx(f.partial(0)(std::span<const double>(xi))).epsilon(1e-12));
    CHECK(fc.difference <= 1e-9);
  }
  SUBCASE("alpha = (1, 1), f = x1 x2") {
    const FrameCheck fc = tangential_frame_check(flat, Polynomial::monomial(3, {1, 1, 0}), {1, 1}, xi);
    CHECK(fc.direct == doctest::Approx(1.0));
    CHECK(fc.kemperman == doctest::Approx(1.0));
    CHECK(fc.terms == 4);
  }
  SUBCASE("random f, curved g") {
    const auto grad = [](double a, double b) {
      return std::array<double, 2>{0.3 * std::cos(a) + 0.2 * b, 0.2 * a - 0.5 * b};
    };
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int k = 0; k < 20; ++k) {
      const Polynomial h = random_polynomial(3, 4, 300 + k);
      const std::array<int, 2> alpha{k % 3, (k / 3) % 3};
      if (alpha[0] + alpha[1] == 0) continue;
      const FrameCheck fc = tangential_frame_check(grad, h, alpha, {u(rng), u(rng), u(rng)});
      CHECK(fc.difference <= 1e-9 * std::max(1.0, std::abs(fc.direct)));
      CHECK(fc.terms <= (1u << (alpha[0] + alpha[1])));
    }
  }
  CHECK_THROWS_AS(tangential_frame_check(flat, f, {3, 2}, xi), DomainError);
}

TEST_CASE("noncommutativity witness") {
  const Polynomial y = Polynomial::coordinate(2, 1);
  const GraphPatch curved = GraphPatch::quadratic(2.0, 0.1, 0.8, 0.25, 2.0);
  const NoncommutativityReport w = noncommutativity_witness(curved, y, 50, 3);
  CHECK(w.witness);
  // the two operators differ by g'' d_2 f = 0.8
  CHECK(w.max_difference == doctest::Approx(0.8).epsilon(1e-9));

  const GraphPatch linear = GraphPatch::quadratic(2.0, 0.3, 0.0, 0.25, 2.0);
  CHECK(!noncommutativity_witness(linear, random_polynomial(2, 4, 1), 50, 3).witness);
}
