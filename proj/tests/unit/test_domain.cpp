#include <doctest.h>

#include <cmath>
#include <random>

#include "c2poly/domain.hpp"
#include "c2poly/patch.hpp"
#include "c2poly/random.hpp"

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

Vec2 random_point(const Domain& dom, std::mt19937_64& rng) {
  const Box b = dom.bbox();
  std::uniform_real_distribution<double> ux(b.lo.x(), b.hi.x()), uy(b.lo.y(), b.hi.y());
  for (;;) {
    const Vec2 p(ux(rng), uy(rng));
    if (dom.contains(p)) return p;
  }
}

GraphPatch flat_patch(double level, double base, double L) {
  return GraphPatch::standalone([level](double) { return std::array<double, 3>{level, 0.0, 0.0}; }, base, L);
}

}  // namespace

TEST_CASE("dist_to_boundary on the disk") {
  const Domain D = unit_disk();
  const Projection p = dist_to_boundary(D, Vec2(0.5, 0.0));
  CHECK(p.distance == doctest::Approx(0.5).epsilon(1e-12));
  CHECK((p.foot.position - Vec2(1, 0)).norm() < 1e-12);
  CHECK((p.foot.normal - Vec2(1, 0)).norm() < 1e-12);
  CHECK(std::abs(p.foot.normal.dot(p.foot.tangent)) < 1e-12);

  const Projection c1 = dist_to_boundary(D, Vec2(0, 0));
  const Projection c2 = dist_to_boundary(D, Vec2(0, 0));
  CHECK(c1.distance == doctest::Approx(1.0));
  CHECK(c1.foot.position == c2.foot.position);
  // tie-break: smallest boundary parameter
  CHECK(c1.foot.param <= 1e-12);

  CHECK_THROWS_AS(dist_to_boundary(D, Vec2(1.5, 0)), DomainError);
}

TEST_CASE("implicit disk agrees with the analytic disk") {
  const Domain A = unit_disk(), I = implicit_disk();
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vec2 x = random_point(A, rng);
    if (!I.contains(x)) continue;
    const Projection pa = dist_to_boundary(A, x), pi = dist_to_boundary(I, x);
    worst = std::max(worst, std::abs(pa.distance - pi.distance));
    if (x.norm() > 1e-3) CHECK((pa.foot.position - pi.foot.position).norm() < 1e-8);
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("projection foot properties") {
  for (const Domain& D : {unit_disk(), Domain::ellipse(2.0, 1.0), implicit_disk()}) {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 200; ++k) {
      const Vec2 x = random_point(D, rng);
      const Projection p = dist_to_boundary(D, x);
      CHECK(std::abs(p.distance - (x - p.foot.position).norm()) < 1e-10);
      CHECK(std::abs(p.foot.normal.norm() - 1.0) < 1e-12);
      const Vec2 d = p.foot.position - x;
      if (d.norm() > 1e-6) {
        const double cross = d.x() * p.foot.normal.y() - d.y() * p.foot.normal.x();
        CHECK(std::abs(cross) / d.norm() < 1e-8);
      }
    }
  }
}

TEST_CASE("ellipse distance against a dense boundary scan") {
  const Domain E = Domain::ellipse(2.0, 1.0);
  std::mt19937_64 rng(21);
  for (int k = 0; k < 50; ++k) {
    const Vec2 x = random_point(E, rng);
    // dense scan, then golden-section refinement around the best sample
    const int m = 20000;
    int kb = 0;
    double best = INFINITY;
    auto d = [&](double th) { return (Vec2(2 * std::cos(th), std::sin(th)) - x).norm(); };
    for (int i = 0; i < m; ++i) {
      const double v = d(2 * kPi * i / m);
      if (v < best) best = v, kb = i;
    }
    double lo = 2 * kPi * (kb - 1) / m, hi = 2 * kPi * (kb + 1) / m;
    const double gr = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 100; ++it) {
      const double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
      if (d(a) < d(b)) hi = b;
      else lo = a;
    }
    best = std::min(best, d(0.5 * (lo + hi)));
    CHECK(E.dist(x) <= best + 1e-12);
    CHECK(E.dist(x) >= best - 1e-12);
  }
}

TEST_CASE("rho_omega examples") {
  const Domain D = unit_disk();
  CHECK(rho_omega(D, Vec2(0.3, 0.2), Vec2(0.3, 0.2)) == 0.0);
  CHECK(rho_omega(D, Vec2(0.5, 0), Vec2(0.9, 0)) ==
        doctest::Approx(0.4 + std::sqrt(0.5) - std::sqrt(0.1)).epsilon(1e-12));
  CHECK(rho_omega(D, Vec2(0.5, 0), Vec2(0.9, 0)) == doctest::Approx(0.79088).epsilon(1e-5));
  CHECK(rho_omega(D, Vec2(0, 0), Vec2(0.5, 0)) == doctest::Approx(0.79289).epsilon(1e-5));
  CHECK_THROWS(rho_omega(D, Vec2(2, 0), Vec2(0, 0)));
}

TEST_CASE("rho_hat examples") {
  const double b = 0.5, L = 1.0, top = 4 * L * b;
  const GraphPatch g = flat_patch(top, b, L);
  CHECK(rho_hat(g, Vec2(0.1, top - 0.1), Vec2(0.1, top - 0.1)) == 0.0);
  CHECK(rho_hat(g, Vec2(0, top), Vec2(0, top - 0.25)) == doctest::Approx(0.5));
  CHECK(rho_hat(g, Vec2(-0.2, top - 0.3), Vec2(0.1, top - 0.3)) == doctest::Approx(0.3));
}

TEST_CASE("metric axioms on random triples") {
  const Domain D = Domain::ellipse(1.5, 1.0);
  std::mt19937_64 rng(99);
  for (int k = 0; k < 1000; ++k) {
    const Vec2 a = random_point(D, rng), b = random_point(D, rng), c = random_point(D, rng);
    const double ab = rho_omega(D, a, b), ba = rho_omega(D, b, a), bc = rho_omega(D, b, c),
                 ac = rho_omega(D, a, c);
    CHECK(std::abs(ab - ba) <= 1e-12);
    CHECK(ab > 0);
    CHECK(ac <= ab + bc + 1e-9);
  }
  const auto patches = decompose_boundary(unit_disk(), 0.2);
  const GraphPatch& g = patches.front();
  for (int k = 0; k < 1000; ++k) {
    const Vec2 a = sample_patch_point(g, uniform01(rng), uniform01(rng));
    const Vec2 b = sample_patch_point(g, uniform01(rng), uniform01(rng));
    const Vec2 c = sample_patch_point(g, uniform01(rng), uniform01(rng));
    CHECK(std::abs(rho_hat(g, a, b) - rho_hat(g, b, a)) <= 1e-12);
    CHECK(rho_hat(g, a, c) <= rho_hat(g, a, b) + rho_hat(g, b, c) + 1e-9);
    CHECK(rho_hat(g, a, a) == 0.0);
  }
}

TEST_CASE("phi_n_gamma") {
  const Domain D = unit_disk();
  CHECK(phi_n_gamma(D, Vec2(0, 0), 4) == doctest::Approx(1.25));
  CHECK(phi_n_gamma(D, Vec2(1, 0), 10) == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(phi_n_gamma(D, Vec2(0.3, 0.4), 2) > phi_n_gamma(D, Vec2(0.3, 0.4), 8));
}

TEST_CASE("ball_volume_mc") {
  const Domain D = unit_disk();
  const VolumeEstimate all = ball_volume_mc(D, Vec2(0.2, 0.1), 10.0, 20000, 5);
  CHECK(std::abs(all.estimate - kPi) <= 3 * all.stderr_ + 1e-12);
  const VolumeEstimate again = ball_volume_mc(D, Vec2(0.2, 0.1), 0.3, 20000, 5);
  CHECK(again.estimate == ball_volume_mc(D, Vec2(0.2, 0.1), 0.3, 20000, 5).estimate);

  double lo = INFINITY, hi = 0.0;
  for (double r : {0.0, 0.5, 0.9, 0.99, 1.0})
    for (double t : {0.05, 0.1, 0.2, 0.4}) {
      const Vec2 xi(r, 0.0);
      const VolumeEstimate v1 = ball_volume_mc(D, xi, t, 20000, 11);
      const VolumeEstimate v2 = ball_volume_mc(D, xi, 2 * t, 20000, 12);
      CHECK(v2.estimate / v1.estimate <= 8.0 * 1.5);
      lo = std::min(lo, v1.estimate / v1.comparator);
      hi = std::max(hi, v1.estimate / v1.comparator);
    }
  CHECK(lo > 0);
  CHECK(hi / lo <= 10.0);
}

TEST_CASE("decompose_boundary") {
  SUBCASE("unit disk") {
    const Domain D = unit_disk();
    const auto patches = decompose_boundary(D, 0.2);
    CHECK(!patches.empty());
    CHECK(boundary_cover_check(D, patches, 0.5, 10000).pass);
    for (const auto& g : patches) {
      CHECK(g.normalized());
      CHECK(g.satisfies_parameter_bound());
      CHECK(g.base() <= 0.2);
    }
    CHECK(attachment_check(D, patches.front()).pass);
    CHECK(patch_dist_bounds_check(patches.front(), 1000, 3).pass);
    const RatioReport rr = metric_equivalence_report(D, patches.front(), 2000, 4);
    CHECK(rr.min_ratio > 0);
    CHECK(std::isfinite(rr.max_ratio));
    CHECK(rr.max_ratio / rr.min_ratio <= 25.0);
  }
  SUBCASE("ellipse axes follow the dominant normal component") {
    const Domain E = Domain::ellipse(2.0, 1.0);
    const auto patches = decompose_boundary(E, 0.1);
    CHECK(boundary_cover_check(E, patches, 0.5, 4000).pass);
    int checked = 0;
    for (const auto& g : patches) {
      CHECK(g.normalized());
      const Vec2 foot = g.to_global(0.0, g.g(0.0));
      const Vec2 n = E.normal_at(foot);
      if (std::abs(std::abs(n.x()) - std::abs(n.y())) > 0.2) {
        CHECK(g.axis() == (std::abs(n.x()) > std::abs(n.y()) ? 0 : 1));
        ++checked;
      }
    }
    CHECK(checked > 0);
    bool both = false;
    for (const auto& g : patches) both |= g.axis() != patches.front().axis();
    CHECK(both);
  }
}

TEST_CASE("patch distance bounds on synthetic graphs") {
  const GraphPatch flat = flat_patch(2.0, 0.5, 1.0);
  CHECK(patch_dist_bounds_check(flat, 500, 1).pass);
  CHECK(flat.dist_to_graph(0.1, 1.8) == doctest::Approx(0.2).epsilon(1e-10));
  // |g'| = 2: c* = 1 / (3 sqrt 5)
  const double b = 0.25, L = 12.0;
  const GraphPatch steep = GraphPatch::standalone(
      [=](double x) { return std::array<double, 3>{4 * L * b + 4 * b + 2 * x, 2.0, 0.0}; }, b, L);
  const DistBoundsReport r = patch_dist_bounds_check(steep, 1000, 2);
  CHECK(r.pass);
  CHECK(r.c_star == doctest::Approx(1.0 / (3.0 * std::sqrt(5.0))));
}

TEST_CASE("rolling_ball_check") {
  CHECK(rolling_ball_check(unit_disk(), 0.5, 200, 200, 1).pass);
  const RollingBallReport bad = rolling_ball_check(unit_disk(), 1.2, 200, 200, 1);
  CHECK(!bad.pass);
  CHECK(bad.witness.has_value());
  CHECK(rolling_ball_check(Domain::ellipse(2.0, 1.0), 0.4, 400, 200, 1).pass);
}
