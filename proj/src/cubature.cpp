#include "c2poly/cubature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "c2poly/format.hpp"
#include "c2poly/nnls.hpp"
#include "c2poly/parallel.hpp"
#include "c2poly/random.hpp"
#include "c2poly/simplex.hpp"

namespace c2poly {

namespace {

void fill_residuals(const Domain& dom, const MomentSystem& sys, CubatureRule& rule) {
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(),
                                            static_cast<Eigen::Index>(rule.weights.size()));
  const Eigen::VectorXd r = sys.V * w - sys.m;
  double res = 0.0;
  for (Eigen::Index k = 0; k < r.size(); ++k)
    res = std::max(res, std::abs(r[k]) / std::max(1.0, std::abs(sys.m[k])));
  rule.residual = res;

  const std::vector<double> mom = moments(dom, rule.degree);
  const auto ex = monomial_exponents(2, rule.degree);
  double scale = 1.0, worst = 0.0;
  for (std::size_t a = 0; a < ex.size(); ++a) {
    double s = 0.0, c = 0.0;  // Neumaier
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double v = rule.weights[j] * std::pow(rule.nodes[j].x(), ex[a][0]) *
                       std::pow(rule.nodes[j].y(), ex[a][1]);
      const double t = s + v;
      c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
      s = t;
    }
    worst = std::max(worst, std::abs(s + c - mom[a]));
    scale = std::max(scale, std::abs(mom[a]));
  }
  rule.monomial_residual = worst / scale;
}

}  // namespace

MomentSystem moment_system(const Domain& dom, const std::vector<Vec2>& nodes, int n) {
  if (nodes.empty()) throw DomainError("no cubature nodes");
  MomentSystem sys;
  sys.basis = orthonormal_basis(dom, n);
  const Eigen::Index K = static_cast<Eigen::Index>(sys.basis.size());
  sys.V.resize(K, static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t j = 0; j < nodes.size(); ++j)
    sys.V.col(static_cast<Eigen::Index>(j)) = sys.basis.eval(nodes[j]);
  sys.m = sys.basis.integrals;
  return sys;
}

CubatureRule nnls_weights(const Domain& dom, const std::vector<Vec2>& nodes, int n, double tol) {
  const MomentSystem sys = moment_system(dom, nodes, n);
  const NnlsResult r = nnls(sys.V, sys.m);
  CubatureRule rule;
  rule.nodes = nodes;
  rule.weights.assign(r.x.data(), r.x.data() + r.x.size());
  rule.degree = n;
  rule.method = "nnls";
  fill_residuals(dom, sys, rule);
  if (!r.converged || rule.residual > tol) {
    std::ostringstream msg;
    msg << "nnls_weights: relative residual " << fmt17(rule.residual) << " above " << tol
        << " (nodes insufficient for degree " << n << ")";
    throw NumericalError(msg.str());
  }
  return rule;
}

CubatureRule lp_maxmin_weights(const Domain& dom, const std::vector<Vec2>& nodes,
                               const std::vector<double>& measures, int n,
                               const MaxMinOptions& opt) {
  if (measures.size() != nodes.size()) throw DomainError("one measure per node required");
  bool any = false;
  for (double m : measures) {
    if (!(m >= 0)) throw DomainError("measures must be nonnegative");
    any = any || m > 0;
  }
  if (!any) throw DomainError("all measures are zero");
  if (!opt.volumes.empty() && opt.volumes.size() != nodes.size())
    throw DomainError("one ball volume per node required");
  const MomentSystem sys = moment_system(dom, nodes, n);
  const Eigen::Index K = sys.V.rows(), N = sys.V.cols();
  const Eigen::Map<const Eigen::VectorXd> R(measures.data(), N);

  // lambda = mu + t R with mu >= 0
  Eigen::MatrixXd A(K, N + 1);
  A.leftCols(N) = sys.V;
  A.col(N) = sys.V * R;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(N + 1);
  c[N] = 1.0;
  const LpResult lp = simplex_maximize(A, sys.m, c, opt.tol);
  if (lp.status != LpStatus::Optimal) {
    std::ostringstream msg;
    msg << "lp_maxmin_weights: " << to_string(lp.status);
    if (lp.status == LpStatus::Infeasible) msg << ", phase-1 residual " << fmt17(lp.phase1_residual);
    throw NumericalError(msg.str());
  }
  const double t1 = lp.x[N];
  Eigen::VectorXd w = lp.x.head(N) + t1 * R;

  if (!opt.volumes.empty()) {
    // Charnes-Cooper: y = w / kappa with kappa = min_j w_j / U_j, v = 1 / kappa,
    // shifted as y = U + a. Variables a (N), v, s, surplus b (N), slack c (N).
    const Eigen::Map<const Eigen::VectorXd> U(opt.volumes.data(), N);
    for (Eigen::Index j = 0; j < N; ++j)
      if (!(U[j] > 0)) throw DomainError("ball volumes must be positive");
    const double fl = std::min(opt.floor, t1 * (1.0 - opt.slack));
    const Eigen::Index iv = N, is = N + 1, ib = N + 2, ic = 2 * N + 2, nv = 3 * N + 2;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(K + 2 * N, nv);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K + 2 * N);
    B.topLeftCorner(K, N) = sys.V;
    B.block(0, iv, K, 1) = -sys.m;
    rhs.head(K) = -sys.V * U;
    for (Eigen::Index j = 0; j < N; ++j) {
      B(K + j, j) = 1.0;  // U_j + a_j >= floor R_j v
      B(K + j, iv) = -fl * R[j];
      B(K + j, ib + j) = -1.0;
      rhs[K + j] = -U[j];
      B(K + N + j, j) = 1.0;  // U_j + a_j <= s U_j
      B(K + N + j, is) = -U[j];
      B(K + N + j, ic + j) = 1.0;
      rhs[K + N + j] = -U[j];
    }
    Eigen::VectorXd cc = Eigen::VectorXd::Zero(nv);
    cc[is] = -1.0;
    const LpResult lp2 = simplex_maximize(B, rhs, cc, opt.tol);
    if (lp2.status == LpStatus::Optimal && lp2.x[iv] > 0) {
      const Eigen::VectorXd w2 = (U + lp2.x.head(N)) / lp2.x[iv];
      CubatureRule probe;
      probe.nodes = nodes;
      probe.degree = n;
      probe.weights.assign(w2.data(), w2.data() + N);
      fill_residuals(dom, sys, probe);
      if (probe.residual <= opt.residual_tol) w = w2;
    }
  }

  CubatureRule rule;
  rule.nodes = nodes;
  rule.measures = measures;
  rule.degree = n;
  rule.method = opt.volumes.empty() ? "lp_maxmin" : "lp_maxmin_balanced";
  rule.weights.assign(w.data(), w.data() + N);
  for (double& v : rule.weights) v = std::max(v, 0.0);
  double ts = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < N; ++j)
    if (R[j] > 0) ts = std::min(ts, rule.weights[j] / R[j]);
  rule.t_star = ts;
  rule.t_opt = t1;
  fill_residuals(dom, sys, rule);
  if (rule.residual > opt.residual_tol) {
    std::ostringstream msg;
    msg << "lp_maxmin_weights: relative residual " << fmt17(rule.residual) << " above "
        << opt.residual_tol;
    throw NumericalError(msg.str());
  }
  return rule;
}

CubatureRule lp_maxmin_weights(const Domain& dom, const Partition& part, int n,
                               const MaxMinOptions& opt) {
  return lp_maxmin_weights(dom, part.reps(), part.measures, n, opt);
}

std::vector<double> unit_ball_volumes(const Domain& dom, const std::vector<Vec2>& nodes, int n,
                                      std::size_t samples, std::uint64_t seed) {
  if (n < 1) throw DomainError("unit_ball_volumes needs n >= 1");
  std::vector<double> out(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t j) {
    out[j] = ball_volume_mc(dom, nodes[j], 1.0 / n, samples, stream_seed(seed, j, 0x7576ULL)).estimate;
  });
  return out;
}

RuleVerification verify_rule(const CubatureRule& rule, const Domain& dom, std::size_t trials,
                             std::uint64_t seed, const std::vector<double>& ball_volumes) {
  const int n = rule.degree;
  RuleVerification rep;
  rep.trials = trials;
  auto rel_error = [&](const Polynomial& f, const QuadratureRule& q) {
    double s = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j)
      s += rule.weights[j] * f(rule.nodes[j].x(), rule.nodes[j].y());
    const double exact = integrate(q, f);
    const double l1 = integrate(q, Field([&f](const Vec2& x) { return std::abs(f(x.x(), x.y())); }));
    return std::abs(s - exact) / std::max(1.0, l1);
  };
  const QuadratureRule q = domain_rule(dom, 2 * n + 22);
  const OrthonormalBasis bn = orthonormal_basis(dom, n);
  const OrthonormalBasis bn1 = orthonormal_basis(dom, n + 1);
  for (std::size_t t = 0; t < trials; ++t) {
    rep.max_rel_error = std::max(
        rep.max_rel_error, rel_error(random_orthonormal_polynomial(bn, stream_seed(seed, t, 1)), q));
    rep.higher_degree_error = std::max(
        rep.higher_degree_error,
        rel_error(random_orthonormal_polynomial(bn1, stream_seed(seed, t, 2)), q));
  }
  if (!ball_volumes.empty()) {
    if (ball_volumes.size() != rule.nodes.size()) throw DomainError("one ball volume per node required");
    rep.upper_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double r = rule.weights[j] / ball_volumes[j];
      rep.upper_min = std::min(rep.upper_min, r);
      rep.upper_max = std::max(rep.upper_max, r);
    }
    rep.upper_spread = rep.upper_min > 0 ? rep.upper_max / rep.upper_min
                                         : std::numeric_limits<double>::infinity();
  }
  if (rule.measures.size() == rule.nodes.size()) {
    rep.lower_checked = true;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      if (rule.weights[j] >= 0.25 * rule.measures[j])
        ++rep.lower_pass;
      else
        ++rep.lower_fail;
    }
  }
  return rep;
}

TFunctionalReport t_functional_report(const CubatureRule& rule, const Domain& dom,
                                      std::size_t trials, std::uint64_t seed) {
  if (rule.measures.size() != rule.nodes.size())
    throw DomainError("t_functional_report needs cell measures");
  const double area = dom.area();
  TFunctionalReport rep;
  const std::size_t N = rule.nodes.size();
  rep.coeffs.resize(N);
  double sum = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    rep.coeffs[j] = (4.0 * rule.weights[j] - rule.measures[j]) / (3.0 * area);
    sum += rep.coeffs[j];
  }
  rep.coeff_sum = sum;
  rep.min_coeff = *std::min_element(rep.coeffs.begin(), rep.coeffs.end());
  rep.convex = rep.min_coeff >= 0.0 && std::abs(sum - 1.0) <= 1e-8;

  const QuadratureRule q = domain_rule(dom, rule.degree);
  const OrthonormalBasis b = orthonormal_basis(dom, rule.degree);
  for (std::size_t t = 0; t < trials; ++t) {
    const Polynomial f = random_orthonormal_polynomial(b, stream_seed(seed, t, 3));
    double cell_sum = 0.0, comb = 0.0, fmax = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double v = f(rule.nodes[j].x(), rule.nodes[j].y());
      cell_sum += v * rule.measures[j];
      comb += rep.coeffs[j] * v;
      fmax = std::max(fmax, std::abs(v));
    }
    const double T = (4.0 / 3.0) * integrate(q, f) / area - cell_sum / (3.0 * area);
    rep.max_identity_error = std::max(rep.max_identity_error, std::abs(T - comb) / std::max(1.0, fmax));
  }
  return rep;
}

void write_rule_csv(std::ostream& os, const CubatureRule& rule) {
  os << "index,x,y,weight,measure\n";
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    os << j << ',' << fmt17(rule.nodes[j].x()) << ',' << fmt17(rule.nodes[j].y()) << ','
       << fmt17(rule.weights[j]) << ','
       << (j < rule.measures.size() ? fmt17(rule.measures[j]) : std::string("")) << '\n';
  }
}

}  // namespace c2poly
