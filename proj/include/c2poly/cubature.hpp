#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "c2poly/domain.hpp"
#include "c2poly/net.hpp"
#include "c2poly/quadrature.hpp"

namespace c2poly {

// Orthonormal-basis moment system: V(k, j) = q_k(xi_j), m_k = int q_k.
struct MomentSystem {
  OrthonormalBasis basis;
  Eigen::MatrixXd V;
  Eigen::VectorXd m;
};
MomentSystem moment_system(const Domain& dom, const std::vector<Vec2>& nodes, int n);

struct CubatureRule {
  std::vector<Vec2> nodes;
  std::vector<double> weights;
  std::vector<double> measures;  // |R_j| when built from a partition
  int degree = 0;
  double residual = 0.0;           // max_k |sum_j w_j q_k(xi_j) - int q_k| / max(1, |int q_k|)
  double monomial_residual = 0.0;  // max_a |sum_j w_j xi_j^a - int x^a| / max_a max(1, |int x^a|)
  std::optional<double> t_star;    // min_j w_j / |R_j| of the returned weights
  std::optional<double> t_opt;     // optimum of the max-min program
  std::string method;
};

// Nonnegative least squares on the moment system. Throws NumericalError if
// the relative residual exceeds tol.
CubatureRule nnls_weights(const Domain& dom, const std::vector<Vec2>& nodes, int n,
                          double tol = 1e-9);

struct MaxMinOptions {
  double tol = 1e-10;
  // Balancing pass when volumes are given: among exact rules with
  // w_j >= floor |R_j| (floor capped by the optimal t), minimise the spread
  // max_j (w_j / volumes_j) / min_j (w_j / volumes_j).
  std::vector<double> volumes;
  double floor = 0.25;
  double slack = 1e-9;
  double residual_tol = 1e-9;
};
// maximize t s.t. exact moments and w_j >= t |R_j|. Throws NumericalError when
// infeasible (message carries the phase-1 residual) or on the iteration cap.
CubatureRule lp_maxmin_weights(const Domain& dom, const std::vector<Vec2>& nodes,
                               const std::vector<double>& measures, int n,
                               const MaxMinOptions& opt = {});
CubatureRule lp_maxmin_weights(const Domain& dom, const Partition& part, int n,
                               const MaxMinOptions& opt = {});

// Monte Carlo |U(xi_j, 1/n)| for every node.
std::vector<double> unit_ball_volumes(const Domain& dom, const std::vector<Vec2>& nodes, int n,
                                      std::size_t samples, std::uint64_t seed);

struct RuleVerification {
  double max_rel_error = 0.0;      // degree-n random polynomials, relative to max(1, int |f|)
  double higher_degree_error = 0.0;  // largest relative error over degree n+1 trials
  std::size_t trials = 0;
  double upper_min = 0.0, upper_max = 0.0, upper_spread = 0.0;  // w_j / |U(xi_j, 1/n)|
  std::size_t lower_pass = 0, lower_fail = 0;                   // w_j >= |R_j| / 4
  bool lower_checked = false;
};
RuleVerification verify_rule(const CubatureRule& rule, const Domain& dom, std::size_t trials,
                             std::uint64_t seed, const std::vector<double>& ball_volumes = {});

// T f = (4/3) mean f - (1/(3|Omega|)) sum_j f(xi_j)|R_j| written through the
// rule as sum_j c_j f(xi_j), c_j = (4 w_j - |R_j|) / (3 |Omega|).
struct TFunctionalReport {
  std::vector<double> coeffs;
  double min_coeff = 0.0;
  double coeff_sum = 0.0;
  double max_identity_error = 0.0;  // |T f - sum c_j f(xi_j)| over the trials
  bool convex = false;              // coefficients >= 0 and sum to 1 within 1e-8
};
TFunctionalReport t_functional_report(const CubatureRule& rule, const Domain& dom,
                                      std::size_t trials, std::uint64_t seed);

// index,x,y,weight,measure
void write_rule_csv(std::ostream& os, const CubatureRule& rule);

}  // namespace c2poly
