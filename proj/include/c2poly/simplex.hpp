#pragma once

#include <Eigen/Dense>

namespace c2poly {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Optimal;
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  double phase1_residual = 0.0;  // sum of artificials, row-normalised
};

// maximize c.x subject to A x = b, x >= 0. Dense two-phase tableau;
// Dantzig pricing with Bland's rule on degenerate stalls.
LpResult simplex_maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& c, double tol = 1e-10, int max_iter = 0);

const char* to_string(LpStatus s);

}  // namespace c2poly
