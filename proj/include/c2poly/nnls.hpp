#pragma once

#include <Eigen/Dense>

namespace c2poly {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual = 0.0;  // ||A x - b||_2
  int iterations = 0;
  bool converged = true;
};

// min ||A x - b||_2 subject to x >= 0 (Lawson-Hanson active set).
NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iter = 0,
                double tol = 0.0);

}  // namespace c2poly
