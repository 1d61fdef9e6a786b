#include "c2poly/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "c2poly/common.hpp"

namespace c2poly {

NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iter, double tol) {
  const Eigen::Index m = A.rows(), n = A.cols();
  if (b.size() != m) throw DomainError("nnls: dimension mismatch");
  if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 10);
  if (tol <= 0)
    tol = 10.0 * std::numeric_limits<double>::epsilon() * A.cwiseAbs().colwise().sum().maxCoeff() *
          static_cast<double>(std::max(m, n));

  NnlsResult out;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  Eigen::VectorXd w = A.transpose() * (b - A * x);

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    Eigen::MatrixXd Ap(m, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
    const Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
    z.setZero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[static_cast<Eigen::Index>(k)];
  };

  int it = 0;
  while (true) {
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[j] && w[j] > best) {
        best = w[j];
        t = j;
      }
    if (t < 0) break;
    if (++it > max_iter) {
      out.converged = false;
      break;
    }
    passive[t] = true;
    Eigen::VectorXd z;
    while (true) {
      solve_passive(z);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && x[j] <= tol) {
          passive[j] = false;
          x[j] = 0.0;
        }
      if (++it > max_iter) {
        out.converged = false;
        break;
      }
    }
    if (!out.converged) break;
    w = A.transpose() * (b - A * x);
  }
  out.x = x;
  out.residual = (A * x - b).norm();
  out.iterations = it;
  return out;
}

}  // namespace c2poly
