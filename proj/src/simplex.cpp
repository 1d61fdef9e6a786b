#include "c2poly/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "c2poly/common.hpp"

namespace c2poly {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

// Tableau rows 0..m-1 are constraints, row m the reduced costs of the
// current (maximisation) objective; last column is the right-hand side.
struct Tableau {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> T;
  std::vector<Eigen::Index> basis;
  Eigen::Index cols;  // variable count

  void pivot(Eigen::Index r, Eigen::Index c) {
    T.row(r) /= T(r, c);
    for (Eigen::Index i = 0; i < T.rows(); ++i)
      if (i != r && T(i, c) != 0.0) T.row(i) -= T(i, c) * T.row(r);
    basis[r] = c;
  }

  // Largest-coefficient pricing, falling back to Bland's rule after a run
  // of degenerate pivots so that cycling cannot occur.
  LpStatus run(const std::vector<bool>& allowed, double tol, int max_iter, int& iters) {
    const Eigen::Index m = T.rows() - 1, rhs = T.cols() - 1;
    int degenerate = 0;
    while (true) {
      const bool bland = degenerate >= 20;
      Eigen::Index enter = -1;
      double best_rc = tol;
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (!allowed[c] || T(m, c) <= best_rc) continue;
        enter = c;
        if (bland) break;
        best_rc = T(m, c);
      }
      if (enter < 0) return LpStatus::Optimal;
      if (iters++ >= max_iter) return LpStatus::IterationLimit;
      Eigen::Index leave = -1;
      double best = 0.0;
      for (Eigen::Index r = 0; r < m; ++r) {
        if (T(r, enter) <= tol) continue;
        const double ratio = std::max(0.0, T(r, rhs)) / T(r, enter);
        if (leave < 0 || ratio < best - tol ||
            (std::abs(ratio - best) <= tol && basis[r] < basis[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      degenerate = best <= tol ? degenerate + 1 : 0;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult simplex_maximize(const Eigen::MatrixXd& A0, const Eigen::VectorXd& b0,
                          const Eigen::VectorXd& c, double tol, int max_iter) {
  const Eigen::Index m = A0.rows(), n = A0.cols();
  if (b0.size() != m || c.size() != n) throw DomainError("simplex: dimension mismatch");
  if (max_iter <= 0) max_iter = static_cast<int>(50 * (m + n) + 1000);

  // row equilibration, sign fix so b >= 0
  Eigen::MatrixXd A = A0;
  Eigen::VectorXd b = b0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = std::max(A.row(i).cwiseAbs().maxCoeff(), std::abs(b[i]));
    if (s > 0) {
      A.row(i) /= s;
      b[i] /= s;
    }
    if (b[i] < 0) {
      A.row(i) *= -1.0;
      b[i] = -b[i];
    }
  }

  Tableau tab;
  tab.cols = n + m;
  tab.T.setZero(m + 1, n + m + 1);
  tab.T.topLeftCorner(m, n) = A;
  tab.T.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
  tab.T.col(n + m).head(m) = b;
  tab.basis.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) tab.basis[i] = n + i;
  // phase 1: maximise -sum(artificials); reduced costs after pricing out
  for (Eigen::Index i = 0; i < m; ++i) tab.T.row(m) += tab.T.row(i);
  tab.T.row(m).segment(n, m).setZero();

  LpResult out;
  int iters = 0;
  std::vector<bool> allowed(n + m, true);
  LpStatus st = tab.run(allowed, tol, max_iter, iters);
  if (st == LpStatus::IterationLimit) {
    out.status = st;
    out.iterations = iters;
    return out;
  }
  out.phase1_residual = std::abs(tab.T(m, n + m));
  if (tab.T(m, n + m) > tol * std::max<double>(1.0, static_cast<double>(m))) {
    out.status = LpStatus::Infeasible;
    out.iterations = iters;
    return out;
  }
  // drive zero-level artificials out; rows with no candidate are redundant
  std::vector<bool> redundant(m, false);
  for (Eigen::Index r = 0; r < m; ++r) {
    if (tab.basis[r] < n) continue;
    Eigen::Index c = -1;
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(tab.T(r, j)) > 1e3 * tol) {
        c = j;
        break;
      }
    if (c >= 0)
      tab.pivot(r, c);
    else
      redundant[r] = true;
  }

  // phase 2 objective priced out against the basis
  tab.T.row(m).setZero();
  tab.T.row(m).head(n) = c.transpose();
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index j = tab.basis[r];
    if (j < n && c[j] != 0.0) tab.T.row(m) -= c[j] * tab.T.row(r);
  }
  for (Eigen::Index j = n; j < n + m; ++j) allowed[j] = false;
  const double ctol = tol * std::max(1.0, c.cwiseAbs().maxCoeff());
  st = tab.run(allowed, ctol, max_iter, iters);
  out.status = st;
  out.iterations = iters;
  if (st != LpStatus::Optimal) return out;

  // refine the basic solution against the original system
  std::vector<Eigen::Index> bcols;
  for (Eigen::Index r = 0; r < m; ++r)
    if (!redundant[r] && tab.basis[r] < n) bcols.push_back(tab.basis[r]);
  out.x = Eigen::VectorXd::Zero(n);
  if (!bcols.empty()) {
    Eigen::MatrixXd B(m, static_cast<Eigen::Index>(bcols.size()));
    for (std::size_t k = 0; k < bcols.size(); ++k) B.col(static_cast<Eigen::Index>(k)) = A0.col(bcols[k]);
    const Eigen::VectorXd xb = B.colPivHouseholderQr().solve(b0);
    for (std::size_t k = 0; k < bcols.size(); ++k)
      out.x[bcols[k]] = std::max(0.0, xb[static_cast<Eigen::Index>(k)]);
  }
  out.objective = c.dot(out.x);
  return out;
}

}  // namespace c2poly
