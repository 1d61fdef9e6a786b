#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "c2poly/domain.hpp"
#include "c2poly/net.hpp"
#include "c2poly/polynomial.hpp"
#include "c2poly/quadrature.hpp"

namespace c2poly {

// (sum_j |f(xi_j)|^p |R_j|)^{1/p}; p = infinity gives max_j |f(xi_j)|.
double discrete_norm(const Partition& part, const Field& f, double p);
double discrete_norm(const Partition& part, const Polynomial& f, double p);

// Reference L^p norm of a bivariate polynomial on the domain.
double reference_norm(const Domain& dom, const Polynomial& f, double p);

struct MZOptions {
  std::size_t candidates = 1000000;
  std::size_t measure_samples = 400000;
  bool stop_at_first_pass = false;  // stop the sweep once a delta passes
  double band_lo = 0.5, band_hi = 1.5;
};

struct MZReport {
  std::string domain;
  int n = 0;
  double delta = 0.0;      // sweep value; the net is delta/n separated (delta if n = 0)
  double separation = 0.0;
  double p = 2.0;
  std::size_t nodes = 0;
  std::size_t samples = 0;
  std::size_t candidates = 0;
  std::size_t unassigned = 0;
  double min_ratio = 0.0, max_ratio = 0.0;
  bool in_band = false;
  std::vector<double> ratios;
};

struct MZSweep {
  std::vector<MZReport> reports;  // in sweep order (skipped deltas omitted)
  std::optional<double> delta0;   // largest delta with every ratio in band
};

MZSweep mz_ratio_sweep(const Domain& dom, int n, double p, const std::vector<double>& deltas,
                       std::size_t trials, std::uint64_t seed, const MZOptions& opt = {});

// Per-center sample sets for the oscillation functional, reusable across
// polynomials: radius ell * eps / n balls for the oscillation, eps / n
// balls for the volume weights.
class OscillationSampler {
 public:
  OscillationSampler(const Domain& dom, const Net& net, double ell, double eps, int n,
                     std::size_t osc_samples, std::size_t volume_samples, std::uint64_t seed);
  // (sum_xi |U(xi, eps/n)| osc(f; U(xi, ell eps/n))^p)^{1/p}; p = infinity
  // gives the max oscillation.
  double functional(const Field& f, double p) const;
  double functional(const Polynomial& f, double p) const;
  const std::vector<double>& volumes() const { return volumes_; }
  std::size_t osc_samples() const { return osc_samples_; }
  double eps() const { return eps_; }

 private:
  std::vector<std::vector<Vec2>> points_;
  std::vector<double> volumes_;
  std::size_t osc_samples_;
  double eps_;
};

struct OscillationResult {
  double functional = 0.0;
  double ratio = 0.0;  // functional / (eps ||f||_p)
  std::size_t centers = 0;
  std::size_t samples_per_ball = 0;
};
OscillationResult oscillation_sum(const Domain& dom, const Net& net, const Polynomial& f, double ell,
                                  double eps, int n, double p, std::uint64_t seed,
                                  std::size_t osc_samples = 200);

struct NodeInequality {
  double lhs = 0.0;
  double rhs_core = 0.0;
  double ratio = 0.0;
};
// Nodes theta_i in [0, pi] with consecutive gaps >= 1/n. The stored degree
// of f is the k of the bound.
NodeInequality univariate_node_inequality(const Polynomial& f, const std::vector<double>& theta,
                                          int n, double p, double ell, int grid_per_node = 64);

// Chebyshev polynomial T_k as a univariate Polynomial.
Polynomial chebyshev_t(int k);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace c2poly
