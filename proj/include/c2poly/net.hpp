#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "c2poly/common.hpp"
#include "c2poly/domain.hpp"
#include "c2poly/patch.hpp"

namespace c2poly {

// delta-separated centers. `dists` holds the boundary distance of each
// center (rho_omega nets) or its depth g(x) - y (rho_hat nets).
struct Net {
  std::vector<Vec2> centers;
  std::vector<double> dists;
  double delta = 0.0;
  std::string metric = "rho_omega";
  std::size_t candidates = 0;  // resolution at which maximality holds
  std::uint64_t seed = 0;

  std::size_t size() const { return centers.size(); }
};

// Greedy insertion over a quasi-random candidate stream: a quarter of the
// stream is a boundary layer, uniform in (arc length, sqrt depth), the rest
// are bounding-box Halton points inside the domain.
Net greedy_maximal_net(const Domain& dom, double delta, std::size_t candidates, std::uint64_t seed);

// Same under rho_hat on a patch; centers in patch-local coordinates.
Net greedy_patch_net(const GraphPatch& patch, double delta, std::size_t candidates,
                     std::uint64_t seed, double lambda = 1.0);

// Uniform-grid lookup of centers within a Euclidean radius.
class CenterGrid {
 public:
  CenterGrid() = default;
  CenterGrid(const Box& box, double cell);
  void insert(const Vec2& p, int index);
  // Calls f(index) for every stored center whose grid cell meets the
  // square of half-width r about p.
  template <class F>
  void visit(const Vec2& p, double r, F&& f) const {
    const int i0 = cell_x(p.x() - r), i1 = cell_x(p.x() + r);
    const int j0 = cell_y(p.y() - r), j1 = cell_y(p.y() + r);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        for (int idx : cells_[static_cast<std::size_t>(j) * nx_ + i]) f(idx);
  }

 private:
  int cell_x(double x) const;
  int cell_y(double y) const;
  Box box_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> cells_;
};

// Regular partition built from a net by the pointwise rule: the center
// within rho < delta/2 if there is one, else the smallest index with
// rho <= delta.
struct Partition {
  Net net;
  std::vector<double> measures;
  std::vector<double> stderrs;
  std::size_t samples = 0;
  std::size_t unassigned = 0;  // samples that hit no center (maximality defects)
  double area = 0.0;

  const std::vector<Vec2>& reps() const { return net.centers; }
  std::size_t size() const { return net.centers.size(); }
};

class NetIndex {
 public:
  NetIndex(const Domain& dom, const Net& net);
  // Cell index, or nullopt when no center is within delta.
  std::optional<int> assign(const Vec2& eta) const;
  std::optional<int> assign(const Vec2& eta, double dist_eta) const;
  // Center with the smallest rho.
  int nearest(const Vec2& eta, double dist_eta) const;
  const Net& net() const { return *net_; }

 private:
  const Domain* dom_;
  const Net* net_;
  CenterGrid grid_;
};

// Monte Carlo cell measures: |R_j| = |Omega| * (hits_j / hits). Points with
// no center within delta are counted as defects and given to the nearest
// center so that the measures still sum to |Omega|.
Partition make_partition(const Domain& dom, const Net& net, std::size_t samples, std::uint64_t seed);

std::optional<int> assign_cell(const Domain& dom, const Partition& part, const Vec2& eta);

struct RegularityReport {
  bool pass = true;
  std::size_t cells_checked = 0;
  std::size_t inner_samples = 0;
  std::size_t inner_violations = 0;  // points of U(xi_j, delta/2) not in R_j
  std::size_t outer_samples = 0;
  std::size_t outer_violations = 0;  // points of R_j outside U(xi_j, delta)
  std::size_t unassigned = 0;
  double min_separation = 0.0;  // over all pairs, in units of delta
};
RegularityReport regularity_check(const Domain& dom, const Partition& part,
                                  std::size_t inner_per_cell, std::size_t outer_samples,
                                  std::size_t max_cells, std::uint64_t seed);

// Minimum pairwise rho over the centers.
double min_separation(const Domain& dom, const Net& net);

struct CoverCount {
  std::size_t count = 0;
  double comparator = 0.0;  // L^2
};
CoverCount cover_count(const Domain& dom, const Vec2& xi, double L, double delta,
                       std::uint64_t seed, std::size_t candidates = 20000);

// beta_j = L - L cos(j pi / n1), j = 0..n1.
std::vector<double> chebyshev_nodes(double L, int n1);

struct ChebyshevPartition {
  double L = 0.0;  // max |g| / depth + 10, in depth units
  int n1 = 0;
  int m = 0;
  std::vector<double> beta;
  std::vector<double> alpha;  // alpha_0..alpha_m, normalised depth, alpha_m = 1
  std::vector<double> x;      // x_0..x_n1, uniform on [-b, b]
  double depth = 0.0;         // L b of the patch
  double spacing_min = 0.0;   // extremes of (alpha_j - alpha_{j-1}) n1 / (sqrt(alpha_j) + 1/n1)
  double spacing_max = 0.0;

  // 1-based (i, j) of the cell containing local point (px, py), or nullopt
  // if outside |x| <= b, 0 <= depth <= L b.
  std::optional<std::pair<int, int>> cell_of(const GraphPatch& patch, double px, double py) const;
  bool in_cell(const GraphPatch& patch, int i, int j, double px, double py) const;
  double cell_area(int i, int j) const;
};

// Requires n1 > 5 L + n.
ChebyshevPartition chebyshev_partition(const GraphPatch& patch, int n1, int n);

// Text table: '#' metadata lines (delta, metric, candidates, seed, samples,
// unassigned, area), then the header index,x,y,measure,stderr.
void write_partition_table(std::ostream& os, const Partition& part);
Partition read_partition_table(std::istream& is);

}  // namespace c2poly
