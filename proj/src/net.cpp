#include "c2poly/net.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "c2poly/format.hpp"
#include "c2poly/parallel.hpp"
#include "c2poly/random.hpp"

namespace c2poly {

namespace {

constexpr std::uint64_t kLayerTag = 0x6c61796572ULL;
constexpr std::uint64_t kBulkTag = 0x62756c6bULL;
constexpr std::uint64_t kPartTag = 0x70617274ULL;
constexpr std::uint64_t kRegTag = 0x726567ULL;

struct Candidate {
  Vec2 p;
  double d;  // boundary distance or depth
};

double rho_sqrt(const Vec2& a, double sa, const Vec2& b, double sb) {
  return (a - b).norm() + std::abs(sa - sb);
}

// Greedy selection; `embed` maps a candidate to grid coordinates in which
// the metric dominates the max-norm.
template <class Embed, class Metric>
std::vector<int> greedy(const std::vector<Candidate>& cand, double delta, const Box& ebox,
                        Embed embed, Metric metric) {
  CenterGrid grid(ebox, delta);
  std::vector<int> chosen;
  for (std::size_t k = 0; k < cand.size(); ++k) {
    const Vec2 e = embed(cand[k]);
    bool ok = true;
    grid.visit(e, delta, [&](int idx) {
      if (ok && metric(cand[k], cand[static_cast<std::size_t>(idx)]) < delta) ok = false;
    });
    if (!ok) continue;
    grid.insert(e, static_cast<int>(k));
    chosen.push_back(static_cast<int>(k));
  }
  return chosen;
}

}  // namespace

CenterGrid::CenterGrid(const Box& box, double cell) : box_(box) {
  cell_ = cell;
  // Keep the table bounded; larger cells only cost extra comparisons.
  const double area = std::max(box.width(), 1e-300) * std::max(box.height(), 1e-300);
  if (area / (cell_ * cell_) > 4e6) cell_ = std::sqrt(area / 4e6);
  nx_ = std::max(1, static_cast<int>(std::ceil(box.width() / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(box.height() / cell_)));
  cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
}

int CenterGrid::cell_x(double x) const {
  const int i = static_cast<int>(std::floor((x - box_.lo.x()) / cell_));
  return std::clamp(i, 0, nx_ - 1);
}

int CenterGrid::cell_y(double y) const {
  const int j = static_cast<int>(std::floor((y - box_.lo.y()) / cell_));
  return std::clamp(j, 0, ny_ - 1);
}

void CenterGrid::insert(const Vec2& p, int index) {
  cells_[static_cast<std::size_t>(cell_y(p.y())) * nx_ + cell_x(p.x())].push_back(index);
}

Net greedy_maximal_net(const Domain& dom, double delta, std::size_t candidates, std::uint64_t seed) {
  if (!(delta > 0)) throw DomainError("greedy_maximal_net: delta must be positive");
  if (candidates < 4) throw DomainError("greedy_maximal_net: need at least 4 candidates");
  const Box bb = dom.bbox();
  const double P = dom.perimeter();
  const double sig_max = std::min(std::sqrt(0.5 * dom.kappa0()), 3 * delta);
  const std::size_t nl = candidates / 4, nb = candidates - nl;

  std::vector<Candidate> layer(nl);
  const auto hl = halton2(1, nl, stream_seed(seed, 0, kLayerTag));
  parallel_for(nl, [&](std::size_t k) {
    const double sig = hl[k].second * sig_max;
    const BoundaryPoint bp = dom.boundary_at(hl[k].first * P);
    layer[k] = {bp.position - sig * sig * bp.normal, sig * sig};
  });

  const auto hb = halton2(1, nb, stream_seed(seed, 1, kBulkTag));
  std::vector<Candidate> bulk(nb);
  std::vector<char> keep(nb, 0);
  parallel_for(nb, [&](std::size_t k) {
    const Vec2 p(bb.lo.x() + hb[k].first * bb.width(), bb.lo.y() + hb[k].second * bb.height());
    if (!dom.contains(p, 0.0)) return;
    bulk[k] = {p, dom.dist(p)};
    keep[k] = 1;
  });

  std::vector<Candidate> cand;
  cand.reserve(candidates);
  for (auto& c : layer)
    if (dom.contains(c.p, 0.0)) cand.push_back({c.p, std::sqrt(c.d)});
  for (std::size_t k = 0; k < nb; ++k)
    if (keep[k]) cand.push_back({bulk[k].p, std::sqrt(bulk[k].d)});

  // Candidates carry sqrt(dist) during the greedy pass.
  const auto chosen = greedy(
      cand, delta, bb, [](const Candidate& c) { return c.p; },
      [](const Candidate& a, const Candidate& b) { return rho_sqrt(a.p, a.d, b.p, b.d); });

  Net net;
  net.delta = delta;
  net.metric = "rho_omega";
  net.candidates = cand.size();
  net.seed = seed;
  for (int k : chosen) {
    net.centers.push_back(cand[static_cast<std::size_t>(k)].p);
    net.dists.push_back(cand[static_cast<std::size_t>(k)].d * cand[static_cast<std::size_t>(k)].d);
  }
  return net;
}

Net greedy_patch_net(const GraphPatch& patch, double delta, std::size_t candidates,
                     std::uint64_t seed, double lambda) {
  if (!(delta > 0)) throw DomainError("greedy_patch_net: delta must be positive");
  const auto h = halton2(1, candidates, stream_seed(seed, 2, kLayerTag));
  std::vector<Candidate> cand(candidates);
  for (std::size_t k = 0; k < candidates; ++k) {
    const Vec2 p = sample_patch_point(patch, h[k].first, h[k].second, lambda);
    cand[k] = {p, patch.g(p.x()) - p.y()};
  }
  auto embed = [](const Candidate& c) { return Vec2(c.p.x(), std::sqrt(std::max(c.d, 0.0))); };
  const double xb = lambda * patch.base();
  const Box ebox{Vec2(-xb, 0.0), Vec2(xb, std::sqrt(lambda * patch.depth()))};
  const auto chosen = greedy(cand, delta, ebox, embed, [&](const Candidate& a, const Candidate& b) {
    const Vec2 ea = embed(a), eb = embed(b);
    return std::max(std::abs(ea.x() - eb.x()), std::abs(ea.y() - eb.y()));
  });
  Net net;
  net.delta = delta;
  net.metric = "rho_hat";
  net.candidates = candidates;
  net.seed = seed;
  for (int k : chosen) {
    net.centers.push_back(cand[static_cast<std::size_t>(k)].p);
    net.dists.push_back(cand[static_cast<std::size_t>(k)].d);
  }
  return net;
}

NetIndex::NetIndex(const Domain& dom, const Net& net)
    : dom_(&dom), net_(&net), grid_(dom.bbox(), net.delta) {
  if (net.metric != "rho_omega") throw DomainError("NetIndex: only rho_omega nets can be assigned");
  if (net.dists.size() != net.centers.size()) throw DomainError("NetIndex: net without distances");
  for (std::size_t k = 0; k < net.size(); ++k) grid_.insert(net.centers[k], static_cast<int>(k));
}

std::optional<int> NetIndex::assign(const Vec2& eta) const { return assign(eta, dom_->dist(eta)); }

std::optional<int> NetIndex::assign(const Vec2& eta, double dist_eta) const {
  const double delta = net_->delta;
  const double se = std::sqrt(dist_eta);
  int inner = -1, outer = -1;
  grid_.visit(eta, delta, [&](int idx) {
    const auto k = static_cast<std::size_t>(idx);
    const double r = rho_sqrt(eta, se, net_->centers[k], std::sqrt(net_->dists[k]));
    if (r < 0.5 * delta && (inner < 0 || idx < inner)) inner = idx;
    if (r <= delta && (outer < 0 || idx < outer)) outer = idx;
  });
  if (inner >= 0) return inner;
  if (outer >= 0) return outer;
  return std::nullopt;
}

int NetIndex::nearest(const Vec2& eta, double dist_eta) const {
  const double se = std::sqrt(dist_eta);
  int best = -1;
  double br = std::numeric_limits<double>::infinity();
  for (double r = net_->delta;; r *= 2) {
    grid_.visit(eta, r, [&](int idx) {
      const auto k = static_cast<std::size_t>(idx);
      const double v = rho_sqrt(eta, se, net_->centers[k], std::sqrt(net_->dists[k]));
      if (v < br || (v == br && idx < best)) {
        br = v;
        best = idx;
      }
    });
    // Anything outside the searched square is at least r away.
    if (best >= 0 && br <= r) return best;
    if (r > 4 * dom_->diameter() + 4 * net_->delta) break;
  }
  if (best < 0) throw NumericalError("NetIndex::nearest: empty net");
  return best;
}

Partition make_partition(const Domain& dom, const Net& net, std::size_t samples, std::uint64_t seed) {
  if (net.size() == 0) throw DomainError("make_partition: empty net");
  Partition part;
  part.net = net;
  part.area = dom.area();
  part.samples = samples;
  NetIndex index(dom, part.net);
  const Box bb = dom.bbox();
  const std::size_t chunk = 4096;
  const std::size_t chunks = (samples + chunk - 1) / chunk;
  std::vector<int> who(samples, -2);
  std::vector<std::size_t> defects(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng(stream_seed(seed, c, kPartTag));
    const std::size_t m = std::min(chunk, samples - c * chunk);
    for (std::size_t i = 0; i < m; ++i) {
      const double u = uniform01(rng), v = uniform01(rng);
      const Vec2 p(bb.lo.x() + u * bb.width(), bb.lo.y() + v * bb.height());
      if (!dom.contains(p, 0.0)) continue;
      const double d = dom.dist(p);
      auto a = index.assign(p, d);
      if (!a) {
        ++defects[c];
        a = index.nearest(p, d);
      }
      who[c * chunk + i] = *a;
    }
  });
  std::vector<std::size_t> hits(net.size(), 0);
  std::size_t inside = 0;
  for (int w : who)
    if (w >= 0) {
      ++hits[static_cast<std::size_t>(w)];
      ++inside;
    }
  for (auto d : defects) part.unassigned += d;
  part.measures.resize(net.size());
  part.stderrs.resize(net.size());
  const double n_in = static_cast<double>(std::max<std::size_t>(inside, 1));
  for (std::size_t j = 0; j < net.size(); ++j) {
    const double q = hits[j] / n_in;
    part.measures[j] = part.area * q;
    part.stderrs[j] = part.area * std::sqrt(q * (1 - q) / n_in);
  }
  return part;
}

std::optional<int> assign_cell(const Domain& dom, const Partition& part, const Vec2& eta) {
  if (!dom.contains(eta)) throw DomainError("assign_cell: point outside the domain");
  return NetIndex(dom, part.net).assign(eta);
}

double min_separation(const Domain& dom, const Net& net) {
  (void)dom;
  if (net.size() < 2) return std::numeric_limits<double>::infinity();
  const double delta = net.delta;
  Box box{net.centers[0], net.centers[0]};
  for (const auto& c : net.centers) {
    box.lo = box.lo.cwiseMin(c);
    box.hi = box.hi.cwiseMax(c);
  }
  CenterGrid grid(box, delta);
  for (std::size_t k = 0; k < net.size(); ++k) grid.insert(net.centers[k], static_cast<int>(k));
  // Pairs further apart than 2 delta in the plane are at least that far in
  // rho, so the minimum is clamped there.
  double best = 2 * delta;
  for (std::size_t k = 0; k < net.size(); ++k) {
    const double sk = std::sqrt(net.dists[k]);
    grid.visit(net.centers[k], 2 * delta, [&](int idx) {
      const auto j = static_cast<std::size_t>(idx);
      if (j <= k) return;
      best = std::min(best, rho_sqrt(net.centers[k], sk, net.centers[j], std::sqrt(net.dists[j])));
    });
  }
  return best;
}

RegularityReport regularity_check(const Domain& dom, const Partition& part,
                                  std::size_t inner_per_cell, std::size_t outer_samples,
                                  std::size_t max_cells, std::uint64_t seed) {
  RegularityReport rep;
  const Net& net = part.net;
  const double delta = net.delta;
  NetIndex index(dom, net);
  rep.min_separation = min_separation(dom, net) / delta;
  const std::size_t N = net.size();
  const std::size_t cells = std::min(N, max_cells);
  const Box bb = dom.bbox();

  std::vector<std::size_t> in_s(cells, 0), in_v(cells, 0);
  parallel_for(cells, [&](std::size_t c) {
    const std::size_t j = cells == N ? c : (c * N) / cells;
    Rng rng(stream_seed(seed, j, kRegTag));
    const Vec2 xi = net.centers[j];
    const double sxi = std::sqrt(net.dists[j]);
    std::size_t got = 0;
    for (std::size_t tries = 0; got < inner_per_cell && tries < 200 * inner_per_cell; ++tries) {
      const Vec2 p = xi + 0.5 * delta * Vec2(2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1);
      if ((p.array() < bb.lo.array()).any() || (p.array() > bb.hi.array()).any()) continue;
      if (!dom.contains(p, 0.0)) continue;
      const double d = dom.dist(p);
      if (!(rho_sqrt(p, std::sqrt(d), xi, sxi) < 0.5 * delta)) continue;
      ++got;
      const auto a = index.assign(p, d);
      if (!a || static_cast<std::size_t>(*a) != j) ++in_v[c];
    }
    in_s[c] = got;
  });
  for (std::size_t c = 0; c < cells; ++c) {
    rep.inner_samples += in_s[c];
    rep.inner_violations += in_v[c];
  }
  rep.cells_checked = cells;

  const std::size_t chunk = 4096;
  const std::size_t chunks = (outer_samples + chunk - 1) / chunk;
  std::vector<std::size_t> os(chunks, 0), ov(chunks, 0), un(chunks, 0);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng(stream_seed(seed, c, kRegTag + 1));
    const std::size_t m = std::min(chunk, outer_samples - c * chunk);
    for (std::size_t i = 0; i < m; ++i) {
      const Vec2 p(bb.lo.x() + uniform01(rng) * bb.width(), bb.lo.y() + uniform01(rng) * bb.height());
      if (!dom.contains(p, 0.0)) continue;
      ++os[c];
      const double d = dom.dist(p);
      const auto a = index.assign(p, d);
      if (!a) {
        ++un[c];
        continue;
      }
      const auto j = static_cast<std::size_t>(*a);
      if (rho_sqrt(p, std::sqrt(d), net.centers[j], std::sqrt(net.dists[j])) > delta) ++ov[c];
    }
  });
  for (std::size_t c = 0; c < chunks; ++c) {
    rep.outer_samples += os[c];
    rep.outer_violations += ov[c];
    rep.unassigned += un[c];
  }
  // Unassigned points are maximality defects of the finite candidate
  // stream; they are reported but do not void regularity of the cells.
  rep.pass = rep.inner_violations == 0 && rep.outer_violations == 0 && rep.min_separation >= 1.0;
  return rep;
}

CoverCount cover_count(const Domain& dom, const Vec2& xi, double L, double delta,
                       std::uint64_t seed, std::size_t candidates) {
  if (!(L >= 1)) throw DomainError("cover_count: L must be >= 1");
  if (!(delta > 0)) throw DomainError("cover_count: delta must be positive");
  const double R = L * delta;
  const double sxi = std::sqrt(dom.dist(xi));
  const Box bb = dom.bbox();
  const Box box{(xi - Vec2(R, R)).cwiseMax(bb.lo), (xi + Vec2(R, R)).cwiseMin(bb.hi)};
  const auto h = halton2(1, candidates, stream_seed(seed, 3, kBulkTag));
  std::vector<Candidate> raw(candidates);
  std::vector<char> keep(candidates, 0);
  parallel_for(candidates, [&](std::size_t k) {
    const Vec2 p(box.lo.x() + h[k].first * box.width(), box.lo.y() + h[k].second * box.height());
    if ((p - xi).norm() > R || !dom.contains(p, 0.0)) return;
    const double s = std::sqrt(dom.dist(p));
    if (rho_sqrt(p, s, xi, sxi) > R) return;
    raw[k] = {p, s};
    keep[k] = 1;
  });
  std::vector<Candidate> cand{{xi, sxi}};
  for (std::size_t k = 0; k < candidates; ++k)
    if (keep[k]) cand.push_back(raw[k]);
  const auto chosen = greedy(
      cand, delta, box, [](const Candidate& c) { return c.p; },
      [](const Candidate& a, const Candidate& b) { return rho_sqrt(a.p, a.d, b.p, b.d); });
  return {chosen.size(), L * L};
}

std::vector<double> chebyshev_nodes(double L, int n1) {
  if (!(L > 0)) throw DomainError("chebyshev_nodes: L must be positive");
  if (n1 < 1) throw DomainError("chebyshev_nodes: n1 must be >= 1");
  std::vector<double> b(static_cast<std::size_t>(n1) + 1);
  for (int j = 0; j <= n1; ++j) {
    const double s = std::sin(j * kPi / (2.0 * n1));
    b[static_cast<std::size_t>(j)] = 2 * L * s * s;
  }
  return b;
}

ChebyshevPartition chebyshev_partition(const GraphPatch& patch, int n1, int n) {
  ChebyshevPartition cp;
  const double D = patch.depth();
  double gmax = 0.0;
  for (int k = 0; k <= 4096; ++k) gmax = std::max(gmax, std::abs(patch.g(-2 * patch.base() + k * patch.base() / 1024.0)));
  cp.L = gmax / D + 10.0;
  if (!(n1 > 5 * cp.L + n))
    throw DomainError("chebyshev_partition: n1 = " + std::to_string(n1) + " must exceed 5L + n = " +
                      std::to_string(5 * cp.L + n));
  cp.n1 = n1;
  cp.depth = D;
  cp.beta = chebyshev_nodes(cp.L, n1);
  // beta_m < 1 <= beta_{m+1}
  int m = 0;
  while (m + 1 <= n1 && cp.beta[static_cast<std::size_t>(m) + 1] < 1.0) ++m;
  m = std::max(m, 1);
  cp.m = m;
  cp.alpha.assign(cp.beta.begin(), cp.beta.begin() + m);
  cp.alpha.push_back(1.0);
  cp.x.resize(static_cast<std::size_t>(n1) + 1);
  for (int i = 0; i <= n1; ++i) cp.x[static_cast<std::size_t>(i)] = -patch.base() + 2.0 * i * patch.base() / n1;
  cp.spacing_min = std::numeric_limits<double>::infinity();
  cp.spacing_max = 0.0;
  for (int j = 1; j <= cp.m; ++j) {
    const double a = cp.alpha[static_cast<std::size_t>(j)], a0 = cp.alpha[static_cast<std::size_t>(j) - 1];
    const double r = (a - a0) * n1 / (std::sqrt(a) + 1.0 / n1);
    cp.spacing_min = std::min(cp.spacing_min, r);
    cp.spacing_max = std::max(cp.spacing_max, r);
  }
  return cp;
}

std::optional<std::pair<int, int>> ChebyshevPartition::cell_of(const GraphPatch& patch, double px,
                                                               double py) const {
  const double b = patch.base();
  if (std::abs(px) > b) return std::nullopt;
  const double a = (patch.g(px) - py) / depth;
  if (a < 0 || a > 1) return std::nullopt;
  int i = static_cast<int>(std::floor((px + b) / (2 * b) * n1)) + 1;
  i = std::clamp(i, 1, n1);
  auto it = std::lower_bound(alpha.begin() + 1, alpha.end(), a);
  int j = static_cast<int>(it - alpha.begin());
  j = std::clamp(j, 1, m);
  return std::make_pair(i, j);
}

bool ChebyshevPartition::in_cell(const GraphPatch& patch, int i, int j, double px, double py) const {
  if (i < 1 || i > n1 || j < 1 || j > m) return false;
  const double a = (patch.g(px) - py) / depth;
  return px >= x[static_cast<std::size_t>(i) - 1] && px <= x[static_cast<std::size_t>(i)] &&
         a >= alpha[static_cast<std::size_t>(j) - 1] && a <= alpha[static_cast<std::size_t>(j)];
}

double ChebyshevPartition::cell_area(int i, int j) const {
  if (i < 1 || i > n1 || j < 1 || j > m) throw DomainError("cell_area: index out of range");
  return (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i) - 1]) *
         (alpha[static_cast<std::size_t>(j)] - alpha[static_cast<std::size_t>(j) - 1]) * depth;
}

void write_partition_table(std::ostream& os, const Partition& part) {
  const Net& net = part.net;
  os << "# delta=" << fmt17(net.delta) << '\n'
     << "# metric=" << net.metric << '\n'
     << "# candidates=" << net.candidates << '\n'
     << "# seed=" << net.seed << '\n'
     << "# samples=" << part.samples << '\n'
     << "# unassigned=" << part.unassigned << '\n'
     << "# area=" << fmt17(part.area) << '\n'
     << "index,x,y,measure,stderr,dist\n";
  for (std::size_t j = 0; j < net.size(); ++j) {
    os << j << ',' << fmt17(net.centers[j].x()) << ',' << fmt17(net.centers[j].y()) << ','
       << fmt17(j < part.measures.size() ? part.measures[j] : 0.0) << ','
       << fmt17(j < part.stderrs.size() ? part.stderrs[j] : 0.0) << ',' << fmt17(net.dists[j]) << '\n';
  }
}

Partition read_partition_table(std::istream& is) {
  Partition part;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2), val = line.substr(eq + 1);
      if (key == "delta") part.net.delta = std::stod(val);
      else if (key == "metric") part.net.metric = val;
      else if (key == "candidates") part.net.candidates = std::stoull(val);
      else if (key == "seed") part.net.seed = std::stoull(val);
      else if (key == "samples") part.samples = std::stoull(val);
      else if (key == "unassigned") part.unassigned = std::stoull(val);
      else if (key == "area") part.area = std::stod(val);
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string f[6];
    for (auto& s : f)
      if (!std::getline(ss, s, ',')) throw DomainError("read_partition_table: short row");
    part.net.centers.emplace_back(std::stod(f[1]), std::stod(f[2]));
    part.measures.push_back(std::stod(f[3]));
    part.stderrs.push_back(std::stod(f[4]));
    part.net.dists.push_back(std::stod(f[5]));
  }
  if (!header) throw DomainError("read_partition_table: missing header");
  return part;
}

}  // namespace c2poly
