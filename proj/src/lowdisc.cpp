#include "c2poly/common.hpp"
#include "c2poly/parallel.hpp"
#include "c2poly/random.hpp"

#include <atomic>
#include <cmath>

#ifndef C2POLY_VERSION_STRING
#define C2POLY_VERSION_STRING "0.1.0"
#endif

namespace c2poly {

const char* version_string() { return C2POLY_VERSION_STRING; }

namespace {
std::atomic<int> g_threads{1};
}

int thread_count() { return g_threads.load(); }
void set_thread_count(int n) { g_threads.store(n < 1 ? 1 : n); }

double radical_inverse(std::uint64_t i, unsigned base) {
  const double inv = 1.0 / base;
  double f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

std::vector<std::pair<double, double>> halton2(std::uint64_t first,
                                               std::size_t count,
                                               std::uint64_t seed) {
  double sx = 0.0, sy = 0.0;
  if (seed != 0) {
    sx = static_cast<double>(mix64(seed) >> 11) * 0x1.0p-53;
    sy = static_cast<double>(mix64(seed + 1) >> 11) * 0x1.0p-53;
  }
  std::vector<std::pair<double, double>> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::uint64_t i = first + k + 1;
    double x = radical_inverse(i, 2) + sx;
    double y = radical_inverse(i, 3) + sy;
    out[k] = {x - std::floor(x), y - std::floor(y)};
  }
  return out;
}

}  // namespace c2poly
