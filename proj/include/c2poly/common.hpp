#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace c2poly {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Bad arguments and violated preconditions.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Solver did not converge, system too ill-conditioned, and the like.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;

// Library version string baked in at configure time.
const char* version_string();

}  // namespace c2poly
