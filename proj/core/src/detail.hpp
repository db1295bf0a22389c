#pragma once

// Internal helpers shared between translation units; not installed.

#include <cmath>
#include <cstdint>
#include <numbers>

#include "dps/lattice.hpp"

namespace dps::detail {

// Squared length of a shortest nonzero vector of the lattice with
// upper-triangular factor r (any basis whose R factor this is).
double shortest_norm2(const Matrix& r);

// Neumaier compensated summation; order-dependent only through rounding of
// the compensation term, which is far below the tolerances used here.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kTwoPiE = 2.0 * std::numbers::pi * std::numbers::e;

}  // namespace dps::detail
