#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "hausdim/errors.hpp"

namespace hausdim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kLog2 = std::numbers::ln2;

/// t log t with the continuous extension 0 log 0 = 0.
inline double xlogx(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// base^exp, throwing ResourceError as soon as the result exceeds `limit`.
inline std::int64_t guarded_pow(std::int64_t base, int exp, std::int64_t limit,
                                const std::string& what) {
  std::int64_t result = 1;
  for (int i = 0; i < exp; ++i) {
    if (result > limit / base) {
      throw ResourceError(what + ": " + std::to_string(base) + "^" + std::to_string(exp) +
                          " exceeds limit " + std::to_string(limit));
    }
    result *= base;
  }
  if (result > limit) {
    throw ResourceError(what + ": " + std::to_string(base) + "^" + std::to_string(exp) +
                        " exceeds limit " + std::to_string(limit));
  }
  return result;
}

}  // namespace hausdim
