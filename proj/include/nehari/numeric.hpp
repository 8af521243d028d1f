// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>

namespace nehari {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};

// Invalid or incomplete user input (config files, weight specs, CSV data).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Neumaier-compensated accumulator. Callers add terms in a fixed order, which
// makes every reduction in the library bit-reproducible.
class CompensatedSum {
 public:
  void add(double x) {
    double const t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      correction_ += (sum_ - t) + x;
    } else {
      correction_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + correction_; }

 private:
  double sum_ = 0.0;
  double correction_ = 0.0;
};

inline double compensated_sum(std::span<double const> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

// |u|^(r-1) u, extended by 0 at u = 0.
inline double signed_power(double u, double r) {
  if (u == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(u), r), u);
}

// Shortest "%g" rendering, for messages (std::to_string prints 1e-9 as 0.000000).
inline std::string format_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

inline int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

inline double relative_error(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

}  // namespace nehari
