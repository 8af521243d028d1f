// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "nehari/numeric.hpp"

namespace nehari {

struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Bracket {
  double lower;
  double upper;
};

// Limits on where a t-root may be searched for along a ray.
struct BracketLimits {
  double min_t = 1e-9;
  double max_t = 1e9;
  double growth = 2.0;
};

struct Root {
  double t;
  double width;  // final bracket width
};

// Bisection on a continuous f with f(lower), f(upper) of opposite sign (or one
// of them zero). Runs until the bracket cannot be split in double precision
// or its width drops below rel_width * |midpoint|.
template <typename F>
Root bisect(F&& f, double lower, double upper, double rel_width = 0.0) {
  double f_lower = f(lower);
  double f_upper = f(upper);
  if (f_lower == 0.0) return {lower, 0.0};
  if (f_upper == 0.0) return {upper, 0.0};
  if (sign_of(f_lower) == sign_of(f_upper)) {
    throw BracketError("bisect: no sign change on [" + format_g(lower) +
                       ", " + format_g(upper) + "]");
  }
  for (;;) {
    double const middle = 0.5 * (lower + upper);
    if (middle <= lower || middle >= upper ||
        upper - lower <= rel_width * std::abs(middle)) {
      return {middle, upper - lower};
    }
    double const f_middle = f(middle);
    if (f_middle == 0.0) return {middle, 0.0};
    if (sign_of(f_middle) == sign_of(f_lower)) {
      lower = middle;
      f_lower = f_middle;
    } else {
      upper = middle;
      f_upper = f_middle;
    }
  }
}

// Moves `upper` outward by the growth factor until pred(upper) holds.
template <typename Pred>
double grow_upward(Pred&& pred, double start, BracketLimits const& limits) {
  double t = start;
  while (!pred(t)) {
    t *= limits.growth;
    if (t > limits.max_t) {
      throw BracketError("bracket growth exceeded t = " +
                         format_g(limits.max_t));
    }
  }
  return t;
}

// Moves `lower` toward zero by the growth factor until pred(lower) holds.
template <typename Pred>
double grow_downward(Pred&& pred, double start, BracketLimits const& limits) {
  double t = start;
  while (!pred(t)) {
    t /= limits.growth;
    if (t < limits.min_t) {
      throw BracketError("bracket growth fell below t = " +
                         format_g(limits.min_t));
    }
  }
  return t;
}

// Root of a function that is negative for small t and positive for large t
// (or the reverse when `increasing` is false), starting from [1/2, 2].
template <typename F>
Root monotone_root(F&& f, bool increasing, BracketLimits const& limits = {}) {
  auto const below = [&](double t) {
    double const v = f(t);
    return increasing ? v <= 0.0 : v >= 0.0;
  };
  auto const above = [&](double t) {
    double const v = f(t);
    return increasing ? v >= 0.0 : v <= 0.0;
  };
  double const lower = grow_downward(below, 0.5, limits);
  double const upper = grow_upward(above, 2.0, limits);
  return bisect(f, lower, upper);
}

}  // namespace nehari
