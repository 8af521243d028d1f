// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "nehari/grid.hpp"
#include "nehari/numeric.hpp"

namespace nehari {

// offset + sum_k slope_k x_k
struct AffineWeight {
  double offset = 0.0;
  std::vector<double> slope;
};

// amplitude * prod_k sin(2 pi freq_k x_k + phase_k)
struct SinusoidWeight {
  double amplitude = 1.0;
  std::vector<double> freq;
  std::vector<double> phase;
};

// amplitude * exp(-|x - center|^2 / sigma^2); negative amplitudes give the
// negative lobes.
struct Bump {
  double amplitude = 1.0;
  double sigma = 0.1;
  std::vector<double> center;
};

struct BumpsWeight {
  std::vector<Bump> bumps;
};

struct ConstantWeight {
  double value = 1.0;
};

// Node values read from a field CSV; the header must match the grid.
struct CsvWeight {
  std::string path;
};

using WeightSpec =
    std::variant<AffineWeight, SinusoidWeight, BumpsWeight, ConstantWeight, CsvWeight>;

struct Weight {
  Field values;
  double sup_norm = 0.0;  // max over nodes of |w|
  bool sign_changing = false;
  std::string warning;  // empty unless the weight is not sign changing
};

namespace detail {

inline void check_dim(std::vector<double> const& v, std::size_t dim, char const* what) {
  if (v.size() != dim) {
    throw ConfigError(std::string(what) + " has " + std::to_string(v.size()) +
                      " coordinates but the grid has dimension " + std::to_string(dim));
  }
}

inline double sample(WeightSpec const& spec, std::vector<double> const& x) {
  return std::visit(
      [&](auto const& w) -> double {
        using T = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<T, AffineWeight>) {
          double v = w.offset;
          for (std::size_t k = 0; k < x.size(); ++k) v += w.slope[k] * x[k];
          return v;
        } else if constexpr (std::is_same_v<T, SinusoidWeight>) {
          double v = w.amplitude;
          for (std::size_t k = 0; k < x.size(); ++k) {
            v *= std::sin(2.0 * std::numbers::pi * w.freq[k] * x[k] + w.phase[k]);
          }
          return v;
        } else if constexpr (std::is_same_v<T, BumpsWeight>) {
          double v = 0.0;
          for (Bump const& b : w.bumps) {
            double r2 = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) r2 += (x[k] - b.center[k]) * (x[k] - b.center[k]);
            v += b.amplitude * std::exp(-r2 / (b.sigma * b.sigma));
          }
          return v;
        } else if constexpr (std::is_same_v<T, ConstantWeight>) {
          return w.value;
        } else {
          return 0.0;
        }
      },
      spec);
}

}  // namespace detail

inline Weight make_weight(WeightSpec const& spec, Grid const& grid) {
  std::size_t const dim = grid.dim();
  std::vector<double> values(grid.size());
  if (auto const* csv = std::get_if<CsvWeight>(&spec)) {
    Field f = [&] {
      try {
        return read_field_csv(csv->path);
      } catch (std::runtime_error const& e) {
        throw ConfigError(e.what());
      }
    }();
    if (f.grid() != grid) throw ConfigError(csv->path + ": weight grid does not match the problem grid");
    values = f.values();
  } else {
    if (auto const* a = std::get_if<AffineWeight>(&spec)) detail::check_dim(a->slope, dim, "affine slope");
    if (auto const* s = std::get_if<SinusoidWeight>(&spec)) {
      detail::check_dim(s->freq, dim, "sinusoid freq");
      detail::check_dim(s->phase, dim, "sinusoid phase");
    }
    if (auto const* b = std::get_if<BumpsWeight>(&spec)) {
      if (b->bumps.empty()) throw ConfigError("bumps weight needs at least one bump");
      for (Bump const& bump : b->bumps) {
        detail::check_dim(bump.center, dim, "bump center");
        if (!(bump.sigma > 0.0)) throw ConfigError("bump sigma must be positive");
      }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = detail::sample(spec, grid.coordinates(i));
  }

  Weight out{Field(grid, std::move(values))};
  bool pos = false, neg = false;
  for (double v : out.values.values()) {
    out.sup_norm = std::max(out.sup_norm, std::abs(v));
    pos = pos || v > 0.0;
    neg = neg || v < 0.0;
  }
  out.sign_changing = pos && neg;
  if (!out.sign_changing) out.warning = "weight does not change sign on the grid";
  return out;
}

}  // namespace nehari
