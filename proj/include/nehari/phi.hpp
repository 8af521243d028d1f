// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "nehari/numeric.hpp"

namespace nehari {

// Values of the operator profile at one argument s >= 0:
// Phi(s) = int_0^s phi, phi(s), phi'(s), phi''(s).
struct PhiValues {
  double Phi;
  double phi;
  double phi1;
  double phi2;
};

struct ConstantPhi {
  double c = 1.0;

  double Phi(double s) const { return c * s; }
  double phi(double) const { return c; }
  double phi1(double) const { return 0.0; }
  double phi2(double) const { return 0.0; }
};

// phi(s) = (1+s)^-3 + A.
struct StuartPhi {
  double A = 6.0;

  double Phi(double s) const {
    double const r = 1.0 / (1.0 + s);
    // A s - (1+s)^-2 / 2 + 1/2, written to avoid cancellation near s = 0.
    return A * s + 0.5 * (1.0 - r * r);
  }
  double phi(double s) const {
    double const r = 1.0 / (1.0 + s);
    return r * r * r + A;
  }
  double phi1(double s) const {
    double const r = 1.0 / (1.0 + s);
    double const r2 = r * r;
    return -3.0 * r2 * r2;
  }
  double phi2(double s) const {
    double const r = 1.0 / (1.0 + s);
    double const r2 = r * r;
    return 12.0 * r2 * r2 * r;
  }
};

// Monotone piecewise-cubic Hermite interpolant of (s_k, phi_k) samples with
// s_0 = 0; extended by the last value beyond the final knot.
class TabulatedPhi {
 public:
  TabulatedPhi(std::vector<double> knots, std::vector<double> values)
      : s_(std::move(knots)), y_(std::move(values)) {
    if (s_.size() != y_.size() || s_.size() < 2) {
      throw std::invalid_argument("tabulated phi needs at least two (s, phi) rows");
    }
    if (s_.front() != 0.0) {
      throw std::invalid_argument("tabulated phi must start at s = 0");
    }
    for (std::size_t k = 0; k + 1 < s_.size(); ++k) {
      if (!(s_[k + 1] > s_[k])) {
        throw std::invalid_argument("tabulated phi: s must be strictly increasing (row " +
                                    std::to_string(k + 2) + ")");
      }
    }
    for (double y : y_) {
      if (!std::isfinite(y)) throw std::invalid_argument("tabulated phi: non-finite value");
    }
    build_slopes();
    build_cumulative();
  }

  double Phi(double s) const {
    if (s >= s_.back()) return cumulative_.back() + y_.back() * (s - s_.back());
    auto const [k, tau, h] = locate(s);
    double const t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau;
    double const i00 = 0.5 * t4 - t3 + tau;
    double const i10 = 0.25 * t4 - 2.0 * t3 / 3.0 + 0.5 * t2;
    double const i01 = -0.5 * t4 + t3;
    double const i11 = 0.25 * t4 - t3 / 3.0;
    return cumulative_[k] +
           h * (y_[k] * i00 + h * m_[k] * i10 + y_[k + 1] * i01 + h * m_[k + 1] * i11);
  }
  double phi(double s) const {
    if (s >= s_.back()) return y_.back();
    auto const [k, tau, h] = locate(s);
    double const t2 = tau * tau, t3 = t2 * tau;
    return y_[k] * (2 * t3 - 3 * t2 + 1) + h * m_[k] * (t3 - 2 * t2 + tau) +
           y_[k + 1] * (-2 * t3 + 3 * t2) + h * m_[k + 1] * (t3 - t2);
  }
  double phi1(double s) const {
    if (s >= s_.back()) return 0.0;
    auto const [k, tau, h] = locate(s);
    double const t2 = tau * tau;
    return (y_[k] * (6 * t2 - 6 * tau) + h * m_[k] * (3 * t2 - 4 * tau + 1) +
            y_[k + 1] * (-6 * t2 + 6 * tau) + h * m_[k + 1] * (3 * t2 - 2 * tau)) /
           h;
  }
  double phi2(double s) const {
    if (s >= s_.back()) return 0.0;
    auto const [k, tau, h] = locate(s);
    return (y_[k] * (12 * tau - 6) + h * m_[k] * (6 * tau - 4) +
            y_[k + 1] * (-12 * tau + 6) + h * m_[k + 1] * (6 * tau - 2)) /
           (h * h);
  }

  std::vector<double> const& knots() const { return s_; }
  std::vector<double> const& values() const { return y_; }

 private:
  struct Location {
    std::size_t k;
    double tau;
    double h;
  };

  Location locate(double s) const {
    std::size_t lo = 0, hi = s_.size() - 1;
    while (hi - lo > 1) {
      std::size_t const mid = (lo + hi) / 2;
      if (s_[mid] <= s) lo = mid; else hi = mid;
    }
    double const h = s_[lo + 1] - s_[lo];
    return {lo, (s - s_[lo]) / h, h};
  }

  void build_slopes() {
    std::size_t const n = s_.size();
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      h[k] = s_[k + 1] - s_[k];
      d[k] = (y_[k + 1] - y_[k]) / h[k];
    }
    m_.assign(n, 0.0);
    if (n == 2) {
      m_[0] = m_[1] = d[0];
      return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (d[k - 1] * d[k] <= 0.0) continue;
      double const w1 = 2 * h[k] + h[k - 1];
      double const w2 = h[k] + 2 * h[k - 1];
      m_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
    }
    auto const end_slope = [](double h0, double h1, double d0, double d1) {
      double m = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (sign_of(m) != sign_of(d0)) {
        m = 0.0;
      } else if (sign_of(d0) != sign_of(d1) && std::abs(m) > 3 * std::abs(d0)) {
        m = 3 * d0;
      }
      return m;
    };
    m_[0] = end_slope(h[0], h[1], d[0], d[1]);
    m_[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  }

  void build_cumulative() {
    cumulative_.assign(s_.size(), 0.0);
    for (std::size_t k = 0; k + 1 < s_.size(); ++k) {
      double const h = s_[k + 1] - s_[k];
      // Exact integral of the Hermite cubic over one interval.
      cumulative_[k + 1] = cumulative_[k] + h * (0.5 * (y_[k] + y_[k + 1]) +
                                                 h * (m_[k] - m_[k + 1]) / 12.0);
    }
  }

  std::vector<double> s_;
  std::vector<double> y_;
  std::vector<double> m_;
  std::vector<double> cumulative_;
};

enum class PhiKind { constant, stuart_example, tabulated };

inline std::string_view to_string(PhiKind kind) {
  switch (kind) {
    case PhiKind::constant: return "constant";
    case PhiKind::stuart_example: return "stuart_example";
    case PhiKind::tabulated: return "tabulated";
  }
  return "unknown";
}

class PhiModel {
 public:
  using Variant = std::variant<ConstantPhi, StuartPhi, TabulatedPhi>;

  PhiModel() : model_(ConstantPhi{1.0}) {}
  PhiModel(ConstantPhi m) : model_(m) {}
  PhiModel(StuartPhi m) : model_(m) {}
  PhiModel(TabulatedPhi m) : model_(std::move(m)) {}

  static PhiModel constant(double c) { return ConstantPhi{c}; }
  static PhiModel stuart_example(double A) { return StuartPhi{A}; }

  PhiKind kind() const { return static_cast<PhiKind>(model_.index()); }

  template <typename Visitor>
  decltype(auto) visit(Visitor&& v) const {
    return std::visit(std::forward<Visitor>(v), model_);
  }

  Variant const& variant() const { return model_; }

 private:
  Variant model_;
};

inline PhiValues evaluate(PhiModel const& model, double s) {
  if (!(s >= 0.0)) throw DomainError("phi argument must be >= 0, got " + format_g(s));
  return model.visit([s](auto const& m) {
    return PhiValues{m.Phi(s), m.phi(s), m.phi1(s), m.phi2(s)};
  });
}

// Two-column CSV "s,phi"; an optional non-numeric header line is skipped.
inline TabulatedPhi load_tabulated_phi(std::string const& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tabulated phi file '" + path + "'");
  std::vector<double> s, y;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a, b;
    if (!(row >> a >> b)) {
      if (s.empty() && line_no == 1) continue;
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected two numeric columns");
    }
    s.push_back(a);
    y.push_back(b);
  }
  return TabulatedPhi(std::move(s), std::move(y));
}

}  // namespace nehari
