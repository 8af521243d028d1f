// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nehari/numeric.hpp"

namespace nehari {

// Uniform box [0, L_1] x ... x [0, L_N] with n_k interior nodes per axis and
// homogeneous Dirichlet data on the boundary. Interior node i_k sits at
// x_k = (i_k + 1) h_k with h_k = L_k / (n_k + 1). Nodes are stored in
// lexicographic order with the last axis fastest.
class Grid {
 public:
  Grid() : Grid({3}, {1.0}) {}
  Grid(std::vector<std::size_t> nodes, std::vector<double> lengths)
      : n_(std::move(nodes)), L_(std::move(lengths)) {
    if (n_.empty()) throw std::invalid_argument("grid dimension must be >= 1");
    if (n_.size() != L_.size()) {
      throw std::invalid_argument("grid: node counts and side lengths differ in dimension");
    }
    for (std::size_t k = 0; k < n_.size(); ++k) {
      if (n_[k] < 3) throw std::invalid_argument("grid: need at least 3 interior nodes per axis");
      if (!(L_[k] > 0.0)) throw std::invalid_argument("grid: side lengths must be positive");
    }
    h_.resize(n_.size());
    stride_.assign(n_.size(), 1);
    cell_volume_ = 1.0;
    for (std::size_t k = 0; k < n_.size(); ++k) {
      h_[k] = L_[k] / double(n_[k] + 1);
      cell_volume_ *= h_[k];
    }
    for (std::size_t k = n_.size() - 1; k > 0; --k) stride_[k - 1] = stride_[k] * n_[k];
    size_ = stride_[0] * n_[0];
  }

  static Grid cube(std::size_t dim, std::size_t n, double length = 1.0) {
    return Grid(std::vector<std::size_t>(dim, n), std::vector<double>(dim, length));
  }

  std::size_t dim() const { return n_.size(); }
  std::size_t size() const { return size_; }
  std::size_t nodes(std::size_t axis) const { return n_[axis]; }
  double length(std::size_t axis) const { return L_[axis]; }
  double spacing(std::size_t axis) const { return h_[axis]; }
  std::size_t stride(std::size_t axis) const { return stride_[axis]; }
  // Quadrature weight of one interior node, prod_k h_k.
  double cell_volume() const { return cell_volume_; }
  std::vector<std::size_t> const& node_counts() const { return n_; }
  std::vector<double> const& lengths() const { return L_; }

  // Critical Sobolev exponent 2N/(N-2); +inf for N <= 2.
  double critical_exponent() const {
    if (dim() <= 2) return std::numeric_limits<double>::infinity();
    return 2.0 * double(dim()) / (double(dim()) - 2.0);
  }

  std::size_t index_along(std::size_t node, std::size_t axis) const {
    return (node / stride_[axis]) % n_[axis];
  }

  std::vector<double> coordinates(std::size_t node) const {
    std::vector<double> x(dim());
    for (std::size_t k = 0; k < dim(); ++k) x[k] = double(index_along(node, k) + 1) * h_[k];
    return x;
  }

  // Number of grid lines parallel to `axis`.
  std::size_t lines(std::size_t axis) const { return size_ / n_[axis]; }
  // Number of staggered edges along `axis`, including the two boundary edges
  // of every line.
  std::size_t edges(std::size_t axis) const { return lines(axis) * (n_[axis] + 1); }

  bool operator==(Grid const& other) const { return n_ == other.n_ && L_ == other.L_; }
  bool operator!=(Grid const& other) const { return !(*this == other); }

 private:
  std::vector<std::size_t> n_;
  std::vector<double> L_;
  std::vector<double> h_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 0;
  double cell_volume_ = 1.0;
};

// Node values on a fixed grid.
class Field {
 public:
  Field() : Field(Grid()) {}
  explicit Field(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}
  Field(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw std::invalid_argument("field size does not match grid");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw std::invalid_argument("field entries must be finite");
    }
  }

  Grid const& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::vector<double> const& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  Field scaled(double t) const {
    Field out(*this);
    for (double& v : out.values_) v *= t;
    return out;
  }

  // this + alpha * direction
  Field plus(double alpha, std::vector<double> const& direction) const {
    Field out(*this);
    for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] += alpha * direction[i];
    return out;
  }

  bool is_zero() const {
    for (double v : values_) if (v != 0.0) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

// Walks the lines parallel to `axis`: calls f(line, first_node) where nodes on
// the line are first_node + j * stride(axis), j = 0..n_axis-1.
template <typename F>
void for_each_line(Grid const& grid, std::size_t axis, F&& f) {
  std::size_t const stride = grid.stride(axis);
  std::size_t const n = grid.nodes(axis);
  std::size_t const outer = grid.size() / (stride * n);
  std::size_t line = 0;
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < stride; ++in) f(line++, o * stride * n + in);
  }
}

// Staggered one-sided differences: along every grid line parallel to axis k
// there are n_k + 1 edges; edge e of a line joins node e-1 and node e, with the
// zero boundary values standing in for nodes -1 and n_k. Edge values are
// stored line by line.
class VectorField {
 public:
  explicit VectorField(Grid const& grid) {
    edges_.resize(grid.dim());
    for (std::size_t k = 0; k < grid.dim(); ++k) edges_[k].assign(grid.edges(k), 0.0);
    stride_.resize(grid.dim());
    for (std::size_t k = 0; k < grid.dim(); ++k) stride_[k] = grid.nodes(k) + 1;
  }

  std::size_t dim() const { return edges_.size(); }
  std::vector<double> const& component(std::size_t axis) const { return edges_[axis]; }
  std::vector<double>& component(std::size_t axis) { return edges_[axis]; }
  double edge(std::size_t axis, std::size_t line, std::size_t e) const {
    return edges_[axis][line * stride_[axis] + e];
  }
  double& edge(std::size_t axis, std::size_t line, std::size_t e) {
    return edges_[axis][line * stride_[axis] + e];
  }

 private:
  std::vector<std::vector<double>> edges_;
  std::vector<std::size_t> stride_;
};

inline VectorField gradient(Field const& u) {
  Grid const& g = u.grid();
  VectorField grad(g);
  for (std::size_t k = 0; k < g.dim(); ++k) {
    std::size_t const n = g.nodes(k);
    std::size_t const stride = g.stride(k);
    double const inv_h = 1.0 / g.spacing(k);
    for_each_line(g, k, [&](std::size_t line, std::size_t first) {
      double prev = 0.0;
      for (std::size_t e = 0; e < n; ++e) {
        double const cur = u[first + e * stride];
        grad.edge(k, line, e) = (cur - prev) * inv_h;
        prev = cur;
      }
      grad.edge(k, line, n) = -prev * inv_h;
    });
  }
  return grad;
}

// Node-centred view of the gradient: component `axis` at `node` is the mean of
// the two adjacent edges, i.e. the central difference with zero ghosts.
inline std::vector<double> nodal_gradient(VectorField const& grad, Grid const& g,
                                          std::size_t node) {
  std::vector<double> out(g.dim());
  for (std::size_t k = 0; k < g.dim(); ++k) {
    std::size_t const n = g.nodes(k);
    std::size_t const pos = g.index_along(node, k);
    std::size_t const stride = g.stride(k);
    std::size_t const outer = node / (stride * n);
    std::size_t const inner = node % stride;
    std::size_t const line = outer * stride + inner;
    out[k] = 0.5 * (grad.edge(k, line, pos) + grad.edge(k, line, pos + 1));
  }
  return out;
}

// Transpose of `gradient`: returns D^T flux as node values.
inline std::vector<double> gradient_adjoint(VectorField const& flux, Grid const& g) {
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t k = 0; k < g.dim(); ++k) {
    std::size_t const n = g.nodes(k);
    std::size_t const stride = g.stride(k);
    double const inv_h = 1.0 / g.spacing(k);
    for_each_line(g, k, [&](std::size_t line, std::size_t first) {
      for (std::size_t j = 0; j < n; ++j) {
        // node j is the upper end of edge j and the lower end of edge j+1
        out[first + j * stride] +=
            (flux.edge(k, line, j) - flux.edge(k, line, j + 1)) * inv_h;
      }
    });
  }
  return out;
}

// Discrete Laplacian -D^T D; the standard (2N+1)-point Dirichlet stencil.
inline Field laplacian(Field const& u) {
  std::vector<double> v = gradient_adjoint(gradient(u), u.grid());
  for (double& x : v) x = -x;
  return Field(u.grid(), std::move(v));
}

// Node-rule quadrature (prod h_k) * sum of interior samples.
inline double integrate(Grid const& g, std::vector<double> const& samples) {
  if (samples.size() != g.size()) throw std::invalid_argument("integrate: sample count mismatch");
  return g.cell_volume() * compensated_sum(samples);
}

inline double integrate(Field const& w) { return integrate(w.grid(), w.values()); }

// Quadrature of grad u . grad v: every staggered edge carries one cell volume.
inline double grad_inner(Field const& u, Field const& v) {
  VectorField const gu = gradient(u);
  VectorField const gv = gradient(v);
  CompensatedSum s;
  for (std::size_t k = 0; k < gu.dim(); ++k) {
    auto const& a = gu.component(k);
    auto const& b = gv.component(k);
    for (std::size_t e = 0; e < a.size(); ++e) s.add(a[e] * b[e]);
  }
  return u.grid().cell_volume() * s.value();
}

inline double weighted_dot(Field const& u, Field const& v) {
  CompensatedSum s;
  for (std::size_t i = 0; i < u.size(); ++i) s.add(u[i] * v[i]);
  return u.grid().cell_volume() * s.value();
}

struct Norms {
  double l2 = 0.0;
  double grad_l2 = 0.0;
  std::map<double, double> lp;  // r -> ||u||_r
};

inline double lp_norm(Field const& u, double r) {
  if (!(r >= 1.0)) throw DomainError("norm exponent must be >= 1");
  CompensatedSum s;
  for (double v : u.values()) s.add(std::pow(std::abs(v), r));
  return std::pow(u.grid().cell_volume() * s.value(), 1.0 / r);
}

inline Norms norms(Field const& u, std::vector<double> const& exponents = {}) {
  Norms out;
  out.l2 = std::sqrt(weighted_dot(u, u));
  out.grad_l2 = std::sqrt(grad_inner(u, u));
  for (double r : exponents) out.lp[r] = lp_norm(u, r);
  return out;
}

// Pointwise energy density E = u^2 + |grad u|^2 on the quadrature points of the
// closed grid. Points [0, size) are the interior nodes (weight prod h_k, |grad
// u|^2 the per-axis mean of the two squared one-sided differences). The
// remaining points are the boundary-face nodes (weight prod h_k / 2, u = 0,
// |grad u|^2 the square of the inward difference), ordered by axis, then line,
// low face before high face. With these weights sum_p w_p |grad u|^2_p equals
// grad_inner(u, u) exactly.
class EnergyDensity {
 public:
  explicit EnergyDensity(Field const& u) : grid_(u.grid()), grad_(gradient(u)), u_(u.values()) {
    Grid const& g = grid_;
    std::size_t total = g.size();
    for (std::size_t k = 0; k < g.dim(); ++k) total += 2 * g.lines(k);
    E_.assign(total, 0.0);
    weight_.assign(total, g.cell_volume());
    for (std::size_t i = 0; i < g.size(); ++i) E_[i] = u_[i] * u_[i];
    std::size_t face = g.size();
    for (std::size_t k = 0; k < g.dim(); ++k) {
      std::size_t const n = g.nodes(k);
      std::size_t const stride = g.stride(k);
      for_each_line(g, k, [&](std::size_t line, std::size_t first) {
        for (std::size_t j = 0; j < n; ++j) {
          double const l = grad_.edge(k, line, j);
          double const r = grad_.edge(k, line, j + 1);
          E_[first + j * stride] += 0.5 * (l * l + r * r);
        }
        double const lo = grad_.edge(k, line, 0);
        double const hi = grad_.edge(k, line, n);
        E_[face] = lo * lo;
        E_[face + 1] = hi * hi;
        weight_[face] = weight_[face + 1] = 0.5 * g.cell_volume();
        face += 2;
      });
    }
  }

  Grid const& grid() const { return grid_; }
  std::size_t points() const { return E_.size(); }
  std::vector<double> const& E() const { return E_; }
  std::vector<double> const& weights() const { return weight_; }
  VectorField const& gradient_field() const { return grad_; }

  // Gradient with respect to the node values of sum_p kappa_p E_p / 2.
  std::vector<double> adjoint(std::vector<double> const& kappa) const {
    Grid const& g = grid_;
    VectorField flux(g);
    std::size_t face = g.size();
    for (std::size_t k = 0; k < g.dim(); ++k) {
      std::size_t const n = g.nodes(k);
      std::size_t const stride = g.stride(k);
      for_each_line(g, k, [&](std::size_t line, std::size_t first) {
        for (std::size_t e = 0; e <= n; ++e) {
          double c = 0.0;
          if (e >= 1) c += 0.5 * kappa[first + (e - 1) * stride];
          if (e < n) c += 0.5 * kappa[first + e * stride];
          if (e == 0) c += kappa[face];
          if (e == n) c += kappa[face + 1];
          flux.edge(k, line, e) = c * grad_.edge(k, line, e);
        }
        face += 2;
      });
    }
    std::vector<double> out = gradient_adjoint(flux, g);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] += kappa[i] * u_[i];
    return out;
  }

 private:
  Grid grid_;
  VectorField grad_;
  std::vector<double> u_;
  std::vector<double> E_;
  std::vector<double> weight_;
};

// Field CSV: first line "dim,n_1..n_N,L_1..L_N", then one node value per line
// in lexicographic order (last axis fastest).
inline void write_field_csv(std::string const& path, Field const& u) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write field file '" + path + "'");
  Grid const& g = u.grid();
  out << g.dim();
  for (std::size_t k = 0; k < g.dim(); ++k) out << ',' << g.nodes(k);
  out << std::setprecision(17);
  for (std::size_t k = 0; k < g.dim(); ++k) out << ',' << g.length(k);
  out << '\n';
  for (double v : u.values()) out << v << '\n';
}

inline Field read_field_csv(std::string const& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open field file '" + path + "'");
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error(path + ": empty field file");
  std::vector<double> head;
  {
    std::stringstream ss(header);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        head.push_back(std::stod(cell));
      } catch (std::exception const&) {
        throw std::runtime_error(path + ":1: header must be numeric 'dim,n1..nN,L1..LN'");
      }
    }
  }
  if (head.empty()) throw std::runtime_error(path + ":1: missing header");
  auto const dim = static_cast<std::size_t>(head[0]);
  if (dim < 1 || head[0] != double(dim) || head.size() != 1 + 2 * dim) {
    throw std::runtime_error(path + ":1: header must be 'dim,n1..nN,L1..LN'");
  }
  std::vector<std::size_t> n(dim);
  std::vector<double> L(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    n[k] = static_cast<std::size_t>(head[1 + k]);
    L[k] = head[1 + dim + k];
  }
  Grid grid(n, L);
  std::vector<double> values;
  values.reserve(grid.size());
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      values.push_back(std::stod(line));
    } catch (std::exception const&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": not a number");
    }
  }
  if (values.size() != grid.size()) {
    throw std::runtime_error(path + ": expected " + std::to_string(grid.size()) +
                             " node values, found " + std::to_string(values.size()));
  }
  return Field(std::move(grid), std::move(values));
}

}  // namespace nehari
