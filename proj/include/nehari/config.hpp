// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nehari/energy.hpp"
#include "nehari/hypotheses.hpp"
#include "nehari/numeric.hpp"
#include "nehari/phi.hpp"
#include "nehari/weights.hpp"

namespace nehari {

struct PhiSpec {
  PhiKind kind = PhiKind::constant;
  double c = 1.0;
  double A = 6.0;
  std::string file;
  SamplePlan plan;
};

struct GridSpec {
  std::vector<std::size_t> n{17, 17, 17};
  std::vector<double> L{1.0, 1.0, 1.0};
};

struct LambdaSpec {
  bool automatic = true;  // value is a fraction of lambda_0
  double value = 0.5;
};

struct FiberingSampling {
  double t_min = 1e-3;
  double t_max = 1e3;
  std::size_t count = 241;
};

// Everything a CLI run needs. Defaults: unit cube with 17^3 interior nodes,
// phi = 1, q = 0.5, p = 3, lambda = auto:0.5, two-lobe Gaussian weights along
// the first axis.
struct RunConfig {
  PhiSpec phi;
  GridSpec grid;
  WeightSpec a;
  WeightSpec b;
  double q = 0.5;
  double p = 3.0;
  LambdaSpec lambda;
  Tolerances tol;
  int max_iterations = 5000;
  int restarts = 3;
  int multistart = 5;
  int gradcheck_directions = 20;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  FiberingSampling sampling;

  Grid make_grid() const { return Grid(grid.n, grid.L); }
};

// Two opposite Gaussian lobes along the first axis, the other coordinates at
// the box centre.
inline BumpsWeight two_lobe_weight(GridSpec const& g, double positive_at, double negative_at,
                                   double sigma = 0.15) {
  auto centre = [&](double frac) {
    std::vector<double> c(g.L.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = 0.5 * g.L[k];
    c[0] = frac * g.L[0];
    return c;
  };
  return BumpsWeight{{Bump{1.0, sigma * g.L[0], centre(positive_at)},
                      Bump{-1.0, sigma * g.L[0], centre(negative_at)}}};
}

inline WeightSpec default_weight_a(GridSpec const& g) { return two_lobe_weight(g, 0.35, 0.75); }
inline WeightSpec default_weight_b(GridSpec const& g) { return two_lobe_weight(g, 0.6, 0.2); }

namespace ini {

struct Entry {
  std::string value;
  std::size_t line = 0;
  bool used = false;
};

struct Section {
  std::size_t line = 0;
  std::map<std::string, Entry> entries;
};

inline std::string trim(std::string_view s) {
  auto const b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto const e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class Document {
 public:
  Document(std::string const& text, std::string source) : source_(std::move(source)) {
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    Section* current = nullptr;
    while (std::getline(in, raw)) {
      ++line_no;
      // '#' starts a comment anywhere; ';' only at the start of a line, since
      // it also separates bumps.
      std::string line = raw.substr(0, raw.find('#'));
      if (trim(line).rfind(';', 0) == 0) line.clear();
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(line_no, "unterminated section header");
        std::string name = trim(line.substr(1, line.size() - 2));
        if (sections_.count(name)) fail(line_no, "duplicate section [" + name + "]");
        current = &sections_[name];
        current->line = line_no;
        continue;
      }
      auto const eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
      if (current == nullptr) fail(line_no, "key outside of any section");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty()) fail(line_no, "empty key");
      if (current->entries.count(key)) fail(line_no, "duplicate key '" + key + "'");
      current->entries[key] = Entry{value, line_no};
    }
  }

  [[noreturn]] void fail(std::size_t line, std::string const& msg) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + msg);
  }

  bool has_section(std::string const& s) const { return sections_.count(s) > 0; }

  Entry* find(std::string const& section, std::string const& key) {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto e = s->second.entries.find(key);
    if (e == s->second.entries.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  std::size_t section_line(std::string const& s) const {
    auto it = sections_.find(s);
    return it == sections_.end() ? 0 : it->second.line;
  }

  void reject_unknown(std::set<std::string> const& known_sections) const {
    for (auto const& [name, sec] : sections_) {
      if (!known_sections.count(name)) fail(sec.line, "unknown section [" + name + "]");
      for (auto const& [key, e] : sec.entries) {
        if (!e.used) fail(e.line, "unknown key '" + key + "' in [" + name + "]");
      }
    }
  }

  std::string const& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, Section> sections_;
};

inline double to_double(Document const& doc, Entry const& e, std::string const& key) {
  double v = 0.0;
  auto const* first = e.value.data();
  auto const* last = first + e.value.size();
  auto const [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    doc.fail(e.line, "'" + key + "' must be a number, got '" + e.value + "'");
  }
  return v;
}

inline long long to_integer(Document const& doc, Entry const& e, std::string const& key) {
  long long v = 0;
  auto const* first = e.value.data();
  auto const* last = first + e.value.size();
  auto const [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    doc.fail(e.line, "'" + key + "' must be an integer, got '" + e.value + "'");
  }
  return v;
}

inline std::vector<double> to_list(Document const& doc, Entry const& e, std::string const& key,
                                   std::string const& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Entry tmp{trim(item), e.line};
    out.push_back(to_double(doc, tmp, key));
  }
  if (out.empty()) doc.fail(e.line, "'" + key + "' must be a non-empty list");
  return out;
}

}  // namespace ini

namespace detail {

inline WeightSpec parse_weight(ini::Document& doc, std::string const& section,
                               std::filesystem::path const& base) {
  auto get = [&](char const* key) { return doc.find(section, key); };
  auto require = [&](char const* key) {
    ini::Entry* e = get(key);
    if (e == nullptr) doc.fail(doc.section_line(section), "[" + section + "] missing required key '" + key + "'");
    return e;
  };
  ini::Entry* kind = require("kind");
  std::string const k = kind->value;
  if (k == "constant") {
    return ConstantWeight{ini::to_double(doc, *require("value"), "value")};
  }
  if (k == "affine") {
    AffineWeight w;
    if (auto* e = get("offset")) w.offset = ini::to_double(doc, *e, "offset");
    ini::Entry* slope = require("slope");
    w.slope = ini::to_list(doc, *slope, "slope", slope->value);
    return w;
  }
  if (k == "sinusoid") {
    SinusoidWeight w;
    if (auto* e = get("amplitude")) w.amplitude = ini::to_double(doc, *e, "amplitude");
    ini::Entry* f = require("freq");
    w.freq = ini::to_list(doc, *f, "freq", f->value);
    if (auto* e = get("phase")) {
      w.phase = ini::to_list(doc, *e, "phase", e->value);
    } else {
      w.phase.assign(w.freq.size(), 0.0);
    }
    return w;
  }
  if (k == "bumps") {
    ini::Entry* e = require("bumps");
    BumpsWeight w;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ';')) {
      if (ini::trim(item).empty()) continue;
      auto const v = ini::to_list(doc, *e, "bumps", item);
      if (v.size() < 3) doc.fail(e->line, "each bump is 'amplitude, sigma, c1, ..., cN'");
      w.bumps.push_back(Bump{v[0], v[1], std::vector<double>(v.begin() + 2, v.end())});
    }
    return w;
  }
  if (k == "csv") {
    ini::Entry* e = require("file");
    return CsvWeight{(base / e->value).string()};
  }
  doc.fail(kind->line, "unknown weight kind '" + k + "' (affine, sinusoid, bumps, constant, csv)");
}

}  // namespace detail

// Parses the INI-style run configuration. Relative file names are resolved
// against `base`.
inline RunConfig parse_config(std::string const& text, std::string const& source = "<config>",
                              std::filesystem::path const& base = ".") {
  ini::Document doc(text, source);
  RunConfig cfg;
  auto num = [&](char const* section, char const* key, double& out) {
    if (auto* e = doc.find(section, key)) out = ini::to_double(doc, *e, key);
  };
  auto integer = [&](char const* section, char const* key, auto& out, long long lo) {
    if (auto* e = doc.find(section, key)) {
      long long const v = ini::to_integer(doc, *e, key);
      if (v < lo) doc.fail(e->line, std::string("'") + key + "' must be >= " + std::to_string(lo));
      out = static_cast<std::decay_t<decltype(out)>>(v);
    }
  };

  // [phi]
  if (auto* e = doc.find("phi", "kind")) {
    if (e->value == "constant") cfg.phi.kind = PhiKind::constant;
    else if (e->value == "stuart_example") cfg.phi.kind = PhiKind::stuart_example;
    else if (e->value == "tabulated") cfg.phi.kind = PhiKind::tabulated;
    else doc.fail(e->line, "unknown phi kind '" + e->value + "' (constant, stuart_example, tabulated)");
  }
  num("phi", "c", cfg.phi.c);
  num("phi", "A", cfg.phi.A);
  if (auto* e = doc.find("phi", "file")) cfg.phi.file = (base / e->value).string();
  num("phi", "s_max", cfg.phi.plan.s_max);
  integer("phi", "samples", cfg.phi.plan.count, 3);
  num("phi", "safety", cfg.phi.plan.safety);
  if (cfg.phi.kind == PhiKind::tabulated && cfg.phi.file.empty()) {
    doc.fail(doc.section_line("phi"), "[phi] kind = tabulated needs 'file'");
  }
  if (cfg.phi.kind == PhiKind::constant && !(cfg.phi.c > 0.0)) {
    doc.fail(doc.section_line("phi"), "[phi] c must be positive");
  }

  // [grid]
  {
    std::size_t dim = 3;
    if (auto* e = doc.find("grid", "dim")) {
      long long const v = ini::to_integer(doc, *e, "dim");
      if (v < 1) doc.fail(e->line, "'dim' must be >= 1");
      dim = std::size_t(v);
    }
    cfg.grid.n.assign(dim, 17);
    cfg.grid.L.assign(dim, 1.0);
    if (auto* e = doc.find("grid", "n")) {
      auto const v = ini::to_list(doc, *e, "n", e->value);
      if (v.size() != 1 && v.size() != dim) doc.fail(e->line, "'n' needs 1 or dim entries");
      for (std::size_t k = 0; k < dim; ++k) {
        double const x = v.size() == 1 ? v[0] : v[k];
        if (x < 3 || x != std::floor(x)) doc.fail(e->line, "'n' entries must be integers >= 3");
        cfg.grid.n[k] = std::size_t(x);
      }
    }
    if (auto* e = doc.find("grid", "L")) {
      auto const v = ini::to_list(doc, *e, "L", e->value);
      if (v.size() != 1 && v.size() != dim) doc.fail(e->line, "'L' needs 1 or dim entries");
      for (std::size_t k = 0; k < dim; ++k) {
        cfg.grid.L[k] = v.size() == 1 ? v[0] : v[k];
        if (!(cfg.grid.L[k] > 0.0)) doc.fail(e->line, "'L' entries must be positive");
      }
    }
  }

  // [weights.a], [weights.b]
  cfg.a = doc.has_section("weights.a") ? detail::parse_weight(doc, "weights.a", base)
                                       : default_weight_a(cfg.grid);
  cfg.b = doc.has_section("weights.b") ? detail::parse_weight(doc, "weights.b", base)
                                       : default_weight_b(cfg.grid);

  // [problem]
  if (auto* e = doc.find("problem", "q")) {
    cfg.q = ini::to_double(doc, *e, "q");
    if (!(cfg.q > 0.0 && cfg.q < 1.0)) doc.fail(e->line, "q must lie in (0,1)");
  }
  if (auto* e = doc.find("problem", "p")) {
    cfg.p = ini::to_double(doc, *e, "p");
    if (!(cfg.p > 1.0)) doc.fail(e->line, "p must be > 1");
  }
  if (!(cfg.p + 1.0 < cfg.make_grid().critical_exponent())) {
    auto const* e = doc.find("problem", "p");
    doc.fail(e ? e->line : doc.section_line("grid"), "p+1 must be < 2*");
  }
  if (auto* e = doc.find("problem", "lambda")) {
    std::string const v = e->value;
    if (v.rfind("auto:", 0) == 0) {
      cfg.lambda.automatic = true;
      ini::Entry tmp{ini::trim(v.substr(5)), e->line};
      cfg.lambda.value = ini::to_double(doc, tmp, "lambda");
    } else {
      cfg.lambda.automatic = false;
      cfg.lambda.value = ini::to_double(doc, *e, "lambda");
    }
    if (!(cfg.lambda.value > 0.0)) doc.fail(e->line, "lambda must be > 0");
  }

  // [solver]
  integer("solver", "max_iter", cfg.max_iterations, 1);
  num("solver", "residual_tol", cfg.tol.residual);
  num("solver", "root_tol", cfg.tol.root);
  integer("solver", "restarts", cfg.restarts, 0);
  integer("solver", "multistart", cfg.multistart, 0);
  integer("solver", "gradcheck_directions", cfg.gradcheck_directions, 1);
  integer("solver", "seed", cfg.seed, 0);
  if (!(cfg.tol.residual > 0.0) || !(cfg.tol.root > 0.0)) {
    doc.fail(doc.section_line("solver"), "tolerances must be positive");
  }

  // [output]
  if (auto* e = doc.find("output", "dir")) cfg.out_dir = e->value;
  num("output", "fibering_t_min", cfg.sampling.t_min);
  num("output", "fibering_t_max", cfg.sampling.t_max);
  integer("output", "fibering_samples", cfg.sampling.count, 2);
  if (!(cfg.sampling.t_min > 0.0 && cfg.sampling.t_max > cfg.sampling.t_min)) {
    doc.fail(doc.section_line("output"), "need 0 < fibering_t_min < fibering_t_max");
  }

  doc.reject_unknown({"phi", "grid", "weights.a", "weights.b", "problem", "solver", "output"});
  return cfg;
}

inline RunConfig load_config(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string(), path.parent_path());
}

inline PhiModel make_phi(PhiSpec const& spec) {
  switch (spec.kind) {
    case PhiKind::constant: return PhiModel::constant(spec.c);
    case PhiKind::stuart_example: return PhiModel::stuart_example(spec.A);
    case PhiKind::tabulated:
      try {
        return PhiModel(load_tabulated_phi(spec.file));
      } catch (std::invalid_argument const& e) {
        throw ConfigError(spec.file + ": " + e.what());
      } catch (std::runtime_error const& e) {
        throw ConfigError(e.what());
      }
  }
  throw ConfigError("unknown phi kind");
}

}  // namespace nehari
