#include "flexverif/lattice.hpp"

#include <fmt/format.h>

#include <cmath>

#include "flexverif/expr.hpp"

namespace flexverif {

long long SpecLattice::size() const {
  long long n = 1;
  for (const auto& d : dimensions) n *= static_cast<long long>(d.values.size());
  return n;
}

SpecPoint SpecLattice::strongest() const {
  return SpecPoint{std::vector<int>(dimensions.size(), 0)};
}

SpecPoint SpecLattice::weakest() const {
  SpecPoint p;
  for (const auto& d : dimensions)
    p.indices.push_back(static_cast<int>(d.values.size()) - 1);
  return p;
}

bool SpecLattice::contains(const SpecPoint& p) const {
  if (p.indices.size() != dimensions.size()) return false;
  for (size_t i = 0; i < dimensions.size(); ++i)
    if (p.indices[i] < 0 ||
        p.indices[i] >= static_cast<int>(dimensions[i].values.size()))
      return false;
  return true;
}

std::vector<SpecPoint> SpecLattice::all_points() const {
  std::vector<SpecPoint> out;
  out.reserve(static_cast<size_t>(size()));
  SpecPoint p{std::vector<int>(dimensions.size(), 0)};
  if (dimensions.empty()) return out;
  for (;;) {
    out.push_back(p);
    int d = static_cast<int>(dimensions.size()) - 1;
    while (d >= 0) {
      if (++p.indices[d] < static_cast<int>(dimensions[d].values.size())) break;
      p.indices[d] = 0;
      --d;
    }
    if (d < 0) break;
  }
  return out;
}

long long SpecLattice::rank(const SpecPoint& p) const {
  long long r = 0;
  for (size_t i = 0; i < dimensions.size(); ++i)
    r = r * static_cast<long long>(dimensions[i].values.size()) + p.indices[i];
  return r;
}

bool weaker_eq(const SpecPoint& f, const SpecPoint& g) {
  if (f.indices.size() != g.indices.size())
    throw DimensionMismatch(
        fmt::format("comparing points of arity {} and {}", f.indices.size(),
                    g.indices.size()));
  for (size_t i = 0; i < f.indices.size(); ++i)
    if (f.indices[i] < g.indices[i]) return false;
  return true;
}

namespace {

std::string format_value(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15)
    return fmt::format("{}", static_cast<long long>(v));
  return fmt::format("{}", v);
}

/// Substitutes $v in a constraint template with a literal value.
std::string instantiate(const std::string& tmpl, double value) {
  std::string out;
  size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '$' && i + 1 < tmpl.size() && tmpl[i + 1] == 'v') {
      out += "(" + format_value(value) + ")";
      i += 2;
    } else {
      out += tmpl[i++];
    }
  }
  return out;
}

}  // namespace

Materialized materialize(const SpecPoint& point, const SpecLattice& lattice) {
  if (!lattice.contains(point))
    throw DimensionMismatch("point does not lie in the lattice");
  Materialized m;
  std::vector<ExprPtr> conjuncts;
  for (size_t i = 0; i < lattice.dimensions.size(); ++i) {
    const DesignDimension& dim = lattice.dimensions[i];
    double value = dim.values[point.indices[i]];
    if (dim.kind == DimensionKind::Horizon) {
      int steps;
      if (dim.constraint.empty()) {
        steps = static_cast<int>(std::llround(value));
      } else {
        ExprPtr e = parse_expression(instantiate(dim.constraint, value));
        Value v = eval_with(e, {});
        if (!v.is_numeric())
          throw ConfigError(fmt::format(
              "horizon expression of dimension '{}' is not numeric",
              dim.name));
        steps = static_cast<int>(std::llround(v.as_number()));
      }
      if (steps < 0)
        throw ConfigError(
            fmt::format("negative horizon in dimension '{}'", dim.name));
      m.horizon = steps;
    } else {
      if (dim.constraint.empty())
        throw ConfigError(fmt::format(
            "guard dimension '{}' has no constraint template", dim.name));
      conjuncts.push_back(
          parse_expression(instantiate(dim.constraint, value)));
    }
  }
  m.predicate = SpecPredicate::from_constraints(std::move(conjuncts));
  return m;
}

std::vector<std::pair<SpecPoint, SpecPoint>> hasse_edges(
    const SpecLattice& lattice) {
  std::vector<std::pair<SpecPoint, SpecPoint>> edges;
  for (const SpecPoint& p : lattice.all_points()) {
    for (size_t d = 0; d < lattice.dimensions.size(); ++d) {
      if (p.indices[d] + 1 <
          static_cast<int>(lattice.dimensions[d].values.size())) {
        SpecPoint weaker = p;
        ++weaker.indices[d];
        edges.emplace_back(p, weaker);
      }
    }
  }
  return edges;
}

std::string point_id(const SpecPoint& p) {
  std::string id = "f";
  for (int i : p.indices) id += fmt::format("_{}", i + 1);
  return id;
}

std::string point_label(const SpecPoint& p, const SpecLattice& lattice) {
  std::string label = "f_{";
  for (size_t i = 0; i < p.indices.size(); ++i) {
    if (i) label += ",";
    label += format_value(lattice.dimensions[i].values[p.indices[i]]);
  }
  return label + "}";
}

std::string to_dot(const SpecLattice& lattice,
                   const std::map<SpecPoint, NodeStyle>& annotations) {
  std::string out = "digraph spec_lattice {\n  rankdir=BT;\n  node [shape=box];\n";
  for (const SpecPoint& p : lattice.all_points()) {
    std::string label = point_label(p, lattice);
    std::string color;
    auto it = annotations.find(p);
    if (it != annotations.end()) {
      if (!it->second.annotation.empty()) label += ": " + it->second.annotation;
      color = it->second.color;
    }
    out += fmt::format("  {} [label=\"{}\"", point_id(p), label);
    if (!color.empty())
      out += fmt::format(", color={}, fontcolor={}", color, color);
    out += "];\n";
  }
  for (const auto& [stronger, weaker] : hasse_edges(lattice))
    out += fmt::format("  {} -> {};\n", point_id(weaker), point_id(stronger));
  out += "}\n";
  return out;
}

}  // namespace flexverif
