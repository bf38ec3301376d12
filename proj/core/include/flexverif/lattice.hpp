#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flexverif/mdp.hpp"

namespace flexverif {

enum class DimensionKind { ActionGuard, StateGuard, Horizon };

/// One ordered chain of design-constraint values. Index 0 is the strongest
/// (most restrictive) setting; ascending indices weaken the constraint, so
/// for guard kinds the generated predicate admits a growing set of pairs.
struct DesignDimension {
  std::string name;
  DimensionKind kind = DimensionKind::ActionGuard;
  std::vector<double> values;
  /// Constraint template over state variables, model constants and action
  /// attributes with `$v` as the value placeholder. For horizon dimensions
  /// it is a constant expression giving the step bound (empty: the value
  /// itself).
  std::string constraint;
  /// Optional per-value feature feeding fuzzy membership (empty: values).
  std::vector<double> feature;

  double feature_at(int index) const {
    return feature.empty() ? values[index] : feature[index];
  }
};

/// Point of the product-of-chains family: one chain index per dimension.
struct SpecPoint {
  std::vector<int> indices;
  bool operator==(const SpecPoint&) const = default;
  bool operator<(const SpecPoint& o) const { return indices < o.indices; }
};

struct SpecLattice {
  std::vector<DesignDimension> dimensions;

  long long size() const;
  SpecPoint strongest() const;
  SpecPoint weakest() const;
  bool contains(const SpecPoint& p) const;
  /// All points in lexicographic index order.
  std::vector<SpecPoint> all_points() const;
  /// Lexicographic rank of a point.
  long long rank(const SpecPoint& p) const;
};

/// f is a weakening of g: f admits every pair g admits, i.e. every index
/// of f is >= the corresponding index of g. Throws DimensionMismatch.
bool weaker_eq(const SpecPoint& f, const SpecPoint& g);

struct Materialized {
  SpecPredicate predicate;     // conjunction of the guard-kind fragments
  std::optional<int> horizon;  // from the horizon-kind dimension, if any
};

/// Instantiates the constraint templates of a point. The predicate is
/// model-independent until bound; the horizon is evaluated immediately.
Materialized materialize(const SpecPoint& point, const SpecLattice& lattice);

/// Covering pairs of the product order: points differing by +1 in exactly
/// one coordinate, returned as (stronger, weaker).
std::vector<std::pair<SpecPoint, SpecPoint>> hasse_edges(
    const SpecLattice& lattice);

struct NodeStyle {
  std::string annotation;  // appended to the node label after ": "
  std::string color;       // empty = default
};

/// DOT digraph of the Hasse diagram, edges directed weaker -> stronger with
/// rankdir=BT so stronger specifications render on top. Node ids are
/// "f_<i>_<j>_..." over 1-based indices; labels show the dimension values.
std::string to_dot(const SpecLattice& lattice,
                   const std::map<SpecPoint, NodeStyle>& annotations);

std::string point_id(const SpecPoint& p);
std::string point_label(const SpecPoint& p, const SpecLattice& lattice);

}  // namespace flexverif
