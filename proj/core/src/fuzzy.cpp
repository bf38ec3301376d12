#include "flexverif/fuzzy.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace flexverif {

MembershipFn MembershipFn::sigmoid(double center, double slope) {
  if (!(slope > 0))
    throw ConfigError("sigmoid slope must be positive");
  MembershipFn f;
  f.shape_ = Shape::Sigmoid;
  f.params_ = {center, slope};
  return f;
}

MembershipFn MembershipFn::linear_ramp(double full, double zero) {
  if (!(zero > full))
    throw ConfigError("linear_ramp requires full < zero");
  MembershipFn f;
  f.shape_ = Shape::LinearRamp;
  f.params_ = {full, zero};
  return f;
}

MembershipFn MembershipFn::piecewise_linear(
    std::vector<std::pair<double, double>> points) {
  if (points.empty())
    throw ConfigError("piecewise_linear requires at least one point");
  for (size_t i = 1; i < points.size(); ++i)
    if (!(points[i - 1].first < points[i].first))
      throw ConfigError("piecewise_linear points must be sorted by x");
  for (const auto& [x, mu] : points)
    if (mu < 0.0 || mu > 1.0)
      throw ConfigError(
          fmt::format("piecewise_linear membership {} outside [0,1]", mu));
  MembershipFn f;
  f.shape_ = Shape::PiecewiseLinear;
  f.points_ = std::move(points);
  return f;
}

MembershipFn MembershipFn::constant(double v) {
  if (v < 0.0 || v > 1.0)
    throw ConfigError(fmt::format("constant membership {} outside [0,1]", v));
  MembershipFn f;
  f.shape_ = Shape::Constant;
  f.params_ = {v};
  return f;
}

double MembershipFn::operator()(double x) const {
  double mu = 0.0;
  switch (shape_) {
    case Shape::Sigmoid: {
      double c = params_[0], k = params_[1];
      mu = 1.0 / (1.0 + std::exp(k * (x - c)));
      break;
    }
    case Shape::LinearRamp: {
      double a = params_[0], b = params_[1];
      if (x <= a)
        mu = 1.0;
      else if (x >= b)
        mu = 0.0;
      else
        mu = (b - x) / (b - a);
      break;
    }
    case Shape::PiecewiseLinear: {
      if (x <= points_.front().first) {
        mu = points_.front().second;
      } else if (x >= points_.back().first) {
        mu = points_.back().second;
      } else {
        for (size_t i = 1; i < points_.size(); ++i) {
          if (x <= points_[i].first) {
            double x0 = points_[i - 1].first, y0 = points_[i - 1].second;
            double x1 = points_[i].first, y1 = points_[i].second;
            mu = y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            break;
          }
        }
      }
      break;
    }
    case Shape::Constant:
      mu = params_[0];
      break;
  }
  return std::min(1.0, std::max(0.0, mu));
}

double TNorm::apply(double a, double b) const {
  switch (kind) {
    case TNormKind::Min:
      return std::min(a, b);
    case TNormKind::Product:
      return a * b;
    case TNormKind::Lukasiewicz:
      return std::max(0.0, a + b - 1.0);
  }
  return 0.0;
}

double conjoin(std::span<const double> values, TNorm t) {
  if (values.empty()) throw EmptyInput("conjoin over no memberships");
  double acc = values[0];
  for (size_t i = 1; i < values.size(); ++i) acc = t.apply(acc, values[i]);
  return acc;
}

namespace {

int find_dimension(const SpecLattice& lattice, const std::string& name) {
  for (size_t i = 0; i < lattice.dimensions.size(); ++i)
    if (lattice.dimensions[i].name == name) return static_cast<int>(i);
  return -1;
}

/// Reachable-mode feature of a pair for a dimension-sourced requirement:
/// the feature of the strongest chain value whose constraint admits the
/// pair. Pairs admitted by no value cannot exist in the restricted model.
double pair_feature(const DesignDimension& dim,
                    const std::vector<SpecPredicate::Bound>& value_preds,
                    int state, int action) {
  for (size_t j = 0; j < value_preds.size(); ++j)
    if (value_preds[j].allows(state, action)) return dim.feature_at(static_cast<int>(j));
  return dim.feature_at(static_cast<int>(value_preds.size()) - 1);
}

}  // namespace

double mu_spec(const VagueRequirement& req, const SpecPoint& point,
               const SpecLattice& lattice, MuMode mode,
               const Mdp* restricted) {
  constexpr std::string_view kAttrPrefix = "attr:";
  bool attr_source = req.feature_source.rfind(kAttrPrefix, 0) == 0;

  if (mode == MuMode::Strict) {
    if (attr_source)
      throw ConfigError(fmt::format(
          "requirement '{}' reads a raw attribute; use reachable mode",
          req.name));
    int d = find_dimension(lattice, req.feature_source);
    if (d < 0)
      throw ConfigError(fmt::format(
          "requirement '{}' references unknown dimension '{}'", req.name,
          req.feature_source));
    if (!lattice.contains(point))
      throw DimensionMismatch("point does not lie in the lattice");
    // Constraint generation is monotone, so the permitted feature values at
    // chain index i are exactly the features of indices 0..i.
    const DesignDimension& dim = lattice.dimensions[d];
    double inf = 1.0;
    for (int j = 0; j <= point.indices[d]; ++j)
      inf = std::min(inf, req.fn(dim.feature_at(j)));
    return inf;
  }

  if (restricted == nullptr)
    throw MissingMdp(fmt::format(
        "reachable-mode membership of '{}' requires the restricted model",
        req.name));

  const Mdp& mdp = *restricted;
  double inf = 1.0;
  if (attr_source) {
    std::string attr(req.feature_source.substr(kAttrPrefix.size()));
    auto it = mdp.action_attrs.find(attr);
    if (it == mdp.action_attrs.end())
      throw ConfigError(fmt::format(
          "requirement '{}' reads attribute '{}' the model does not define",
          req.name, attr));
    for (int s = 0; s < mdp.num_states; ++s)
      for (const auto& [a, dist] : mdp.transitions[s]) {
        if (a == mdp.stutter_action) continue;
        inf = std::min(inf, req.fn(it->second[a]));
      }
    return inf;
  }

  int d = find_dimension(lattice, req.feature_source);
  if (d < 0)
    throw ConfigError(fmt::format(
        "requirement '{}' references unknown dimension '{}'", req.name,
        req.feature_source));
  const DesignDimension& dim = lattice.dimensions[d];
  if (dim.kind == DimensionKind::Horizon) {
    // Horizon dimensions have no pair-level footprint; fall back to the
    // analytic value.
    return mu_spec(req, point, lattice, MuMode::Strict, nullptr);
  }
  // Only this dimension's fragment matters for the feature probe.
  SpecLattice single{{dim}};
  std::vector<SpecPredicate::Bound> value_preds;
  value_preds.reserve(dim.values.size());
  for (size_t j = 0; j < dim.values.size(); ++j) {
    SpecPoint sp{{static_cast<int>(j)}};
    value_preds.push_back(materialize(sp, single).predicate.bind(mdp));
  }
  for (int s = 0; s < mdp.num_states; ++s)
    for (const auto& [a, dist] : mdp.transitions[s]) {
      if (a == mdp.stutter_action) continue;
      inf = std::min(inf, req.fn(pair_feature(dim, value_preds, s, a)));
    }
  return inf;
}

bool check_normalized(const VagueRequirement& req,
                      std::span<const double> domain) {
  double sup = 0.0;
  for (double x : domain) sup = std::max(sup, req.fn(x));
  return sup >= 1.0 - 1e-9;
}

}  // namespace flexverif
