#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flexverif/lattice.hpp"
#include "flexverif/mdp.hpp"

namespace flexverif {

/// Membership shape mapping a feature value into [0,1].
class MembershipFn {
 public:
  enum class Shape { Sigmoid, LinearRamp, PiecewiseLinear, Constant };

  /// 1 / (1 + exp(slope * (x - center))); decreasing for slope > 0.
  static MembershipFn sigmoid(double center, double slope);
  /// 1 up to `full`, 0 from `zero` on, linear in between.
  static MembershipFn linear_ramp(double full, double zero);
  /// Linear interpolation through (x, mu) points, clamped at the ends.
  static MembershipFn piecewise_linear(
      std::vector<std::pair<double, double>> points);
  static MembershipFn constant(double v);

  double operator()(double x) const;

  Shape shape() const { return shape_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<std::pair<double, double>>& points() const {
    return points_;
  }

 private:
  Shape shape_ = Shape::Constant;
  std::vector<double> params_;  // shape-dependent
  std::vector<std::pair<double, double>> points_;
};

/// A vague requirement: a normalized fuzzy set over the feature values fed
/// by one design dimension (feature_source = dimension name) or a raw
/// action attribute (feature_source = "attr:<name>").
struct VagueRequirement {
  std::string name;
  MembershipFn fn;
  std::string feature_source;
};

enum class TNormKind { Min, Product, Lukasiewicz };

struct TNorm {
  TNormKind kind = TNormKind::Min;
  double apply(double a, double b) const;
};

/// Pairwise fold of the t-norm over the inputs; throws EmptyInput.
double conjoin(std::span<const double> values, TNorm t);

enum class MuMode { Strict, Reachable };

/// Satisfaction degree of a specification: the infimum membership over its
/// permissible pairs. Strict mode evaluates analytically over the permitted
/// feature values of the source dimension; reachable mode takes the infimum
/// over the reachable pairs of the restricted model (required for
/// "attr:"-sourced requirements). Throws MissingMdp in reachable mode
/// without a model.
double mu_spec(const VagueRequirement& req, const SpecPoint& point,
               const SpecLattice& lattice, MuMode mode = MuMode::Strict,
               const Mdp* restricted = nullptr);

/// True iff the supremum of the membership over the domain reaches 1
/// within 1e-9.
bool check_normalized(const VagueRequirement& req,
                      std::span<const double> domain);

}  // namespace flexverif
