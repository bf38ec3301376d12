#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flexverif/mdp.hpp"

namespace flexverif {

/// Boolean combination of atomic-proposition labels identifying a state set.
struct StateSetExpr {
  enum class Kind { True, Label, Not, And, Or };
  Kind kind = Kind::True;
  std::string label;
  std::shared_ptr<const StateSetExpr> lhs, rhs;

  static StateSetExpr truth();
  static StateSetExpr atom(std::string label);
  static StateSetExpr negation(StateSetExpr inner);
  static StateSetExpr conj(StateSetExpr a, StateSetExpr b);
  static StateSetExpr disj(StateSetExpr a, StateSetExpr b);
  std::string to_string() const;
};

enum class Objective { Max, Min };

/// Probabilistic until: left U right, optionally step-bounded, optimized
/// over all memoryless policies.
struct Formula {
  StateSetExpr left = StateSetExpr::truth();
  StateSetExpr right;
  std::optional<int> bound;
  Objective objective = Objective::Max;
};

struct ProbVector {
  std::vector<double> values;  // one per state
  double at_initial(const Mdp& mdp) const { return values[mdp.initial]; }
};

struct Policy {
  std::vector<int> choice;  // action index per state
};

struct SolveOptions {
  double tolerance = 1e-8;
  long max_iters = 1'000'000;
};

/// Evaluates a state-set expression; throws UnknownLabel.
std::vector<bool> resolve_state_set(const Mdp& mdp, const StateSetExpr& set);

/// States with exact probability 0 / 1 for the given until objective,
/// computed by graph analysis alone.
struct QualitativeSets {
  std::vector<bool> prob0, prob1;
};
QualitativeSets qualitative_until(const Mdp& mdp,
                                  const std::vector<bool>& left,
                                  const std::vector<bool>& right,
                                  Objective objective);

/// Optimal until probabilities for every state. Unbounded formulas get the
/// qualitative 0/1 precomputation followed by value iteration (absolute-
/// change stopping criterion: the residual is bounded, not the true error);
/// bounded formulas run exactly `bound` dynamic-programming steps.
/// Throws NonConvergence after max_iters and UnknownLabel for bad labels.
ProbVector solve_until(const Mdp& mdp, const Formula& formula,
                       const SolveOptions& options = {});

/// Parses `("Pmax=?"|"Pmin=?") "[" atom "U" ("<=" INT)? atom "]"` where
/// atom := quoted label | "!" quoted label | "true".
Formula parse_query(std::string_view query);

/// parse_query + solve_until with default options.
ProbVector check_query(const Mdp& mdp, std::string_view query);

/// Memoryless policy attaining the Bellman optimum of the converged value
/// vector; ties resolved toward the lowest action index. Unbounded
/// formulas only.
Policy extract_policy(const Mdp& mdp, const Formula& formula,
                      const SolveOptions& options = {});

}  // namespace flexverif
