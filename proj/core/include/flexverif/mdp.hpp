#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flexverif/expr.hpp"

namespace flexverif {

/// Sum tolerance for probability distributions.
inline constexpr double kProbTolerance = 1e-9;

/// Probability distribution over state indices. Entries are sorted by
/// target, strictly positive, and free of duplicates; construction via
/// make() merges duplicates and drops zero-probability branches.
struct Distribution {
  std::vector<std::pair<int, double>> entries;

  static Distribution make(std::vector<std::pair<int, double>> raw);
  double sum() const;
};

/// Finite-state MDP with action-labelled probabilistic transitions and an
/// atomic-proposition labelling. States and actions are dense indices;
/// transitions[s] holds (action, distribution) pairs sorted by action.
///
/// The model-language elaborator additionally fills the metadata block
/// (variable valuations, constants, per-action attributes) that constraint
/// expressions evaluate against. Hand-built models may leave it empty.
struct Mdp {
  int num_states = 0;
  int initial = 0;
  std::vector<std::string> actions;
  std::vector<std::vector<std::pair<int, Distribution>>> transitions;
  std::vector<std::string> props;
  std::vector<std::vector<int>> labeling;  // sorted prop indices per state
  bool restricted = false;

  // Metadata from elaboration.
  std::vector<std::string> state_var_names;
  std::vector<std::vector<int>> state_values;  // per state, per variable
  std::map<std::string, Value> constants;
  std::map<std::string, std::vector<double>> action_attrs;  // per action

  // For restricted models: index in the model this one was restricted from.
  std::vector<int> original_state;
  int stutter_action = -1;

  const Distribution* distribution(int state, int action) const;
  int prop_index(std::string_view name) const;  // -1 if absent
  bool state_has_prop(int state, int prop) const;
  std::string state_name(int state) const;
  std::string action_name(int action) const;
};

struct Violation {
  std::string invariant;
  int state = -1;
  int action = -1;
  std::string detail;
  std::string to_string(const Mdp& mdp) const;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string(const Mdp& mdp) const;
};

/// Checks the structural invariants: distribution sums within tolerance,
/// entries positive and duplicate-free, valid indices, deadlock freedom.
/// Violations are data, not failures.
ValidationReport validate(const Mdp& mdp);

/// States reachable from the initial state via positive-probability
/// transitions, in ascending index order.
std::vector<int> reachable(const Mdp& mdp);

/// Two-valued specification over (state, action) pairs. Either a generic
/// closure, an explicit table, or a conjunction of constraint expressions
/// over state variables, model constants and action attributes.
class SpecPredicate {
 public:
  using Fn = std::function<bool(const Mdp&, int state, int action)>;

  SpecPredicate();  // allows everything
  static SpecPredicate always();
  static SpecPredicate from_function(Fn fn);
  static SpecPredicate from_table(std::vector<std::vector<bool>> allow);
  static SpecPredicate from_constraints(std::vector<ExprPtr> conjuncts);

  /// Conjunction of this predicate with another.
  SpecPredicate and_with(const SpecPredicate& other) const;

  bool allows(const Mdp& mdp, int state, int action) const;
  const std::vector<ExprPtr>& constraints() const { return constraints_; }

  /// Pre-resolves constraint names against one model for fast repeated
  /// evaluation; self-contained (the predicate may be discarded), but the
  /// model must outlive it. Throws EvalError if a constraint references a
  /// name the model does not define.
  class Bound {
   public:
    bool allows(int state, int action) const;

   private:
    friend class SpecPredicate;
    const Mdp* mdp_ = nullptr;
    Fn fn_;
    std::vector<ExprPtr> bound_exprs_;
    // Slot layout: [variables..., constants..., attributes...]
    int num_vars_ = 0;
    std::vector<Value> const_values_;
    std::vector<const std::vector<double>*> attr_columns_;
    mutable std::vector<Value> scratch_;
    mutable int scratch_state_ = -1;
  };
  Bound bind(const Mdp& mdp) const;

 private:
  Fn fn_;                            // null unless closure/table form
  std::vector<ExprPtr> constraints_; // conjunction, may be empty
};

/// Fills per-action attribute columns from label -> value maps. Actions
/// match by exact name or, for elaborator-generated synchronization
/// variants ("label#k"), by the base label; unmatched actions get 0.
void attach_action_attributes(
    Mdp& mdp,
    const std::map<std::string, std::map<std::string, double>>& attrs);

enum class DeadlockMode { Error, Stutter };

/// Drops every transition the predicate disallows, trims to the states
/// reachable from the initial state, and reindexes densely (ascending
/// original index). Retained states with no enabled action either raise
/// DeadlockAfterRestriction or receive a probability-1 self-loop.
Mdp restrict(const Mdp& mdp, const SpecPredicate& f,
             DeadlockMode mode = DeadlockMode::Error);

}  // namespace flexverif
