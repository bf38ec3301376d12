#pragma once

// Test-support oracles, independent of the solver implementation paths they
// check: memoryless-policy enumeration backed by a dense linear solve, a
// memoization-free bounded expectimax, random model/predicate generators and
// a small DOT reader.

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "flexverif/lattice.hpp"
#include "flexverif/mdp.hpp"
#include "flexverif/pctl.hpp"

namespace fvtest {

using flexverif::Mdp;

struct RandomMdpOptions {
  int max_states = 4;
  int max_actions = 2;
  int max_branches = 3;
  double left_bias = 0.8;   // probability a state satisfies the left set
  double right_bias = 0.25; // probability a state satisfies the right set
};

/// Deadlock-free MDP with props {"a", "b"} labelling the left/right sets.
Mdp random_mdp(std::mt19937_64& rng, const RandomMdpOptions& opts = {});

/// Until probability of one memoryless policy: graph zero-classification,
/// then a dense linear solve of the induced chain.
std::vector<double> chain_until_probs(const Mdp& mdp,
                                      const std::vector<int>& choice,
                                      const std::vector<bool>& left,
                                      const std::vector<bool>& right);

/// Pointwise optimum over every memoryless policy (exhaustive enumeration).
std::vector<double> policy_enumeration_until(const Mdp& mdp,
                                             const std::vector<bool>& left,
                                             const std::vector<bool>& right,
                                             flexverif::Objective objective);

/// Bounded until by explicit tree recursion over action sequences and
/// paths; no memoization, no qualitative precomputation.
double expectimax_bounded(const Mdp& mdp, int state,
                          const std::vector<bool>& left,
                          const std::vector<bool>& right, int bound,
                          flexverif::Objective objective);

/// Pair (weaker, stronger) of explicit-table predicates with
/// weaker >= stronger pointwise.
std::pair<flexverif::SpecPredicate, flexverif::SpecPredicate>
random_monotone_predicate_pair(std::mt19937_64& rng, const Mdp& mdp);

// ---- DOT reader ------------------------------------------------------------

struct DotNode {
  std::string label;
  std::string color;  // empty = default
};

struct DotGraph {
  std::map<std::string, DotNode> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
};

/// Parses the digraph shape this project emits; throws flexverif::Error on
/// malformed text.
DotGraph parse_dot(const std::string& text);

// ---- synthetic lattices ----------------------------------------------------

struct SyntheticStudy {
  flexverif::SpecLattice lattice;
  std::map<std::vector<int>, double> p_table;   // monotone nondecreasing
  std::map<std::vector<int>, double> mu_table;  // monotone nonincreasing
};

/// Random product lattice (2-4 dimensions, chains of 2-6) with monotone
/// synthetic probability and membership tables.
SyntheticStudy random_synthetic_study(std::mt19937_64& rng);

}  // namespace fvtest
