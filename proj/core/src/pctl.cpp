#include "flexverif/pctl.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>

#include "token_stream.hpp"

namespace flexverif {

StateSetExpr StateSetExpr::truth() { return StateSetExpr{}; }

StateSetExpr StateSetExpr::atom(std::string label) {
  StateSetExpr e;
  e.kind = Kind::Label;
  e.label = std::move(label);
  return e;
}

StateSetExpr StateSetExpr::negation(StateSetExpr inner) {
  StateSetExpr e;
  e.kind = Kind::Not;
  e.lhs = std::make_shared<StateSetExpr>(std::move(inner));
  return e;
}

StateSetExpr StateSetExpr::conj(StateSetExpr a, StateSetExpr b) {
  StateSetExpr e;
  e.kind = Kind::And;
  e.lhs = std::make_shared<StateSetExpr>(std::move(a));
  e.rhs = std::make_shared<StateSetExpr>(std::move(b));
  return e;
}

StateSetExpr StateSetExpr::disj(StateSetExpr a, StateSetExpr b) {
  StateSetExpr e;
  e.kind = Kind::Or;
  e.lhs = std::make_shared<StateSetExpr>(std::move(a));
  e.rhs = std::make_shared<StateSetExpr>(std::move(b));
  return e;
}

std::string StateSetExpr::to_string() const {
  switch (kind) {
    case Kind::True:
      return "true";
    case Kind::Label:
      return "\"" + label + "\"";
    case Kind::Not:
      return "!" + lhs->to_string();
    case Kind::And:
      return "(" + lhs->to_string() + " & " + rhs->to_string() + ")";
    case Kind::Or:
      return "(" + lhs->to_string() + " | " + rhs->to_string() + ")";
  }
  return "?";
}

namespace {

void eval_set(const Mdp& mdp, const StateSetExpr& set, std::vector<bool>& out) {
  switch (set.kind) {
    case StateSetExpr::Kind::True:
      out.assign(mdp.num_states, true);
      return;
    case StateSetExpr::Kind::Label: {
      int prop = mdp.prop_index(set.label);
      if (prop < 0)
        throw UnknownLabel("unknown label \"" + set.label + "\"");
      out.assign(mdp.num_states, false);
      for (int s = 0; s < mdp.num_states; ++s)
        if (mdp.state_has_prop(s, prop)) out[s] = true;
      return;
    }
    case StateSetExpr::Kind::Not: {
      eval_set(mdp, *set.lhs, out);
      for (int s = 0; s < mdp.num_states; ++s) out[s] = !out[s];
      return;
    }
    case StateSetExpr::Kind::And:
    case StateSetExpr::Kind::Or: {
      std::vector<bool> rhs;
      eval_set(mdp, *set.lhs, out);
      eval_set(mdp, *set.rhs, rhs);
      for (int s = 0; s < mdp.num_states; ++s)
        out[s] = set.kind == StateSetExpr::Kind::And ? (out[s] && rhs[s])
                                                     : (out[s] || rhs[s]);
      return;
    }
  }
}

// Predecessor lists: for each state, the (state, action) pairs that can move
// into it with positive probability.
std::vector<std::vector<std::pair<int, int>>> predecessors(const Mdp& mdp) {
  std::vector<std::vector<std::pair<int, int>>> pred(mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s)
    for (const auto& [a, dist] : mdp.transitions[s])
      for (const auto& [t, p] : dist.entries) pred[t].push_back({s, a});
  return pred;
}

// States that can reach `targets` via a path whose interior stays in `mask`.
// Targets themselves are included regardless of the mask.
std::vector<bool> backward_reach(
    const Mdp& mdp, const std::vector<std::vector<std::pair<int, int>>>& pred,
    const std::vector<bool>& targets, const std::vector<bool>& mask) {
  std::vector<bool> reach(mdp.num_states, false);
  std::deque<int> queue;
  for (int s = 0; s < mdp.num_states; ++s)
    if (targets[s]) {
      reach[s] = true;
      queue.push_back(s);
    }
  while (!queue.empty()) {
    int t = queue.front();
    queue.pop_front();
    for (const auto& [s, a] : pred[t]) {
      if (!reach[s] && mask[s]) {
        reach[s] = true;
        queue.push_back(s);
      }
    }
  }
  return reach;
}

}  // namespace

std::vector<bool> resolve_state_set(const Mdp& mdp, const StateSetExpr& set) {
  std::vector<bool> out;
  eval_set(mdp, set, out);
  return out;
}

QualitativeSets qualitative_until(const Mdp& mdp,
                                  const std::vector<bool>& left,
                                  const std::vector<bool>& right,
                                  Objective objective) {
  const int n = mdp.num_states;
  auto pred = predecessors(mdp);
  // Interior of an until path: left-states that are not yet right.
  std::vector<bool> interior(n);
  for (int s = 0; s < n; ++s) interior[s] = left[s] && !right[s];

  QualitativeSets q;
  q.prob0.assign(n, false);
  q.prob1.assign(n, false);

  if (objective == Objective::Max) {
    // Pmax = 0 exactly when no path reaches `right` through the interior.
    std::vector<bool> can_reach = backward_reach(mdp, pred, right, interior);
    for (int s = 0; s < n; ++s) q.prob0[s] = !can_reach[s];

    // Prob1E greatest fixpoint: u stabilizes on the states from which some
    // policy reaches `right` almost surely without leaving u.
    std::vector<bool> u(n, true);
    for (;;) {
      std::vector<bool> r = right;
      for (;;) {
        bool changed = false;
        for (int s = 0; s < n; ++s) {
          if (r[s] || !interior[s]) continue;
          for (const auto& [a, dist] : mdp.transitions[s]) {
            bool stays = true, hits = false;
            for (const auto& [t, p] : dist.entries) {
              if (!u[t]) stays = false;
              if (r[t]) hits = true;
            }
            if (stays && hits) {
              r[s] = true;
              changed = true;
              break;
            }
          }
        }
        if (!changed) break;
      }
      if (r == u) break;
      u = std::move(r);
    }
    q.prob1 = u;
  } else {
    // Pmin = 0 exactly when some policy confines the run to non-right
    // states forever (left-states need an action staying inside; states
    // outside the until's reach are absorbing failures).
    std::vector<bool> z(n);
    for (int s = 0; s < n; ++s) z[s] = !right[s];
    for (;;) {
      bool changed = false;
      for (int s = 0; s < n; ++s) {
        if (!z[s] || !interior[s]) continue;
        bool has_staying_action = false;
        for (const auto& [a, dist] : mdp.transitions[s]) {
          bool stays = true;
          for (const auto& [t, p] : dist.entries)
            if (!z[t]) {
              stays = false;
              break;
            }
          if (stays) {
            has_staying_action = true;
            break;
          }
        }
        if (!has_staying_action) {
          z[s] = false;
          changed = true;
        }
      }
      if (!changed) break;
    }
    q.prob0 = z;

    // Pmin < 1 exactly when the prob0 region is reachable through the
    // interior; complementing gives the Prob1A set.
    std::vector<bool> bad_reach = backward_reach(mdp, pred, z, interior);
    for (int s = 0; s < n; ++s) q.prob1[s] = !bad_reach[s];
  }

  // `right` states always have probability 1; non-left non-right states 0.
  for (int s = 0; s < n; ++s) {
    if (right[s]) {
      q.prob1[s] = true;
      q.prob0[s] = false;
    } else if (!left[s]) {
      q.prob0[s] = true;
      q.prob1[s] = false;
    }
  }
  return q;
}

ProbVector solve_until(const Mdp& mdp, const Formula& formula,
                       const SolveOptions& options) {
  const int n = mdp.num_states;
  std::vector<bool> left = resolve_state_set(mdp, formula.left);
  std::vector<bool> right = resolve_state_set(mdp, formula.right);
  const bool maximize = formula.objective == Objective::Max;

  ProbVector result;
  result.values.assign(n, 0.0);

  auto bellman = [&](const std::vector<double>& v, int s) {
    if (mdp.transitions[s].empty()) return 0.0;  // deadlock: cannot progress
    bool first = true;
    double best = 0.0;
    for (const auto& [a, dist] : mdp.transitions[s]) {
      double q = 0.0;
      for (const auto& [t, p] : dist.entries) q += p * v[t];
      if (first || (maximize ? q > best : q < best)) best = q;
      first = false;
    }
    return std::min(1.0, std::max(0.0, best));
  };

  if (formula.bound) {
    // Exactly `bound` dynamic-programming steps from the right-set indicator.
    std::vector<double> v(n, 0.0);
    for (int s = 0; s < n; ++s)
      if (right[s]) v[s] = 1.0;
    std::vector<double> next(n, 0.0);
    for (int step = 0; step < *formula.bound; ++step) {
      for (int s = 0; s < n; ++s) {
        if (right[s])
          next[s] = 1.0;
        else if (!left[s])
          next[s] = 0.0;
        else
          next[s] = bellman(v, s);
      }
      std::swap(v, next);
    }
    result.values = std::move(v);
    return result;
  }

  QualitativeSets q = qualitative_until(mdp, left, right, formula.objective);
  std::vector<double> v(n, 0.0);
  std::vector<int> unknown;
  for (int s = 0; s < n; ++s) {
    if (q.prob1[s])
      v[s] = 1.0;
    else if (!q.prob0[s])
      unknown.push_back(s);
  }

  std::vector<double> next = v;
  double residual = 0.0;
  for (long iter = 0; iter < options.max_iters; ++iter) {
    residual = 0.0;
    for (int s : unknown) {
      double nv = bellman(v, s);
      residual = std::max(residual, std::abs(nv - v[s]));
      next[s] = nv;
    }
    for (int s : unknown) v[s] = next[s];
    if (residual < options.tolerance) {
      result.values = std::move(v);
      return result;
    }
  }
  if (!unknown.empty())
    throw NonConvergence(
        fmt::format("value iteration did not converge below {} within {} "
                    "iterations (residual {})",
                    options.tolerance, options.max_iters, residual),
        residual, options.max_iters);
  result.values = std::move(v);
  return result;
}

Formula parse_query(std::string_view query) {
  detail::TokenStream ts(query);
  auto fail = [&](const std::string& msg) -> void {
    throw QuerySyntaxError(
        fmt::format("query syntax error: {} (in: {})", msg, query));
  };

  Formula f;
  if (ts.accept_ident("Pmax"))
    f.objective = Objective::Max;
  else if (ts.accept_ident("Pmin"))
    f.objective = Objective::Min;
  else
    fail("expected Pmax=? or Pmin=?");
  if (!ts.accept_punct("=")) fail("expected '=?' after Pmax/Pmin");
  if (!ts.accept_punct("?")) fail("expected '=?' after Pmax/Pmin");
  if (!ts.accept_punct("[")) fail("expected '['");

  auto parse_atom = [&]() -> StateSetExpr {
    if (ts.accept_ident("true")) return StateSetExpr::truth();
    if (ts.accept_punct("!")) {
      if (ts.peek().kind != detail::TokKind::String)
        fail("expected quoted label after '!'");
      return StateSetExpr::negation(StateSetExpr::atom(ts.next().text));
    }
    if (ts.peek().kind == detail::TokKind::String)
      return StateSetExpr::atom(ts.next().text);
    fail("expected quoted label, !\"label\" or true");
    return StateSetExpr::truth();  // unreachable
  };

  f.left = parse_atom();
  if (!ts.accept_ident("U")) fail("expected 'U'");
  if (ts.accept_punct("<=")) {
    if (ts.peek().kind != detail::TokKind::Int) fail("expected step bound");
    long long b = ts.next().int_value;
    if (b < 0) fail("negative step bound");
    f.bound = static_cast<int>(b);
  }
  f.right = parse_atom();
  if (!ts.accept_punct("]")) fail("expected ']'");
  if (!ts.done()) fail("trailing input");
  return f;
}

ProbVector check_query(const Mdp& mdp, std::string_view query) {
  return solve_until(mdp, parse_query(query));
}

Policy extract_policy(const Mdp& mdp, const Formula& formula,
                      const SolveOptions& options) {
  if (formula.bound)
    throw Error("extract_policy supports unbounded formulas only");
  ProbVector solution = solve_until(mdp, formula, options);
  const auto& v = solution.values;
  std::vector<bool> left = resolve_state_set(mdp, formula.left);
  std::vector<bool> right = resolve_state_set(mdp, formula.right);
  const bool maximize = formula.objective == Objective::Max;

  Policy policy;
  policy.choice.assign(mdp.num_states, -1);
  for (int s = 0; s < mdp.num_states; ++s) {
    if (mdp.transitions[s].empty()) continue;
    if (right[s] || !left[s]) {
      // Value does not depend on the choice; lowest action index.
      policy.choice[s] = mdp.transitions[s].front().first;
      continue;
    }
    double best = maximize ? -1.0 : 2.0;
    int best_action = -1;
    for (const auto& [a, dist] : mdp.transitions[s]) {
      double q = 0.0;
      for (const auto& [t, p] : dist.entries) q += p * v[t];
      if (maximize ? q > best : q < best) {
        best = q;
        best_action = a;
      }
    }
    policy.choice[s] = best_action;
  }
  return policy;
}

}  // namespace flexverif
