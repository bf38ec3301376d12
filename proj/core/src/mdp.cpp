#include "flexverif/mdp.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

namespace flexverif {

Distribution Distribution::make(std::vector<std::pair<int, double>> raw) {
  std::map<int, double> merged;
  for (const auto& [target, p] : raw) {
    if (p == 0.0) continue;
    merged[target] += p;
  }
  Distribution d;
  d.entries.assign(merged.begin(), merged.end());
  return d;
}

double Distribution::sum() const {
  double s = 0.0;
  for (const auto& [_, p] : entries) s += p;
  return s;
}

const Distribution* Mdp::distribution(int state, int action) const {
  if (state < 0 || state >= num_states) return nullptr;
  for (const auto& [a, d] : transitions[state])
    if (a == action) return &d;
  return nullptr;
}

int Mdp::prop_index(std::string_view name) const {
  for (size_t i = 0; i < props.size(); ++i)
    if (props[i] == name) return static_cast<int>(i);
  return -1;
}

bool Mdp::state_has_prop(int state, int prop) const {
  const auto& l = labeling[state];
  return std::binary_search(l.begin(), l.end(), prop);
}

std::string Mdp::state_name(int state) const {
  if (!state_values.empty() && state < static_cast<int>(state_values.size())) {
    std::string s = "(";
    for (size_t i = 0; i < state_var_names.size(); ++i) {
      if (i) s += ",";
      s += fmt::format("{}={}", state_var_names[i], state_values[state][i]);
    }
    return s + ")";
  }
  return fmt::format("s{}", state);
}

std::string Mdp::action_name(int action) const {
  if (action >= 0 && action < static_cast<int>(actions.size()))
    return actions[action];
  return fmt::format("a{}", action);
}

std::string Violation::to_string(const Mdp& mdp) const {
  std::string loc;
  if (state >= 0) loc += " at state " + mdp.state_name(state);
  if (action >= 0) loc += " action '" + mdp.action_name(action) + "'";
  return invariant + loc + (detail.empty() ? "" : ": " + detail);
}

std::string ValidationReport::to_string(const Mdp& mdp) const {
  if (ok()) return "ok\n";
  std::string out;
  for (const auto& v : violations) out += v.to_string(mdp) + "\n";
  return out;
}

ValidationReport validate(const Mdp& mdp) {
  ValidationReport report;
  auto add = [&](std::string invariant, int s, int a, std::string detail) {
    report.violations.push_back(
        {std::move(invariant), s, a, std::move(detail)});
  };

  if (mdp.initial < 0 || mdp.initial >= mdp.num_states)
    add("initial state out of range", -1, -1,
        fmt::format("x0={} with {} states", mdp.initial, mdp.num_states));
  if (static_cast<int>(mdp.transitions.size()) != mdp.num_states)
    add("transition table size mismatch", -1, -1,
        fmt::format("{} rows for {} states", mdp.transitions.size(),
                    mdp.num_states));

  int nrows = std::min<int>(mdp.num_states,
                            static_cast<int>(mdp.transitions.size()));
  for (int s = 0; s < nrows; ++s) {
    std::set<int> seen_actions;
    for (const auto& [a, dist] : mdp.transitions[s]) {
      if (a < 0 || a >= static_cast<int>(mdp.actions.size()))
        add("unknown action index", s, a, "");
      if (!seen_actions.insert(a).second)
        add("duplicate action entry", s, a, "");
      double sum = 0.0;
      std::set<int> targets;
      for (const auto& [t, p] : dist.entries) {
        if (t < 0 || t >= mdp.num_states)
          add("transition target out of range", s, a,
              fmt::format("target {}", t));
        if (p <= 0.0)
          add("non-positive transition probability", s, a,
              fmt::format("p={}", p));
        if (!targets.insert(t).second)
          add("duplicate distribution target", s, a,
              fmt::format("target {}", t));
        sum += p;
      }
      if (std::abs(sum - 1.0) > kProbTolerance)
        add("distribution does not sum to 1", s, a,
            fmt::format("distribution sums to {}", sum));
    }
    if (mdp.transitions[s].empty())
      add("deadlock: state has no enabled action", s, -1, "");
  }

  if (static_cast<int>(mdp.labeling.size()) != mdp.num_states) {
    add("labeling size mismatch", -1, -1, "");
  } else {
    for (int s = 0; s < mdp.num_states; ++s)
      for (int prop : mdp.labeling[s])
        if (prop < 0 || prop >= static_cast<int>(mdp.props.size()))
          add("label index not in proposition set", s, -1,
              fmt::format("prop {}", prop));
  }
  return report;
}

std::vector<int> reachable(const Mdp& mdp) {
  std::vector<bool> seen(mdp.num_states, false);
  std::deque<int> queue;
  if (mdp.initial >= 0 && mdp.initial < mdp.num_states) {
    seen[mdp.initial] = true;
    queue.push_back(mdp.initial);
  }
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (const auto& [a, dist] : mdp.transitions[s]) {
      for (const auto& [t, p] : dist.entries) {
        if (t >= 0 && t < mdp.num_states && !seen[t]) {
          seen[t] = true;
          queue.push_back(t);
        }
      }
    }
  }
  std::vector<int> out;
  for (int s = 0; s < mdp.num_states; ++s)
    if (seen[s]) out.push_back(s);
  return out;
}

// ---- SpecPredicate ---------------------------------------------------------

SpecPredicate::SpecPredicate() = default;

SpecPredicate SpecPredicate::always() { return SpecPredicate(); }

SpecPredicate SpecPredicate::from_function(Fn fn) {
  SpecPredicate p;
  p.fn_ = std::move(fn);
  return p;
}

SpecPredicate SpecPredicate::from_table(std::vector<std::vector<bool>> allow) {
  return from_function(
      [table = std::move(allow)](const Mdp&, int s, int a) -> bool {
        if (s < 0 || s >= static_cast<int>(table.size())) return true;
        const auto& row = table[s];
        if (a < 0 || a >= static_cast<int>(row.size())) return true;
        return row[a];
      });
}

SpecPredicate SpecPredicate::from_constraints(std::vector<ExprPtr> conjuncts) {
  SpecPredicate p;
  p.constraints_ = std::move(conjuncts);
  return p;
}

SpecPredicate SpecPredicate::and_with(const SpecPredicate& other) const {
  SpecPredicate p;
  p.constraints_ = constraints_;
  p.constraints_.insert(p.constraints_.end(), other.constraints_.begin(),
                        other.constraints_.end());
  if (fn_ && other.fn_) {
    p.fn_ = [a = fn_, b = other.fn_](const Mdp& m, int s, int u) {
      return a(m, s, u) && b(m, s, u);
    };
  } else if (fn_) {
    p.fn_ = fn_;
  } else if (other.fn_) {
    p.fn_ = other.fn_;
  }
  return p;
}

SpecPredicate::Bound SpecPredicate::bind(const Mdp& mdp) const {
  Bound b;
  b.mdp_ = &mdp;
  b.fn_ = fn_;
  if (constraints_.empty()) return b;

  // Slot layout: state variables, then constants, then action attributes.
  NameTable table;
  for (const auto& name : mdp.state_var_names) table.add(name);
  b.num_vars_ = static_cast<int>(mdp.state_var_names.size());
  for (const auto& [name, value] : mdp.constants) {
    table.add(name);
    b.const_values_.push_back(value);
  }
  for (const auto& [name, column] : mdp.action_attrs) {
    table.add(name);
    b.attr_columns_.push_back(&column);
  }
  for (const auto& c : constraints_)
    b.bound_exprs_.push_back(flexverif::bind(c, table));
  b.scratch_.resize(table.slots.size());
  int pos = b.num_vars_;
  for (const auto& v : b.const_values_) b.scratch_[pos++] = v;
  return b;
}

bool SpecPredicate::Bound::allows(int state, int action) const {
  if (fn_ && !fn_(*mdp_, state, action)) return false;
  if (bound_exprs_.empty()) return true;

  if (state != scratch_state_) {
    const auto& vals = mdp_->state_values;
    for (int i = 0; i < num_vars_; ++i)
      scratch_[i] = Value::integer(vals[state][i]);
    scratch_state_ = state;
  }
  int pos = num_vars_ + static_cast<int>(const_values_.size());
  for (const auto* column : attr_columns_) {
    double v = action < static_cast<int>(column->size()) ? (*column)[action]
                                                         : 0.0;
    scratch_[pos++] = Value::real(v);
  }
  for (const auto& e : bound_exprs_) {
    Value v = eval(*e, scratch_);
    if (!v.is_bool())
      throw EvalError(e->pos, "constraint expression is not boolean");
    if (!v.as_bool()) return false;
  }
  return true;
}

bool SpecPredicate::allows(const Mdp& mdp, int state, int action) const {
  return bind(mdp).allows(state, action);
}

void attach_action_attributes(
    Mdp& mdp,
    const std::map<std::string, std::map<std::string, double>>& attrs) {
  for (const auto& [attr, by_label] : attrs) {
    std::vector<double> column(mdp.actions.size(), 0.0);
    for (size_t a = 0; a < mdp.actions.size(); ++a) {
      const std::string& name = mdp.actions[a];
      auto it = by_label.find(name);
      if (it == by_label.end()) {
        size_t hash = name.find('#');
        if (hash != std::string::npos)
          it = by_label.find(name.substr(0, hash));
      }
      if (it != by_label.end()) column[a] = it->second;
    }
    mdp.action_attrs[attr] = std::move(column);
  }
}

// ---- restrict --------------------------------------------------------------

Mdp restrict(const Mdp& mdp, const SpecPredicate& f, DeadlockMode mode) {
  SpecPredicate::Bound pred = f.bind(mdp);

  // Keep allowed transitions, then trim to the reachable part.
  std::vector<std::vector<std::pair<int, Distribution>>> kept(mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s)
    for (const auto& [a, dist] : mdp.transitions[s])
      if (pred.allows(s, a)) kept[s].push_back({a, dist});

  std::vector<bool> seen(mdp.num_states, false);
  std::deque<int> queue;
  seen[mdp.initial] = true;
  queue.push_back(mdp.initial);
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    for (const auto& [a, dist] : kept[s])
      for (const auto& [t, p] : dist.entries)
        if (!seen[t]) {
          seen[t] = true;
          queue.push_back(t);
        }
  }

  std::vector<int> old_of_new;
  std::vector<int> new_of_old(mdp.num_states, -1);
  for (int s = 0; s < mdp.num_states; ++s) {
    if (!seen[s]) continue;
    new_of_old[s] = static_cast<int>(old_of_new.size());
    old_of_new.push_back(s);
  }

  std::vector<int> deadlocked;
  for (int s : old_of_new)
    if (kept[s].empty()) deadlocked.push_back(s);
  if (!deadlocked.empty() && mode == DeadlockMode::Error) {
    std::string what = "restriction deadlocks state(s):";
    for (int s : deadlocked) what += " " + mdp.state_name(s);
    throw DeadlockAfterRestriction(what, deadlocked);
  }

  Mdp out;
  out.restricted = true;
  out.num_states = static_cast<int>(old_of_new.size());
  out.initial = new_of_old[mdp.initial];
  out.actions = mdp.actions;
  out.props = mdp.props;
  out.constants = mdp.constants;
  out.state_var_names = mdp.state_var_names;
  out.action_attrs = mdp.action_attrs;

  int stutter = -1;
  if (!deadlocked.empty()) {
    // Reuse an existing "stutter" action name only if it is ours.
    stutter = static_cast<int>(out.actions.size());
    std::string name = "stutter";
    int suffix = 0;
    while (std::find(out.actions.begin(), out.actions.end(), name) !=
           out.actions.end())
      name = fmt::format("stutter{}", ++suffix);
    out.actions.push_back(name);
    for (auto& [attr, column] : out.action_attrs) column.push_back(0.0);
  }
  out.stutter_action = stutter;

  out.transitions.resize(out.num_states);
  out.labeling.resize(out.num_states);
  if (!mdp.state_values.empty()) out.state_values.resize(out.num_states);
  out.original_state.resize(out.num_states);

  for (int ns = 0; ns < out.num_states; ++ns) {
    int os = old_of_new[ns];
    out.original_state[ns] = mdp.original_state.empty()
                                 ? os
                                 : mdp.original_state[os];
    out.labeling[ns] = mdp.labeling[os];
    if (!mdp.state_values.empty()) out.state_values[ns] = mdp.state_values[os];
    if (kept[os].empty()) {
      out.transitions[ns].push_back(
          {stutter, Distribution{{{ns, 1.0}}}});
      continue;
    }
    for (const auto& [a, dist] : kept[os]) {
      Distribution mapped;
      mapped.entries.reserve(dist.entries.size());
      for (const auto& [t, p] : dist.entries)
        mapped.entries.emplace_back(new_of_old[t], p);
      std::sort(mapped.entries.begin(), mapped.entries.end());
      out.transitions[ns].emplace_back(a, std::move(mapped));
    }
  }
  return out;
}

}  // namespace flexverif
