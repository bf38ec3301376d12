#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

#include "flexverif/model_lang.hpp"

namespace flexverif::model {

namespace {

struct VarInfo {
  std::string name;
  bool is_bool = false;
  long long lo = 0, hi = 0;
  long long init = 0;
  int module = -1;
};

struct CompiledBranch {
  ExprPtr probability;                              // null = implicit 1
  std::vector<std::pair<int, ExprPtr>> assignments; // global var index, value
  SourcePos pos;
};

struct CompiledCommand {
  int module = -1;
  SourcePos pos;
  ExprPtr guard;
  std::vector<CompiledBranch> branches;
};

// One nondeterministic choice: either a single unlabeled command or a
// synchronized tuple (one command per participating module).
struct ActionSpec {
  std::vector<int> commands;  // indices into the compiled command list
};

struct ValuationHash {
  size_t operator()(const std::vector<int>& v) const {
    size_t h = 1469598103934665603ull;
    for (int x : v) {
      h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

long long eval_const_int(const ExprPtr& e, const NameTable& table,
                         std::span<const Value> slots, const char* what) {
  Value v = eval(*flexverif::bind(e, table), slots);
  if (!v.is_int())
    throw ElaborationError(fmt::format("{} must be a constant integer", what));
  return v.as_int();
}

std::string valuation_name(const std::vector<VarInfo>& vars,
                           const std::vector<int>& vals) {
  std::string s = "(";
  for (size_t i = 0; i < vars.size(); ++i) {
    if (i) s += ",";
    if (vars[i].is_bool)
      s += fmt::format("{}={}", vars[i].name, vals[i] ? "true" : "false");
    else
      s += fmt::format("{}={}", vars[i].name, vals[i]);
  }
  return s + ")";
}

}  // namespace

Mdp elaborate(const ModelAst& ast) {
  // Constants, evaluated in declaration order.
  NameTable const_table;
  std::vector<Value> const_values;
  for (const auto& c : ast.constants) {
    Value v = eval(*flexverif::bind(c.value, const_table), const_values);
    switch (c.type) {
      case ConstType::Int:
        if (!v.is_int())
          throw ElaborationError(
              fmt::format("constant '{}' declared int but is not", c.name));
        break;
      case ConstType::Real:
        if (v.is_bool())
          throw ElaborationError(
              fmt::format("constant '{}' declared double but is boolean",
                          c.name));
        if (v.is_int()) v = Value::real(v.as_number());
        break;
      case ConstType::Bool:
        if (!v.is_bool())
          throw ElaborationError(
              fmt::format("constant '{}' declared bool but is not", c.name));
        break;
    }
    const_table.add(c.name);
    const_values.push_back(v);
  }

  // Variables, module-major order.
  std::vector<VarInfo> vars;
  for (size_t mi = 0; mi < ast.modules.size(); ++mi) {
    for (const auto& v : ast.modules[mi].variables) {
      VarInfo info;
      info.name = v.name;
      info.module = static_cast<int>(mi);
      if (v.type == VarType::Bool) {
        info.is_bool = true;
        info.hi = 1;
        Value init = eval(*flexverif::bind(v.init, const_table), const_values);
        if (!init.is_bool())
          throw ElaborationError(fmt::format(
              "init of boolean variable '{}' is not boolean", v.name));
        info.init = init.as_bool() ? 1 : 0;
      } else {
        info.lo = eval_const_int(v.lo, const_table, const_values,
                                 "variable range bound");
        info.hi = eval_const_int(v.hi, const_table, const_values,
                                 "variable range bound");
        if (info.lo > info.hi)
          throw ElaborationError(
              fmt::format("empty range [{}..{}] for variable '{}'", info.lo,
                          info.hi, v.name));
        info.init = eval_const_int(v.init, const_table, const_values,
                                   "variable init");
        if (info.init < info.lo || info.init > info.hi)
          throw UpdateOutOfRange(
              fmt::format("init {} of variable '{}' outside [{}..{}]",
                          info.init, v.name, info.lo, info.hi));
      }
      vars.push_back(std::move(info));
    }
  }

  // Full slot layout: [constants][variables][formulas].
  NameTable table = const_table;
  std::map<std::string, int> var_index;
  for (const auto& v : vars) {
    var_index[v.name] = static_cast<int>(table.slots.size()) -
                        static_cast<int>(const_values.size());
    table.add(v.name);
  }
  std::vector<ExprPtr> formula_exprs;
  for (const auto& f : ast.formulas) {
    formula_exprs.push_back(flexverif::bind(f.value, table));  // earlier formulas visible
    table.add(f.name);
  }

  // Compile commands; reject duplicate targets within one update.
  std::vector<CompiledCommand> commands;
  std::vector<std::vector<int>> module_unlabeled(ast.modules.size());
  // label -> per participating module (in module order) its command indices
  std::vector<std::string> label_order;
  std::map<std::string, std::map<int, std::vector<int>>> labeled;
  for (size_t mi = 0; mi < ast.modules.size(); ++mi) {
    for (const auto& cmd : ast.modules[mi].commands) {
      CompiledCommand cc;
      cc.module = static_cast<int>(mi);
      cc.pos = cmd.pos;
      cc.guard = flexverif::bind(cmd.guard, table);
      for (const auto& br : cmd.branches) {
        CompiledBranch cb;
        cb.pos = cmd.pos;
        if (br.probability) cb.probability = flexverif::bind(br.probability, table);
        std::set<int> targets;
        for (const auto& a : br.assignments) {
          auto it = var_index.find(a.var);
          if (it == var_index.end())
            throw ElaborationError(
                fmt::format("assignment to unknown variable '{}'", a.var));
          if (!targets.insert(it->second).second)
            throw ConflictingAssignment(fmt::format(
                "{}:{}: variable '{}' assigned twice in one update",
                a.pos.line, a.pos.column, a.var));
          cb.assignments.emplace_back(it->second, flexverif::bind(a.value, table));
        }
        cc.branches.push_back(std::move(cb));
      }
      int idx = static_cast<int>(commands.size());
      commands.push_back(std::move(cc));
      if (cmd.action) {
        auto& per_module = labeled[*cmd.action];
        if (per_module.empty()) label_order.push_back(*cmd.action);
        per_module[static_cast<int>(mi)].push_back(idx);
      } else {
        module_unlabeled[mi].push_back(idx);
      }
    }
  }

  // Action universe: unlabeled commands first (module order), then labeled
  // actions in first-appearance order, one action per synchronization tuple.
  std::vector<std::string> action_names;
  std::vector<ActionSpec> action_specs;
  for (size_t mi = 0; mi < ast.modules.size(); ++mi) {
    for (size_t k = 0; k < module_unlabeled[mi].size(); ++k) {
      action_names.push_back(
          fmt::format("{}#{}", ast.modules[mi].name, k));
      action_specs.push_back({{module_unlabeled[mi][k]}});
    }
  }
  for (const auto& label : label_order) {
    const auto& per_module = labeled[label];
    std::vector<const std::vector<int>*> lists;
    size_t combos = 1;
    for (const auto& [mi, cmds] : per_module) {
      lists.push_back(&cmds);
      combos *= cmds.size();
    }
    for (size_t c = 0; c < combos; ++c) {
      ActionSpec spec;
      size_t rem = c;
      for (auto it = lists.rbegin(); it != lists.rend(); ++it) {
        spec.commands.push_back((**it)[rem % (*it)->size()]);
        rem /= (*it)->size();
      }
      std::reverse(spec.commands.begin(), spec.commands.end());
      // Synchronized commands must write disjoint variable sets.
      std::set<int> any_written;
      for (int ci : spec.commands) {
        std::set<int> mine;
        for (const auto& br : commands[ci].branches)
          for (const auto& [slot, _] : br.assignments) mine.insert(slot);
        for (int slot : mine) {
          if (any_written.count(slot))
            throw ConflictingAssignment(fmt::format(
                "synchronized commands on action '{}' both assign '{}'",
                label, vars[slot].name));
          any_written.insert(slot);
        }
      }
      action_names.push_back(combos == 1 ? label
                                         : fmt::format("{}#{}", label, c));
      action_specs.push_back(std::move(spec));
    }
  }

  // Breadth-first state exploration from the initial valuation.
  const int ncons = static_cast<int>(const_values.size());
  const int nvars = static_cast<int>(vars.size());
  std::vector<Value> slots(const_values.begin(), const_values.end());
  slots.resize(ncons + nvars + formula_exprs.size());

  auto load_state = [&](const std::vector<int>& vals) {
    for (int i = 0; i < nvars; ++i)
      slots[ncons + i] = vars[i].is_bool ? Value::boolean(vals[i] != 0)
                                         : Value::integer(vals[i]);
    for (size_t fi = 0; fi < formula_exprs.size(); ++fi)
      slots[ncons + nvars + fi] = eval(*formula_exprs[fi], slots);
  };

  std::vector<int> init_vals(nvars);
  for (int i = 0; i < nvars; ++i) init_vals[i] = static_cast<int>(vars[i].init);

  std::unordered_map<std::vector<int>, int, ValuationHash> index_of;
  std::vector<std::vector<int>> states;
  std::deque<int> queue;
  auto intern = [&](const std::vector<int>& vals) {
    auto it = index_of.find(vals);
    if (it != index_of.end()) return it->second;
    int idx = static_cast<int>(states.size());
    index_of.emplace(vals, idx);
    states.push_back(vals);
    queue.push_back(idx);
    return idx;
  };
  intern(init_vals);

  Mdp mdp;
  mdp.actions = action_names;

  auto eval_guard = [&](const CompiledCommand& cc) {
    Value g = eval(*cc.guard, slots);
    if (!g.is_bool())
      throw ElaborationError(fmt::format("{}:{}: guard is not boolean",
                                         cc.pos.line, cc.pos.column));
    return g.as_bool();
  };

  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    if (static_cast<int>(mdp.transitions.size()) <= s)
      mdp.transitions.resize(s + 1);
    // states may still grow; fetch by value
    std::vector<int> current = states[s];
    load_state(current);

    for (size_t ai = 0; ai < action_specs.size(); ++ai) {
      const ActionSpec& spec = action_specs[ai];
      bool enabled = true;
      for (int ci : spec.commands)
        if (!eval_guard(commands[ci])) {
          enabled = false;
          break;
        }
      if (!enabled) continue;

      // Per command: evaluate branch probabilities in the source state and
      // check they form a distribution.
      struct Partial {
        double prob;
        std::vector<int> vals;
      };
      std::vector<Partial> partials{{1.0, current}};
      for (int ci : spec.commands) {
        const CompiledCommand& cc = commands[ci];
        std::vector<double> probs;
        double sum = 0.0;
        for (const auto& br : cc.branches) {
          double p = 1.0;
          if (br.probability) {
            Value pv = eval(*br.probability, slots);
            if (!pv.is_numeric())
              throw ProbabilitySumError(
                  fmt::format("{}:{}: branch probability is not numeric",
                              cc.pos.line, cc.pos.column));
            p = pv.as_number();
          }
          if (p < -kProbTolerance || p > 1.0 + kProbTolerance)
            throw ProbabilitySumError(fmt::format(
                "{}:{}: branch probability {} outside [0,1] in state {}",
                cc.pos.line, cc.pos.column, p,
                valuation_name(vars, current)));
          probs.push_back(p);
          sum += p;
        }
        if (std::abs(sum - 1.0) > kProbTolerance)
          throw ProbabilitySumError(fmt::format(
              "{}:{}: branch probabilities sum to {} in state {}",
              cc.pos.line, cc.pos.column, sum, valuation_name(vars, current)));

        std::vector<Partial> expanded;
        for (const auto& part : partials) {
          for (size_t bi = 0; bi < cc.branches.size(); ++bi) {
            if (probs[bi] <= 0.0) continue;  // drop zero-probability branches
            Partial next = part;
            next.prob *= probs[bi];
            for (const auto& [slot, expr] : cc.branches[bi].assignments) {
              // Assignment right-hand sides read the source state.
              Value v = eval(*expr, slots);
              const VarInfo& info = vars[slot];
              long long nv;
              if (info.is_bool) {
                if (!v.is_bool())
                  throw ElaborationError(fmt::format(
                      "{}:{}: non-boolean assigned to '{}'",
                      cc.pos.line, cc.pos.column, info.name));
                nv = v.as_bool() ? 1 : 0;
              } else {
                if (!v.is_int())
                  throw ElaborationError(fmt::format(
                      "{}:{}: non-integer assigned to '{}'",
                      cc.pos.line, cc.pos.column, info.name));
                nv = v.as_int();
              }
              if (nv < info.lo || nv > info.hi)
                throw UpdateOutOfRange(fmt::format(
                    "{}:{}: update sets '{}' to {} outside [{}..{}] in "
                    "state {}",
                    cc.pos.line, cc.pos.column, info.name, nv, info.lo,
                    info.hi, valuation_name(vars, current)));
              next.vals[slot] = static_cast<int>(nv);
            }
            expanded.push_back(std::move(next));
          }
        }
        partials = std::move(expanded);
      }

      // Merge duplicate targets; target indices are assigned on discovery.
      std::map<int, double> merged;
      for (const auto& part : partials) merged[intern(part.vals)] += part.prob;
      std::vector<std::pair<int, double>> entries(merged.begin(), merged.end());
      double total = 0.0;
      for (const auto& [_, p] : entries) total += p;
      if (std::abs(total - 1.0) > kProbTolerance)
        throw ProbabilitySumError(fmt::format(
            "action '{}' has total probability {} in state {}",
            action_names[ai], total, valuation_name(vars, current)));
      if (static_cast<int>(mdp.transitions.size()) <= s)
        mdp.transitions.resize(s + 1);
      mdp.transitions[s].emplace_back(static_cast<int>(ai),
                                      Distribution{std::move(entries)});
    }
  }

  mdp.num_states = static_cast<int>(states.size());
  mdp.initial = 0;
  mdp.transitions.resize(mdp.num_states);

  // Labels.
  std::vector<ExprPtr> label_exprs;
  for (const auto& l : ast.labels) {
    mdp.props.push_back(l.name);
    label_exprs.push_back(flexverif::bind(l.condition, table));
  }
  mdp.labeling.resize(mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s) {
    load_state(states[s]);
    for (size_t li = 0; li < label_exprs.size(); ++li) {
      Value v = eval(*label_exprs[li], slots);
      if (!v.is_bool())
        throw ElaborationError(
            fmt::format("label \"{}\" is not boolean", mdp.props[li]));
      if (v.as_bool()) mdp.labeling[s].push_back(static_cast<int>(li));
    }
  }

  // Metadata for constraint evaluation and diagnostics.
  for (const auto& v : vars) mdp.state_var_names.push_back(v.name);
  mdp.state_values = std::move(states);
  for (size_t i = 0; i < ast.constants.size(); ++i)
    mdp.constants[ast.constants[i].name] = const_values[i];

  return mdp;
}

}  // namespace flexverif::model
