#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flexverif/expr.hpp"
#include "flexverif/mdp.hpp"

namespace flexverif::model {

// Guarded-command modeling language (PRISM-style subset).
//
//   model   := "mdp" item*
//   item    := const | module | label
//   const   := "const" ("int"|"double"|"bool") NAME "=" expr ";"
//   module  := "module" NAME vardecl* command* "endmodule"
//   vardecl := NAME ":" ("[" expr ".." expr "]" | "bool") "init" expr ";"
//   command := "[" NAME? "]" expr "->" branches ";"
//   branches:= update | (expr ":" update) ("+" expr ":" update)*
//   update  := "true" | "(" NAME "'" "=" expr ")" ("&" "(" NAME "'" "=" expr ")")*
//   label   := "label" "\"" NAME "\"" "=" expr ";"
//
// Same-label commands across modules synchronize (guards conjoin, branch
// probabilities multiply, assignments merge); unlabeled commands interleave.

enum class VarType { IntRange, Bool };

struct VarDecl {
  std::string name;
  VarType type = VarType::IntRange;
  ExprPtr lo, hi;  // IntRange only
  ExprPtr init;
  SourcePos pos;
};

struct Assignment {
  std::string var;
  ExprPtr value;
  SourcePos pos;
};

struct UpdateBranch {
  ExprPtr probability;  // null for a bare update (implicit 1)
  std::vector<Assignment> assignments;
};

struct CommandAst {
  std::optional<std::string> action;
  ExprPtr guard;
  std::vector<UpdateBranch> branches;
  SourcePos pos;
};

struct ModuleAst {
  std::string name;
  std::vector<VarDecl> variables;
  std::vector<CommandAst> commands;
};

enum class ConstType { Int, Real, Bool };

struct ConstDecl {
  std::string name;
  ConstType type = ConstType::Int;
  ExprPtr value;
  SourcePos pos;
};

struct LabelDecl {
  std::string name;
  ExprPtr condition;
  SourcePos pos;
};

struct FormulaDecl {
  std::string name;
  ExprPtr value;
};

struct ModelAst {
  std::vector<ConstDecl> constants;
  std::vector<ModuleAst> modules;
  std::vector<LabelDecl> labels;
  // No surface syntax; may be populated programmatically and is honored by
  // the elaborator as per-state derived values.
  std::vector<FormulaDecl> formulas;
};

/// Parses model text. Throws SyntaxError for grammar violations, duplicate
/// names, undeclared identifiers, and assignments to another module's
/// variables.
ModelAst parse(std::string_view text);

/// Canonical text form; parse(print(ast)) is structurally identical to ast.
std::string print(const ModelAst& ast);

/// Builds the reachable state space. States are indexed densely in
/// breadth-first discovery order (initial valuation = index 0), so
/// identical text elaborates to identical tables.
Mdp elaborate(const ModelAst& ast);

/// Reads, parses and elaborates a ".mdp" file.
Mdp load_model_file(const std::string& path);

}  // namespace flexverif::model
