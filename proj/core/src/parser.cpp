#include <fmt/format.h>

#include <fstream>
#include <set>
#include <sstream>

#include "expr_internal.hpp"
#include "flexverif/model_lang.hpp"
#include "token_stream.hpp"

namespace flexverif::model {

using detail::TokKind;
using detail::Token;
using detail::TokenStream;

namespace {

std::vector<Assignment> parse_update(TokenStream& ts) {
  std::vector<Assignment> assigns;
  if (ts.accept_ident("true")) return assigns;  // no-change update
  for (;;) {
    ts.expect_punct("(");
    Token name = ts.expect_ident_token();
    ts.expect_punct("'");
    ts.expect_punct("=");
    ExprPtr value = detail::parse_expr(ts);
    ts.expect_punct(")");
    assigns.push_back({name.text, std::move(value), name.pos});
    if (!ts.accept_punct("&")) break;
  }
  return assigns;
}

// A bare update (no probability) is either "true ;" or starts with
// "( NAME '", which no expression can.
bool at_bare_update(const TokenStream& ts) {
  if (ts.peek().is_ident("true") && ts.peek(1).is_punct(";")) return true;
  return ts.peek().is_punct("(") &&
         ts.peek(1).kind == TokKind::Identifier && ts.peek(2).is_punct("'");
}

CommandAst parse_command(TokenStream& ts) {
  CommandAst cmd;
  cmd.pos = ts.peek().pos;
  ts.expect_punct("[");
  if (ts.peek().kind == TokKind::Identifier) cmd.action = ts.next().text;
  ts.expect_punct("]");
  cmd.guard = detail::parse_expr(ts);
  ts.expect_punct("->");
  if (at_bare_update(ts)) {
    cmd.branches.push_back({nullptr, parse_update(ts)});
  } else {
    for (;;) {
      ExprPtr prob = detail::parse_expr(ts);
      ts.expect_punct(":");
      cmd.branches.push_back({std::move(prob), parse_update(ts)});
      if (!ts.accept_punct("+")) break;
    }
  }
  ts.expect_punct(";");
  return cmd;
}

ModuleAst parse_module(TokenStream& ts) {
  ModuleAst mod;
  mod.name = ts.expect_ident_token().text;
  while (ts.peek().kind == TokKind::Identifier &&
         !ts.peek().is_ident("endmodule")) {
    VarDecl var;
    Token name = ts.expect_ident_token();
    var.name = name.text;
    var.pos = name.pos;
    ts.expect_punct(":");
    if (ts.accept_ident("bool")) {
      var.type = VarType::Bool;
    } else {
      var.type = VarType::IntRange;
      ts.expect_punct("[");
      var.lo = detail::parse_expr(ts);
      ts.expect_punct("..");
      var.hi = detail::parse_expr(ts);
      ts.expect_punct("]");
    }
    ts.expect_ident("init");
    var.init = detail::parse_expr(ts);
    ts.expect_punct(";");
    mod.variables.push_back(std::move(var));
  }
  while (ts.peek().is_punct("[")) mod.commands.push_back(parse_command(ts));
  ts.expect_ident("endmodule");
  return mod;
}

ConstDecl parse_const(TokenStream& ts) {
  ConstDecl decl;
  decl.pos = ts.peek().pos;
  if (ts.accept_ident("int"))
    decl.type = ConstType::Int;
  else if (ts.accept_ident("double"))
    decl.type = ConstType::Real;
  else if (ts.accept_ident("bool"))
    decl.type = ConstType::Bool;
  else
    ts.fail("expected 'int', 'double' or 'bool'");
  decl.name = ts.expect_ident_token().text;
  ts.expect_punct("=");
  decl.value = detail::parse_expr(ts);
  ts.expect_punct(";");
  return decl;
}

LabelDecl parse_label(TokenStream& ts) {
  LabelDecl decl;
  decl.pos = ts.peek().pos;
  if (ts.peek().kind != TokKind::String)
    ts.fail("expected label name in double quotes");
  decl.name = ts.next().text;
  ts.expect_punct("=");
  decl.condition = detail::parse_expr(ts);
  ts.expect_punct(";");
  return decl;
}

// ---- name resolution ------------------------------------------------------

void check_names(const Expr& e, const std::set<std::string>& declared) {
  std::set<std::string> used;
  collect_names(e, used);
  for (const auto& n : used) {
    if (!declared.count(n))
      throw SyntaxError(e.pos, "undeclared identifier '" + n + "'");
  }
}

void resolve(const ModelAst& ast) {
  std::set<std::string> idents;  // constants, variables and formulas
  auto declare = [&](const std::string& name, SourcePos pos) {
    if (!idents.insert(name).second)
      throw SyntaxError(pos, "duplicate name '" + name + "'");
  };

  std::set<std::string> seen_consts;
  for (const auto& c : ast.constants) {
    std::set<std::string> used;
    collect_names(*c.value, used);
    for (const auto& n : used) {
      if (!seen_consts.count(n))
        throw SyntaxError(c.pos, "undeclared identifier '" + n +
                                     "' in constant '" + c.name + "'");
    }
    declare(c.name, c.pos);
    seen_consts.insert(c.name);
  }

  std::set<std::string> module_names;
  for (const auto& m : ast.modules) {
    if (!module_names.insert(m.name).second)
      throw SyntaxError({}, "duplicate module name '" + m.name + "'");
    for (const auto& v : m.variables) {
      // Range and init expressions may only use constants.
      if (v.lo) check_names(*v.lo, seen_consts);
      if (v.hi) check_names(*v.hi, seen_consts);
      check_names(*v.init, seen_consts);
      declare(v.name, v.pos);
    }
  }
  for (const auto& f : ast.formulas) declare(f.name, {});

  for (const auto& m : ast.modules) {
    std::set<std::string> local;
    for (const auto& v : m.variables) local.insert(v.name);
    for (const auto& cmd : m.commands) {
      check_names(*cmd.guard, idents);
      for (const auto& br : cmd.branches) {
        if (br.probability) check_names(*br.probability, idents);
        for (const auto& a : br.assignments) {
          check_names(*a.value, idents);
          if (!local.count(a.var))
            throw SyntaxError(
                a.pos, "assignment to '" + a.var +
                           "', which is not a variable of module '" + m.name +
                           "'");
        }
      }
    }
  }

  std::set<std::string> label_names;
  for (const auto& l : ast.labels) {
    if (!label_names.insert(l.name).second)
      throw SyntaxError(l.pos, "duplicate label \"" + l.name + "\"");
    check_names(*l.condition, idents);
  }
  for (const auto& f : ast.formulas) check_names(*f.value, idents);
}

}  // namespace

ModelAst parse(std::string_view text) {
  TokenStream ts(text);
  ts.expect_ident("mdp");
  ModelAst ast;
  for (;;) {
    const Token& t = ts.peek();
    if (t.kind == TokKind::Eof) break;
    if (ts.accept_ident("const")) {
      ast.constants.push_back(parse_const(ts));
    } else if (ts.accept_ident("module")) {
      ast.modules.push_back(parse_module(ts));
    } else if (ts.accept_ident("label")) {
      ast.labels.push_back(parse_label(ts));
    } else {
      ts.fail("expected 'const', 'module' or 'label', found " +
              detail::describe(t));
    }
  }
  resolve(ast);
  return ast;
}

std::string print(const ModelAst& ast) {
  std::string out = "mdp\n";
  if (!ast.constants.empty()) out += "\n";
  for (const auto& c : ast.constants) {
    const char* type = c.type == ConstType::Int      ? "int"
                       : c.type == ConstType::Real   ? "double"
                                                     : "bool";
    out += fmt::format("const {} {} = {};\n", type, c.name,
                       print_expr(*c.value));
  }
  for (const auto& m : ast.modules) {
    out += fmt::format("\nmodule {}\n", m.name);
    for (const auto& v : m.variables) {
      if (v.type == VarType::Bool)
        out += fmt::format("  {} : bool init {};\n", v.name,
                           print_expr(*v.init));
      else
        out += fmt::format("  {} : [{}..{}] init {};\n", v.name,
                           print_expr(*v.lo), print_expr(*v.hi),
                           print_expr(*v.init));
    }
    for (const auto& cmd : m.commands) {
      std::string branches;
      for (size_t i = 0; i < cmd.branches.size(); ++i) {
        const auto& br = cmd.branches[i];
        if (i > 0) branches += " + ";
        if (br.probability)
          branches += print_expr(*br.probability) + ":";
        if (br.assignments.empty()) {
          branches += "true";
        } else {
          for (size_t k = 0; k < br.assignments.size(); ++k) {
            if (k > 0) branches += " & ";
            branches += fmt::format("({}'={})", br.assignments[k].var,
                                    print_expr(*br.assignments[k].value));
          }
        }
      }
      out += fmt::format("  [{}] {} -> {};\n", cmd.action.value_or(""),
                         print_expr(*cmd.guard), branches);
    }
    out += "endmodule\n";
  }
  if (!ast.labels.empty()) out += "\n";
  for (const auto& l : ast.labels)
    out += fmt::format("label \"{}\" = {};\n", l.name,
                       print_expr(*l.condition));
  return out;
}

Mdp load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return elaborate(parse(ss.str()));
}

}  // namespace flexverif::model
