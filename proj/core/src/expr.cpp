#include "flexverif/expr.hpp"

#include <fmt/format.h>

#include <cmath>

#include "expr_internal.hpp"
#include "token_stream.hpp"

namespace flexverif {

std::string Value::to_string() const {
  if (is_bool()) return as_bool() ? "true" : "false";
  if (is_int()) return fmt::format("{}", as_int());
  double d = std::get<double>(v_);
  // Integral reals keep a decimal point so they re-parse as reals.
  if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 1e15)
    return fmt::format("{:.1f}", d);
  return fmt::format("{}", d);
}

ExprPtr Expr::make_literal(Value v, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Literal;
  e->pos = pos;
  e->literal = v;
  return e;
}

ExprPtr Expr::make_name(std::string name, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Name;
  e->pos = pos;
  e->name = std::move(name);
  return e;
}

ExprPtr Expr::make_unary(UnOp op, ExprPtr operand, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Unary;
  e->pos = pos;
  e->un = op;
  e->lhs = std::move(operand);
  return e;
}

ExprPtr Expr::make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Binary;
  e->pos = pos;
  e->bin = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

ExprPtr bind(const ExprPtr& expr, const NameTable& table) {
  switch (expr->kind) {
    case Expr::Kind::Literal:
      return expr;
    case Expr::Kind::Name: {
      auto slot = table.find(expr->name);
      if (!slot)
        throw EvalError(expr->pos, "unknown identifier '" + expr->name + "'");
      auto e = std::make_shared<Expr>(*expr);
      e->slot = *slot;
      return e;
    }
    case Expr::Kind::Unary:
      return Expr::make_unary(expr->un, bind(expr->lhs, table), expr->pos);
    case Expr::Kind::Binary:
      return Expr::make_binary(expr->bin, bind(expr->lhs, table),
                               bind(expr->rhs, table), expr->pos);
  }
  throw EvalError(expr->pos, "corrupt expression node");
}

namespace {

[[noreturn]] void type_error(const Expr& e, const char* what) {
  throw EvalError(e.pos, std::string(what));
}

Value numeric_binary(const Expr& e, const Value& a, const Value& b) {
  if (!a.is_numeric() || !b.is_numeric())
    type_error(e, "numeric operands expected");
  bool ints = a.is_int() && b.is_int();
  switch (e.bin) {
    case BinOp::Add:
      return ints ? Value::integer(a.as_int() + b.as_int())
                  : Value::real(a.as_number() + b.as_number());
    case BinOp::Sub:
      return ints ? Value::integer(a.as_int() - b.as_int())
                  : Value::real(a.as_number() - b.as_number());
    case BinOp::Mul:
      return ints ? Value::integer(a.as_int() * b.as_int())
                  : Value::real(a.as_number() * b.as_number());
    case BinOp::Div:
      // '/' is always real division.
      return Value::real(a.as_number() / b.as_number());
    case BinOp::Mod: {
      if (!ints) type_error(e, "'mod' requires integer operands");
      if (b.as_int() == 0) type_error(e, "'mod' by zero");
      return Value::integer(a.as_int() % b.as_int());
    }
    case BinOp::Min:
      return ints ? Value::integer(std::min(a.as_int(), b.as_int()))
                  : Value::real(std::min(a.as_number(), b.as_number()));
    case BinOp::Max:
      return ints ? Value::integer(std::max(a.as_int(), b.as_int()))
                  : Value::real(std::max(a.as_number(), b.as_number()));
    default:
      break;
  }
  type_error(e, "corrupt binary operator");
}

Value compare(const Expr& e, const Value& a, const Value& b) {
  if (a.is_bool() != b.is_bool())
    type_error(e, "cannot compare boolean with number");
  if (a.is_bool()) {
    if (e.bin == BinOp::Eq) return Value::boolean(a.as_bool() == b.as_bool());
    if (e.bin == BinOp::Ne) return Value::boolean(a.as_bool() != b.as_bool());
    type_error(e, "ordering comparison on booleans");
  }
  double x = a.as_number();
  double y = b.as_number();
  switch (e.bin) {
    case BinOp::Eq:
      return Value::boolean(x == y);
    case BinOp::Ne:
      return Value::boolean(x != y);
    case BinOp::Lt:
      return Value::boolean(x < y);
    case BinOp::Le:
      return Value::boolean(x <= y);
    case BinOp::Gt:
      return Value::boolean(x > y);
    case BinOp::Ge:
      return Value::boolean(x >= y);
    default:
      break;
  }
  type_error(e, "corrupt comparison operator");
}

}  // namespace

Value eval(const Expr& expr, std::span<const Value> slots) {
  switch (expr.kind) {
    case Expr::Kind::Literal:
      return expr.literal;
    case Expr::Kind::Name:
      if (expr.slot < 0 || static_cast<size_t>(expr.slot) >= slots.size())
        throw EvalError(expr.pos, "unbound name '" + expr.name + "'");
      return slots[expr.slot];
    case Expr::Kind::Unary: {
      Value v = eval(*expr.lhs, slots);
      if (expr.un == UnOp::Not) {
        if (!v.is_bool()) type_error(expr, "'!' requires a boolean operand");
        return Value::boolean(!v.as_bool());
      }
      if (v.is_int()) return Value::integer(-v.as_int());
      if (v.is_real()) return Value::real(-v.as_number());
      type_error(expr, "'-' requires a numeric operand");
    }
    case Expr::Kind::Binary: {
      if (expr.bin == BinOp::And || expr.bin == BinOp::Or) {
        Value a = eval(*expr.lhs, slots);
        if (!a.is_bool()) type_error(expr, "boolean operands expected");
        // Short-circuit, C-like.
        if (expr.bin == BinOp::And && !a.as_bool()) return Value::boolean(false);
        if (expr.bin == BinOp::Or && a.as_bool()) return Value::boolean(true);
        Value b = eval(*expr.rhs, slots);
        if (!b.is_bool()) type_error(expr, "boolean operands expected");
        return b;
      }
      Value a = eval(*expr.lhs, slots);
      Value b = eval(*expr.rhs, slots);
      switch (expr.bin) {
        case BinOp::Eq:
        case BinOp::Ne:
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge:
          return compare(expr, a, b);
        default:
          return numeric_binary(expr, a, b);
      }
    }
  }
  throw EvalError(expr.pos, "corrupt expression node");
}

Value eval_with(const ExprPtr& expr, const std::map<std::string, Value>& env) {
  NameTable table;
  std::vector<Value> slots;
  slots.reserve(env.size());
  for (const auto& [name, value] : env) {
    table.add(name);
    slots.push_back(value);
  }
  return eval(*bind(expr, table), slots);
}

void collect_names(const Expr& expr, std::set<std::string>& out) {
  switch (expr.kind) {
    case Expr::Kind::Literal:
      return;
    case Expr::Kind::Name:
      out.insert(expr.name);
      return;
    case Expr::Kind::Unary:
      collect_names(*expr.lhs, out);
      return;
    case Expr::Kind::Binary:
      collect_names(*expr.lhs, out);
      collect_names(*expr.rhs, out);
      return;
  }
}

namespace detail {

namespace {

ExprPtr parse_unary(TokenStream& ts);

ExprPtr parse_primary(TokenStream& ts) {
  const Token& t = ts.peek();
  switch (t.kind) {
    case TokKind::Int: {
      Token tok = ts.next();
      return Expr::make_literal(Value::integer(tok.int_value), tok.pos);
    }
    case TokKind::Real: {
      Token tok = ts.next();
      return Expr::make_literal(Value::real(tok.real_value), tok.pos);
    }
    case TokKind::Identifier: {
      if (t.text == "true" || t.text == "false") {
        Token tok = ts.next();
        return Expr::make_literal(Value::boolean(tok.text == "true"), tok.pos);
      }
      if (t.text == "min" || t.text == "max") {
        Token tok = ts.next();
        ts.expect_punct("(");
        ExprPtr a = parse_expr(ts);
        ts.expect_punct(",");
        ExprPtr b = parse_expr(ts);
        ts.expect_punct(")");
        return Expr::make_binary(tok.text == "min" ? BinOp::Min : BinOp::Max,
                                 std::move(a), std::move(b), tok.pos);
      }
      Token tok = ts.next();
      return Expr::make_name(tok.text, tok.pos);
    }
    case TokKind::Punct:
      if (t.text == "(") {
        ts.next();
        ExprPtr inner = parse_expr(ts);
        ts.expect_punct(")");
        return inner;
      }
      break;
    default:
      break;
  }
  ts.fail("expected expression, found " + describe(t));
}

ExprPtr parse_unary(TokenStream& ts) {
  const Token& t = ts.peek();
  if (t.is_punct("!")) {
    Token tok = ts.next();
    return Expr::make_unary(UnOp::Not, parse_unary(ts), tok.pos);
  }
  if (t.is_punct("-")) {
    Token tok = ts.next();
    return Expr::make_unary(UnOp::Neg, parse_unary(ts), tok.pos);
  }
  return parse_primary(ts);
}

ExprPtr parse_mul(TokenStream& ts) {
  ExprPtr lhs = parse_unary(ts);
  for (;;) {
    const Token& t = ts.peek();
    BinOp op;
    if (t.is_punct("*"))
      op = BinOp::Mul;
    else if (t.is_punct("/"))
      op = BinOp::Div;
    else if (t.is_ident("mod"))
      op = BinOp::Mod;
    else
      return lhs;
    Token tok = ts.next();
    lhs = Expr::make_binary(op, std::move(lhs), parse_unary(ts), tok.pos);
  }
}

ExprPtr parse_add(TokenStream& ts) {
  ExprPtr lhs = parse_mul(ts);
  for (;;) {
    const Token& t = ts.peek();
    BinOp op;
    if (t.is_punct("+"))
      op = BinOp::Add;
    else if (t.is_punct("-"))
      op = BinOp::Sub;
    else
      return lhs;
    Token tok = ts.next();
    lhs = Expr::make_binary(op, std::move(lhs), parse_mul(ts), tok.pos);
  }
}

ExprPtr parse_cmp(TokenStream& ts) {
  ExprPtr lhs = parse_add(ts);
  for (;;) {
    const Token& t = ts.peek();
    BinOp op;
    if (t.is_punct("=") || t.is_punct("=="))
      op = BinOp::Eq;
    else if (t.is_punct("!="))
      op = BinOp::Ne;
    else if (t.is_punct("<"))
      op = BinOp::Lt;
    else if (t.is_punct("<="))
      op = BinOp::Le;
    else if (t.is_punct(">"))
      op = BinOp::Gt;
    else if (t.is_punct(">="))
      op = BinOp::Ge;
    else
      return lhs;
    Token tok = ts.next();
    lhs = Expr::make_binary(op, std::move(lhs), parse_add(ts), tok.pos);
  }
}

ExprPtr parse_and(TokenStream& ts) {
  ExprPtr lhs = parse_cmp(ts);
  while (ts.peek().is_punct("&")) {
    Token tok = ts.next();
    lhs = Expr::make_binary(BinOp::And, std::move(lhs), parse_cmp(ts), tok.pos);
  }
  return lhs;
}

}  // namespace

ExprPtr parse_expr(TokenStream& ts) {
  ExprPtr lhs = parse_and(ts);
  while (ts.peek().is_punct("|")) {
    Token tok = ts.next();
    lhs = Expr::make_binary(BinOp::Or, std::move(lhs), parse_and(ts), tok.pos);
  }
  return lhs;
}

}  // namespace detail

ExprPtr parse_expression(std::string_view text) {
  detail::TokenStream ts(text);
  ExprPtr e = detail::parse_expr(ts);
  if (!ts.done()) ts.fail("trailing input after expression");
  return e;
}

namespace {

int precedence(BinOp op) {
  switch (op) {
    case BinOp::Or:
      return 1;
    case BinOp::And:
      return 2;
    case BinOp::Eq:
    case BinOp::Ne:
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge:
      return 3;
    case BinOp::Add:
    case BinOp::Sub:
      return 4;
    case BinOp::Mul:
    case BinOp::Div:
    case BinOp::Mod:
      return 5;
    case BinOp::Min:
    case BinOp::Max:
      return 7;  // call syntax, never needs parens
  }
  return 0;
}

const char* spelling(BinOp op) {
  switch (op) {
    case BinOp::Add:
      return "+";
    case BinOp::Sub:
      return "-";
    case BinOp::Mul:
      return "*";
    case BinOp::Div:
      return "/";
    case BinOp::Mod:
      return "mod";
    case BinOp::And:
      return "&";
    case BinOp::Or:
      return "|";
    case BinOp::Eq:
      return "=";
    case BinOp::Ne:
      return "!=";
    case BinOp::Lt:
      return "<";
    case BinOp::Le:
      return "<=";
    case BinOp::Gt:
      return ">";
    case BinOp::Ge:
      return ">=";
    case BinOp::Min:
      return "min";
    case BinOp::Max:
      return "max";
  }
  return "?";
}

constexpr int kUnaryPrec = 6;

void print_rec(const Expr& e, int parent_prec, bool rhs_of_same,
               std::string& out) {
  switch (e.kind) {
    case Expr::Kind::Literal:
      out += e.literal.to_string();
      return;
    case Expr::Kind::Name:
      out += e.name;
      return;
    case Expr::Kind::Unary: {
      bool parens = parent_prec > kUnaryPrec;
      if (parens) out += "(";
      out += (e.un == UnOp::Not) ? "!" : "-";
      print_rec(*e.lhs, kUnaryPrec, false, out);
      if (parens) out += ")";
      return;
    }
    case Expr::Kind::Binary: {
      if (e.bin == BinOp::Min || e.bin == BinOp::Max) {
        out += spelling(e.bin);
        out += "(";
        print_rec(*e.lhs, 0, false, out);
        out += ", ";
        print_rec(*e.rhs, 0, false, out);
        out += ")";
        return;
      }
      int prec = precedence(e.bin);
      bool parens = prec < parent_prec || (prec == parent_prec && rhs_of_same);
      if (parens) out += "(";
      print_rec(*e.lhs, prec, false, out);
      out += " ";
      out += spelling(e.bin);
      out += " ";
      print_rec(*e.rhs, prec, true, out);
      if (parens) out += ")";
      return;
    }
  }
}

}  // namespace

std::string print_expr(const Expr& expr) {
  std::string out;
  print_rec(expr, 0, false, out);
  return out;
}

}  // namespace flexverif
