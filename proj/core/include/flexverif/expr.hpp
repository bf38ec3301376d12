#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "flexverif/errors.hpp"

namespace flexverif {

/// Runtime value of the expression language: bool, integer or real.
/// Arithmetic on two integers stays integral except '/', which always
/// divides as real. Mixed arithmetic promotes to real.
class Value {
 public:
  Value() : v_(static_cast<long long>(0)) {}
  static Value boolean(bool b) { return Value(Repr(b)); }
  static Value integer(long long i) { return Value(Repr(i)); }
  static Value real(double d) { return Value(Repr(d)); }

  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_int() const { return std::holds_alternative<long long>(v_); }
  bool is_real() const { return std::holds_alternative<double>(v_); }
  bool is_numeric() const { return !is_bool(); }

  bool as_bool() const { return std::get<bool>(v_); }
  long long as_int() const { return std::get<long long>(v_); }
  /// Numeric value with int promoted to double.
  double as_number() const {
    return is_int() ? static_cast<double>(as_int()) : std::get<double>(v_);
  }

  bool operator==(const Value& o) const { return v_ == o.v_; }
  std::string to_string() const;

 private:
  using Repr = std::variant<bool, long long, double>;
  explicit Value(Repr v) : v_(v) {}
  Repr v_;
};

enum class BinOp {
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  And,
  Or,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Min,
  Max
};

enum class UnOp { Not, Neg };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression tree node. Name nodes carry a resolved slot index
/// once bound; unbound names fail at evaluation time.
struct Expr {
  enum class Kind { Literal, Name, Unary, Binary };

  Kind kind;
  SourcePos pos;

  Value literal;      // Literal
  std::string name;   // Name
  int slot = -1;      // Name, filled by bind()
  UnOp un{};          // Unary
  BinOp bin{};        // Binary
  ExprPtr lhs, rhs;   // Binary; Unary uses lhs only

  static ExprPtr make_literal(Value v, SourcePos pos = {});
  static ExprPtr make_name(std::string name, SourcePos pos = {});
  static ExprPtr make_unary(UnOp op, ExprPtr operand, SourcePos pos = {});
  static ExprPtr make_binary(BinOp op, ExprPtr lhs, ExprPtr rhs,
                             SourcePos pos = {});
};

/// Maps names to slot indices for bound evaluation.
struct NameTable {
  std::map<std::string, int, std::less<>> slots;

  int add(const std::string& name) {
    auto [it, inserted] = slots.emplace(name, static_cast<int>(slots.size()));
    return it->second;
  }
  std::optional<int> find(std::string_view name) const {
    auto it = slots.find(name);
    if (it == slots.end()) return std::nullopt;
    return it->second;
  }
};

/// Returns a copy of the tree with every Name node resolved against `table`.
/// Throws EvalError for names missing from the table.
ExprPtr bind(const ExprPtr& expr, const NameTable& table);

/// Evaluates a bound tree against slot values.
Value eval(const Expr& expr, std::span<const Value> slots);

/// Convenience: bind against a name->value map and evaluate.
Value eval_with(const ExprPtr& expr, const std::map<std::string, Value>& env);

void collect_names(const Expr& expr, std::set<std::string>& out);

/// Parses a single expression. C-like precedence:
///   | < & < comparisons < additive < multiplicative < unary < primary
/// with `=`/`!=` as equality, `mod` infix, and min/max as two-argument calls.
ExprPtr parse_expression(std::string_view text);

/// Renders an expression with minimal parentheses such that
/// parse_expression(print_expr(e)) is structurally identical to e.
std::string print_expr(const Expr& expr);

}  // namespace flexverif
