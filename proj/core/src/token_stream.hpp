#pragma once

// Internal lexer shared by the expression parser, the model-language parser
// and the query parser. Not installed.

#include <string>
#include <string_view>
#include <vector>

#include "flexverif/errors.hpp"

namespace flexverif::detail {

enum class TokKind { Identifier, Int, Real, String, Punct, Eof };

struct Token {
  TokKind kind = TokKind::Eof;
  std::string text;       // identifier name, punct spelling, string contents
  long long int_value = 0;
  double real_value = 0.0;
  SourcePos pos;

  bool is_punct(std::string_view p) const {
    return kind == TokKind::Punct && text == p;
  }
  bool is_ident(std::string_view name) const {
    return kind == TokKind::Identifier && text == name;
  }
};

class TokenStream {
 public:
  explicit TokenStream(std::string_view text);

  const Token& peek(int ahead = 0) const;
  Token next();
  bool done() const { return peek().kind == TokKind::Eof; }

  /// Consumes the token if it matches, else returns false.
  bool accept_punct(std::string_view p);
  bool accept_ident(std::string_view name);

  /// Consumes the token or throws SyntaxError naming what was expected.
  Token expect_punct(std::string_view p);
  Token expect_ident_token();  // any identifier
  void expect_ident(std::string_view name);

  [[noreturn]] void fail(const std::string& message) const;

 private:
  std::vector<Token> tokens_;
  size_t cursor_ = 0;
};

std::string describe(const Token& t);

}  // namespace flexverif::detail
