#include "token_stream.hpp"

#include <cctype>
#include <cstdlib>

namespace flexverif::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

// Multi-character puncts first so the scanner is greedy.
constexpr std::string_view kPuncts[] = {
    "..", "->", "<=", ">=", "!=", "==", "(", ")", "[", "]", "{", "}", ";",
    ":",  ",",  "+",  "-",  "*",  "/",  "<", ">", "=", "&", "|", "!", "'",
    "?",  "$",
};

}  // namespace

TokenStream::TokenStream(std::string_view text) {
  size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (text[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }

    Token t;
    t.pos = {line, col};

    if (ident_start(c)) {
      size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      t.kind = TokKind::Identifier;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
      tokens_.push_back(std::move(t));
      continue;
    }

    if (digit(c)) {
      size_t j = i;
      while (j < text.size() && digit(text[j])) ++j;
      bool real = false;
      // Fraction, but not ".." (range syntax).
      if (j < text.size() && text[j] == '.' &&
          !(j + 1 < text.size() && text[j + 1] == '.')) {
        real = true;
        ++j;
        while (j < text.size() && digit(text[j])) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && digit(text[k])) {
          real = true;
          j = k;
          while (j < text.size() && digit(text[j])) ++j;
        }
      }
      std::string spelling(text.substr(i, j - i));
      if (real) {
        t.kind = TokKind::Real;
        t.real_value = std::strtod(spelling.c_str(), nullptr);
      } else {
        t.kind = TokKind::Int;
        t.int_value = std::strtoll(spelling.c_str(), nullptr, 10);
      }
      t.text = std::move(spelling);
      advance(j - i);
      tokens_.push_back(std::move(t));
      continue;
    }

    if (c == '"') {
      size_t j = i + 1;
      std::string contents;
      while (j < text.size() && text[j] != '"') {
        if (text[j] == '\n') break;
        contents.push_back(text[j]);
        ++j;
      }
      if (j >= text.size() || text[j] != '"')
        throw SyntaxError(t.pos, "unterminated string literal");
      t.kind = TokKind::String;
      t.text = std::move(contents);
      advance(j + 1 - i);
      tokens_.push_back(std::move(t));
      continue;
    }

    bool matched = false;
    for (std::string_view p : kPuncts) {
      if (text.substr(i, p.size()) == p) {
        t.kind = TokKind::Punct;
        t.text = std::string(p);
        advance(p.size());
        tokens_.push_back(std::move(t));
        matched = true;
        break;
      }
    }
    if (!matched)
      throw SyntaxError(t.pos, std::string("unexpected character '") + c + "'");
  }

  Token eof;
  eof.kind = TokKind::Eof;
  eof.pos = {line, col};
  tokens_.push_back(std::move(eof));
}

const Token& TokenStream::peek(int ahead) const {
  size_t idx = cursor_ + static_cast<size_t>(ahead);
  if (idx >= tokens_.size()) idx = tokens_.size() - 1;
  return tokens_[idx];
}

Token TokenStream::next() {
  Token t = tokens_[cursor_];
  if (cursor_ + 1 < tokens_.size()) ++cursor_;
  return t;
}

bool TokenStream::accept_punct(std::string_view p) {
  if (peek().is_punct(p)) {
    next();
    return true;
  }
  return false;
}

bool TokenStream::accept_ident(std::string_view name) {
  if (peek().is_ident(name)) {
    next();
    return true;
  }
  return false;
}

Token TokenStream::expect_punct(std::string_view p) {
  if (!peek().is_punct(p))
    fail("expected '" + std::string(p) + "', found " + describe(peek()));
  return next();
}

Token TokenStream::expect_ident_token() {
  if (peek().kind != TokKind::Identifier)
    fail("expected identifier, found " + describe(peek()));
  return next();
}

void TokenStream::expect_ident(std::string_view name) {
  if (!peek().is_ident(name))
    fail("expected '" + std::string(name) + "', found " + describe(peek()));
  next();
}

void TokenStream::fail(const std::string& message) const {
  throw SyntaxError(peek().pos, message);
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokKind::Eof:
      return "end of input";
    case TokKind::String:
      return "string \"" + t.text + "\"";
    default:
      return "'" + t.text + "'";
  }
}

}  // namespace flexverif::detail
