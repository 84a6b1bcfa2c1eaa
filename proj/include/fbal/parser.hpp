#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "error.hpp"
#include "term.hpp"

namespace fbal {

/// Syntax error at a 1-based line/column.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t line, std::size_t column)
      : Error(ErrorCode::SyntaxError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

enum class TokenKind { Number, Ident, Flag, Arrow, Punct, End };

struct Token {
  TokenKind kind;
  std::string text;
  double number = 0.0;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t offset = 0;  // byte offset in the source

  bool is(char c) const { return kind == TokenKind::Punct && text.size() == 1 && text[0] == c; }
  bool is_ident(std::string_view s) const { return kind == TokenKind::Ident && text == s; }
};

/// Splits one source text into tokens. `#` starts a comment that runs to
/// the end of the line.
inline std::vector<Token> tokenize(std::string_view src, std::size_t first_line = 1) {
  std::vector<Token> out;
  std::size_t line = first_line, col = 1, i = 0;
  auto fail = [&](const std::string& msg) { throw ParseError(msg, line, col); };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    Token t{TokenKind::Punct, {}, 0.0, line, col, i};
    std::size_t j = i;
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      t.kind = TokenKind::Number;
      t.text = std::string(src.substr(i, j - i));
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (ec != std::errc() || p != t.text.data() + t.text.size()) fail("malformed number '" + t.text + "'");
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = TokenKind::Ident;
      t.text = std::string(src.substr(i, j - i));
    } else if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      j = i + 2;
      t.kind = TokenKind::Arrow;
      t.text = "->";
    } else if (c == '-' && i + 2 < src.size() && src[i + 1] == '-' &&
               std::isalpha(static_cast<unsigned char>(src[i + 2]))) {
      j = i + 2;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = TokenKind::Flag;
      t.text = std::string(src.substr(i, j - i));
    } else if (std::string_view("+-*(),{}:=[]").find(c) != std::string_view::npos) {
      j = i + 1;
      t.text = std::string(1, c);
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
    col += j - i;
    i = j;
    out.push_back(std::move(t));
  }
  out.push_back(Token{TokenKind::End, {}, 0.0, line, col, src.size()});
  return out;
}

/// Cursor over a token vector.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t k = pos_ + ahead;
    return k < tokens_.size() ? tokens_[k] : tokens_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == TokenKind::End; }

  [[noreturn]] void fail(const Token& at, const std::string& msg) const {
    throw ParseError(msg, at.line, at.column);
  }
  [[noreturn]] void fail(const std::string& msg) const { fail(peek(), msg); }

  void expect(char c) {
    if (!peek().is(c)) fail(std::string("expected '") + c + "'" + found());
    next();
  }
  bool accept(char c) {
    if (!peek().is(c)) return false;
    next();
    return true;
  }
  std::string expect_ident(const char* what = "identifier") {
    if (peek().kind != TokenKind::Ident) fail(std::string("expected ") + what + found());
    return next().text;
  }
  void expect_arrow() {
    if (peek().kind != TokenKind::Arrow) fail("expected '->'" + found());
    next();
  }
  double expect_number() {
    bool negative = false;
    if (peek().is('-')) {
      next();
      negative = true;
    }
    if (peek().kind != TokenKind::Number) fail("expected a number" + found());
    const double v = next().number;
    return negative ? -v : v;
  }

  std::string found() const {
    const Token& t = peek();
    if (t.kind == TokenKind::End) return ", found end of input";
    return ", found '" + t.text + "'";
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

namespace detail {

inline Term parse_sum(TokenStream& ts);

inline Term parse_atom(TokenStream& ts) {
  const Token& t = ts.peek();
  switch (t.kind) {
    case TokenKind::Number: {
      const double v = ts.next().number;
      return Term::constant(v);
    }
    case TokenKind::Ident: {
      const std::string name = ts.next().text;
      if ((name == "max" || name == "min" || name == "abs") && ts.peek().is('(')) {
        ts.next();
        Term a = parse_sum(ts);
        if (name == "abs") {
          ts.expect(')');
          return Term::abs(a);
        }
        ts.expect(',');
        Term b = parse_sum(ts);
        ts.expect(')');
        return name == "max" ? Term::join(a, b) : Term::meet(a, b);
      }
      return Term::gen(name);
    }
    case TokenKind::Punct:
      if (t.is('(')) {
        ts.next();
        Term a = parse_sum(ts);
        ts.expect(')');
        return a;
      }
      break;
    default: break;
  }
  ts.fail("expected an expression" + ts.found());
}

inline Term parse_unary(TokenStream& ts) {
  if (ts.peek().is('-')) {
    ts.next();
    // A minus sign directly on a numeric literal is part of the literal.
    if (ts.peek().kind == TokenKind::Number) return Term::constant(-ts.next().number);
    return Term::neg(parse_unary(ts));
  }
  return parse_atom(ts);
}

inline Term parse_product(TokenStream& ts) {
  Term acc = parse_unary(ts);
  while (ts.peek().is('*')) {
    ts.next();
    acc = Term::mul(acc, parse_unary(ts));
  }
  return acc;
}

inline Term parse_sum(TokenStream& ts) {
  Term acc = parse_product(ts);
  for (;;) {
    if (ts.peek().is('+')) {
      ts.next();
      acc = Term::add(acc, parse_product(ts));
    } else if (ts.peek().is('-')) {
      ts.next();
      acc = Term::sub(acc, parse_product(ts));
    } else {
      return acc;
    }
  }
}

}  // namespace detail

/// Parses the longest expression starting at the cursor.
inline Term parse_expression(TokenStream& ts) { return detail::parse_sum(ts); }

/// Parses a complete expression:
///   expr  := expr ('+'|'-') mul | mul
///   mul   := mul '*' unary | unary
///   unary := '-' unary | atom
///   atom  := NUMBER | IDENT | '(' expr ')' | max(expr, expr) | min(expr, expr) | abs(expr)
inline Term parse_term(std::string_view text) {
  TokenStream ts(tokenize(text));
  Term t = parse_expression(ts);
  if (!ts.at_end()) ts.fail("unexpected token" + ts.found());
  return t;
}

}  // namespace fbal
