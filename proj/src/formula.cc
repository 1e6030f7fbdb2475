// Copyright 2026 The revstack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "revstack/formula.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include "revstack/error.hpp"

namespace revstack {

namespace {

enum class Tok { kNumber, kVar, kPlus, kMinus, kStar, kCaret, kLParen, kRParen, kEnd };

struct Token {
  Tok kind;
  int column;  // 1-based
  std::string_view text;
  double number = 0.0;
  int level = 0;   // 1-based as written
  int index = 0;   // 1-based as written, 0 for the short form
};

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    const int col = static_cast<int>(i) + 1;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const auto single = [&](Tok t) {
      out.push_back({t, col, s.substr(i, 1)});
      ++i;
    };
    switch (c) {
      case '+': single(Tok::kPlus); continue;
      case '-': single(Tok::kMinus); continue;
      case '*': single(Tok::kStar); continue;
      case '^': single(Tok::kCaret); continue;
      case '(': single(Tok::kLParen); continue;
      case ')': single(Tok::kRParen); continue;
      default: break;
    }
    if (is_digit(c) || c == '.') {
      size_t j = i;
      while (j < s.size() && is_digit(s[j])) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && is_digit(s[j])) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && is_digit(s[k])) {
          while (k < s.size() && is_digit(s[k])) ++k;
          j = k;
        }
      }
      Token t{Tok::kNumber, col, s.substr(i, j - i)};
      const auto r = std::from_chars(s.data() + i, s.data() + j, t.number);
      if (r.ec != std::errc() || r.ptr != s.data() + j) {
        throw SyntaxError("malformed number '" + std::string(t.text) + "'", 0, col);
      }
      out.push_back(t);
      i = j;
      continue;
    }
    if (c == 'u') {
      size_t j = i + 1;
      const auto read_int = [&](int& v) {
        const size_t start = j;
        while (j < s.size() && is_digit(s[j])) ++j;
        if (j == start) return false;
        const auto r = std::from_chars(s.data() + start, s.data() + j, v);
        return r.ec == std::errc();
      };
      Token t{Tok::kVar, col, {}};
      if (!read_int(t.level)) {
        throw SyntaxError("expected a level number after 'u'", 0, static_cast<int>(j) + 1);
      }
      if (j < s.size() && s[j] == '_') {
        ++j;
        if (!read_int(t.index)) {
          throw SyntaxError("expected an index after '_'", 0, static_cast<int>(j) + 1);
        }
      }
      if (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) {
        throw SyntaxError("malformed variable name", 0, col);
      }
      t.text = s.substr(i, j - i);
      out.push_back(t);
      i = j;
      continue;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", 0, col);
  }
  out.push_back({Tok::kEnd, static_cast<int>(s.size()) + 1, {}});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const std::optional<Dims>& dims)
      : toks_(std::move(toks)), dims_(dims) {}

  Expr parse() {
    Expr e = expr();
    if (peek().kind != Tok::kEnd) fail("unexpected '" + std::string(peek().text) + "'");
    return e;
  }

 private:
  const Token& peek(int ahead = 0) const {
    const size_t k = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[k];
  }
  const Token& take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, 0, peek().column);
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    while (peek().kind == Tok::kPlus || peek().kind == Tok::kMinus) {
      const bool minus = take().kind == Tok::kMinus;
      Expr t = term();
      terms.push_back(minus ? Expr::negate(std::move(t)) : std::move(t));
    }
    return Expr::sum(std::move(terms));
  }

  Expr term() {
    std::vector<Expr> factors{unary()};
    while (peek().kind == Tok::kStar) {
      take();
      factors.push_back(unary());
    }
    return Expr::product(std::move(factors));
  }

  Expr unary() {
    if (peek().kind == Tok::kMinus) {
      take();
      if (peek().kind == Tok::kNumber && peek(1).kind != Tok::kCaret) {
        return Expr::constant(-take().number);
      }
      return Expr::negate(unary());
    }
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (peek().kind != Tok::kCaret) return base;
    return Expr::power(std::move(base), exponent());
  }

  // After '^': INT ('^' INT)*, folded right to left.
  int exponent() {
    take();
    const Token& t = peek();
    if (t.kind != Tok::kNumber) fail("exponent must be a positive integer literal");
    for (char c : t.text) {
      if (!is_digit(c)) fail("exponent must be a positive integer literal");
    }
    if (!(t.number >= 1.0) || t.number > 1000.0) {
      fail("exponent must be an integer between 1 and 1000");
    }
    const int e = static_cast<int>(take().number);
    if (peek().kind != Tok::kCaret) return e;
    const int column = peek().column;
    const int rest = exponent();
    const double v = std::pow(static_cast<double>(e), rest);
    if (v > 1000.0) throw SyntaxError("exponent must be at most 1000", 0, column);
    return static_cast<int>(v);
  }

  Expr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kNumber:
        return Expr::constant(take().number);
      case Tok::kVar:
        return variable(take());
      case Tok::kLParen: {
        take();
        Expr e = expr();
        if (peek().kind != Tok::kRParen) fail("expected ')'");
        take();
        return e;
      }
      case Tok::kEnd:
        fail("unexpected end of formula");
      default:
        fail("unexpected '" + std::string(t.text) + "'");
    }
  }

  Expr variable(const Token& t) const {
    const std::string name(t.text);
    if (t.level < 1) throw UnknownVariableError("unknown variable " + name, 0, t.column);
    if (t.index == 0) {
      if (dims_ && t.level <= dims_->levels() && dims_->size(t.level - 1) != 1) {
        throw UnknownVariableError("level " + std::to_string(t.level) + " has " +
                                       std::to_string(dims_->size(t.level - 1)) +
                                       " components; write " + name + "_1 .. " + name + "_" +
                                       std::to_string(dims_->size(t.level - 1)),
                                   0, t.column);
      }
    } else if (t.index < 1) {
      throw UnknownVariableError("unknown variable " + name, 0, t.column);
    }
    const int index = t.index == 0 ? 0 : t.index - 1;
    if (dims_) {
      if (t.level > dims_->levels()) {
        throw UnknownVariableError("unknown variable " + name + ": the game has " +
                                       std::to_string(dims_->levels()) + " levels",
                                   0, t.column);
      }
      if (index >= dims_->size(t.level - 1)) {
        throw UnknownVariableError("unknown variable " + name + ": level " +
                                       std::to_string(t.level) + " has " +
                                       std::to_string(dims_->size(t.level - 1)) + " components",
                                   0, t.column);
      }
    }
    return Expr::var(t.level - 1, index);
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  const std::optional<Dims>& dims_;
};

bool is_negative_constant(const Expr& e) {
  return e.kind() == ExprKind::kConstant && std::signbit(e.value());
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, std::string& out) {
  out += '(';
  print(e, out);
  out += ')';
}

// Operand of + or -.
void print_term(const Expr& e, std::string& out) {
  if (e.kind() == ExprKind::kSum) {
    print_wrapped(e, out);
  } else {
    print(e, out);
  }
}

// Operand of *.
void print_factor(const Expr& e, std::string& out) {
  if (e.kind() == ExprKind::kSum || e.kind() == ExprKind::kProduct) {
    print_wrapped(e, out);
  } else {
    print(e, out);
  }
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case ExprKind::kConstant:
      out += format_number(e.value());
      return;
    case ExprKind::kVar:
      out += 'u' + std::to_string(e.level() + 1) + '_' + std::to_string(e.index() + 1);
      return;
    case ExprKind::kSum: {
      const auto kids = e.children();
      print_term(kids[0], out);
      for (size_t i = 1; i < kids.size(); ++i) {
        if (kids[i].kind() == ExprKind::kNegate) {
          out += " - ";
          print_term(kids[i].children()[0], out);
        } else {
          out += " + ";
          print_term(kids[i], out);
        }
      }
      return;
    }
    case ExprKind::kProduct: {
      const auto kids = e.children();
      for (size_t i = 0; i < kids.size(); ++i) {
        if (i > 0) out += '*';
        print_factor(kids[i], out);
      }
      return;
    }
    case ExprKind::kPower: {
      const Expr& base = e.children()[0];
      const bool atomic = base.kind() == ExprKind::kVar ||
                          (base.kind() == ExprKind::kConstant && !is_negative_constant(base));
      if (atomic) {
        print(base, out);
      } else {
        print_wrapped(base, out);
      }
      out += '^' + std::to_string(e.exponent());
      return;
    }
    case ExprKind::kNegate: {
      const Expr& c = e.children()[0];
      out += '-';
      if (c.kind() == ExprKind::kConstant || c.kind() == ExprKind::kSum ||
          c.kind() == ExprKind::kProduct) {
        print_wrapped(c, out);
      } else {
        print(c, out);
      }
      return;
    }
  }
}

}  // namespace

Expr parse_formula(std::string_view text, const std::optional<Dims>& dims) {
  Parser p(lex(text), dims);
  return p.parse();
}

std::string print_formula(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace revstack
