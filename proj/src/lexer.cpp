#include "athena/detail/lexer.hpp"

#include <cctype>
#include <charconv>

#include "athena/errors.hpp"

namespace athena::detail {

std::string_view describe(TokenKind kind) {
  switch (kind) {
    case TokenKind::Number: return "number";
    case TokenKind::Ident: return "identifier";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Comma: return "','";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Less: return "'<'";
    case TokenKind::LessEqual: return "'<='";
    case TokenKind::Greater: return "'>'";
    case TokenKind::GreaterEqual: return "'>='";
    case TokenKind::Arrow: return "'->'";
    case TokenKind::End: return "end of input";
  }
  return "token";
}

Lexer::Lexer(std::string_view text) : text_(text) { current_ = scan(pos_); }

Token Lexer::scan(std::size_t& pos) const {
  while (pos < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos]))) ++pos;
  Token tok;
  tok.offset = pos;
  if (pos >= text_.size()) return tok;

  const char c = text_[pos];
  auto single = [&](TokenKind kind, std::size_t len = 1) {
    tok.kind = kind;
    tok.text = text_.substr(pos, len);
    pos += len;
    return tok;
  };
  const char la = pos + 1 < text_.size() ? text_[pos + 1] : '\0';

  if (std::isdigit(static_cast<unsigned char>(c)) ||
      (c == '.' && std::isdigit(static_cast<unsigned char>(la)))) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + pos, text_.data() + text_.size(), value);
    if (ec != std::errc()) fail_at("malformed number", pos);
    const auto len = static_cast<std::size_t>(ptr - (text_.data() + pos));
    tok.number = value;
    return single(TokenKind::Number, len);
  }
  if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
    std::size_t end = pos;
    while (end < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
      ++end;
    }
    return single(TokenKind::Ident, end - pos);
  }
  switch (c) {
    case '(': return single(TokenKind::LParen);
    case ')': return single(TokenKind::RParen);
    case '[': return single(TokenKind::LBracket);
    case ']': return single(TokenKind::RBracket);
    case ',': return single(TokenKind::Comma);
    case '+': return single(TokenKind::Plus);
    case '*': return single(TokenKind::Star);
    case '-': return la == '>' ? single(TokenKind::Arrow, 2) : single(TokenKind::Minus);
    case '<': return la == '=' ? single(TokenKind::LessEqual, 2) : single(TokenKind::Less);
    case '>': return la == '=' ? single(TokenKind::GreaterEqual, 2) : single(TokenKind::Greater);
    default: break;
  }
  fail_at(std::string("unexpected character '") + c + "'", pos);
}

TokenKind Lexer::peek_next() const {
  std::size_t pos = pos_;
  return scan(pos).kind;
}

Token Lexer::next() {
  Token tok = current_;
  current_ = scan(pos_);
  return tok;
}

bool Lexer::accept(TokenKind kind) {
  if (current_.kind != kind) return false;
  next();
  return true;
}

bool Lexer::at_keyword(std::string_view word) const noexcept {
  return current_.kind == TokenKind::Ident && current_.text == word;
}

bool Lexer::accept_keyword(std::string_view word) {
  if (!at_keyword(word)) return false;
  next();
  return true;
}

Token Lexer::expect(TokenKind kind) {
  if (current_.kind != kind) {
    fail("expected " + std::string(describe(kind)) + ", found " +
         std::string(describe(current_.kind)));
  }
  return next();
}

double Lexer::expect_number() {
  const bool negative = accept(TokenKind::Minus);
  if (!negative) accept(TokenKind::Plus);
  const double value = expect(TokenKind::Number).number;
  return negative ? -value : value;
}

void Lexer::fail(const std::string& message) const { fail_at(message, current_.offset); }

void Lexer::fail_at(const std::string& message, std::size_t offset) const {
  throw ParseError(message, offset);
}

}  // namespace athena::detail
