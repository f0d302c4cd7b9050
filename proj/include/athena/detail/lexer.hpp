#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace athena::detail {

enum class TokenKind {
  Number,
  Ident,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Plus,
  Minus,
  Star,
  Less,
  LessEqual,
  Greater,
  GreaterEqual,
  Arrow,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string_view text;
  std::size_t offset = 0;
  double number = 0.0;
};

std::string_view describe(TokenKind kind);

/// Tokenizer shared by the formula and manual-fitness parsers. Whitespace is
/// skipped; offsets index into the original text.
class Lexer {
 public:
  explicit Lexer(std::string_view text);

  const Token& peek() const noexcept { return current_; }
  /// Kind of the token after the current one.
  TokenKind peek_next() const;
  Token next();

  bool accept(TokenKind kind);
  bool accept_keyword(std::string_view word);
  bool at_keyword(std::string_view word) const noexcept;
  Token expect(TokenKind kind);
  double expect_number();

  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] void fail_at(const std::string& message, std::size_t offset) const;

 private:
  Token scan(std::size_t& pos) const;

  std::string_view text_;
  std::size_t pos_ = 0;
  Token current_;
};

}  // namespace athena::detail
