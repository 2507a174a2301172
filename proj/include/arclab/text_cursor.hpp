#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include "arclab/errors.hpp"
#include "arclab/oag.hpp"

namespace arclab {

/// Whitespace-skipping cursor shared by the DSL parsers.
class TextCursor {
 public:
  explicit TextCursor(std::string_view text) : text_(text) {}

  std::size_t position() const { return pos_; }
  void reset(std::size_t pos) { pos_ = pos; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  /// Consumes `token` if the input continues with it.
  bool accept(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }

  /// Like accept, but the token must not be followed by an identifier character.
  bool accept_word(std::string_view word) {
    skip_ws();
    if (text_.substr(pos_, word.size()) != word) return false;
    std::size_t end = pos_ + word.size();
    if (end < text_.size() && is_ident_char(text_[end])) return false;
    pos_ = end;
    return true;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= text_.size() || !(std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      fail("expected identifier");
    }
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  bool peek_digit() {
    skip_ws();
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  std::uint64_t natural() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected natural number");
    auto digits = text_.substr(start, pos_ - start);
    if (digits.size() > 18) fail("number too large");
    return std::stoull(std::string(digits));
  }

  /// [-] digits [/ digits]
  Rational rational() {
    skip_ws();
    std::size_t start = pos_;
    bool negative = accept("-");
    skip_ws();
    std::size_t num_start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (num_start == pos_) {
      pos_ = start;
      fail("expected rational number");
    }
    Integer num(std::string(text_.substr(num_start, pos_ - num_start)));
    Integer den = 1;
    std::size_t save = pos_;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '/' && pos_ + 1 < text_.size() &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      ++pos_;
      std::size_t den_start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      den = Integer(std::string(text_.substr(den_start, pos_ - den_start)));
      if (den == 0) fail("zero denominator");
    } else {
      pos_ = save;
    }
    Rational r(negative ? Integer(-num) : num, den);
    r.canonicalize();
    return r;
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

 private:
  static bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace arclab
