// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nlflow::js {

enum class TokenType {
  Identifier, // includes keywords; the parser decides contextually
  Punctuator,
  Number,
  String,
  Template,
  Regex,
  PrivateName,
  End,
};

enum class TemplatePart { NoSubstitution, Head, Middle, Tail };

struct Token {
  TokenType type = TokenType::End;
  /// Identifier name, punctuator, number text, or the cooked string value.
  std::string text;
  int line = 1;
  int column = 1;
  bool newline_before = false;
  TemplatePart template_part = TemplatePart::NoSubstitution;
  /// Text of the closest `/** ... */` comment between the previous token and
  /// this one, with comment delimiters stripped. Empty if none.
  std::string doc;

  bool is(TokenType t, std::string_view s) const { return type == t && text == s; }
  bool punct(std::string_view s) const { return is(TokenType::Punctuator, s); }
  bool ident(std::string_view s) const { return is(TokenType::Identifier, s); }
};

/// Tokenizes a whole JavaScript source. Throws ParseError on invalid input
/// (unterminated strings, comments, templates or regular expressions).
std::vector<Token> tokenize(std::string_view source);

} // namespace nlflow::js
