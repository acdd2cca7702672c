// Copyright 2026 The nlflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "nlflow/js_lexer.hpp"

#include "nlflow/common.hpp"

#include <array>
#include <cstdint>

namespace nlflow::js {

namespace {

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_part(unsigned char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

int hex_value(char c) {
  if (c >= '0' && c <= '9')
    return c - '0';
  if (c >= 'a' && c <= 'f')
    return c - 'a' + 10;
  if (c >= 'A' && c <= 'F')
    return c - 'A' + 10;
  return -1;
}

void append_utf8(std::string &out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xc0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xe0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else {
    out += static_cast<char>(0xf0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  }
}

// Longest match first.
constexpr std::array<std::string_view, 52> kPunctuators = {
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "?\?=",
    "=>",   "==",  "!=",  "<=",  ">=",  "&&",  "||",  "??",  "?.",  "++",  "--",
    "+=",   "-=",  "*=",  "/=",  "%=",  "&=",  "|=",  "^=",  "<<",  ">>",  "**",
    "{",    "}",   "(",   ")",   "[",   "]",   ";",   ",",   "<",   ">",   "+",
    "-",    "*",   "/",   "%",   "&",   "|",   "^",   "!"};

constexpr std::array<std::string_view, 6> kSinglePunct = {"~", "?", ":", "=", ".", "@"};

constexpr std::array<std::string_view, 14> kRegexAfterKeyword = {
    "return", "typeof", "instanceof", "in",   "of",   "new",  "delete",
    "void",   "throw",  "case",       "do",   "else", "yield", "await"};

std::string clean_doc(std::string_view body) {
  // Strip leading " * " decorations from each line.
  std::string out;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= body.size()) {
    std::size_t nl = body.find('\n', pos);
    std::string_view line = body.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                          : nl - pos);
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
      ++i;
    if (i < line.size() && line[i] == '*') {
      ++i;
      if (i < line.size() && line[i] == ' ')
        ++i;
    }
    std::string_view rest = line.substr(i);
    while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t' || rest.back() == '\r'))
      rest.remove_suffix(1);
    if (!first)
      out += '\n';
    out += rest;
    first = false;
    if (nl == std::string_view::npos)
      break;
    pos = nl + 1;
  }
  // Trim blank lines at both ends.
  std::size_t b = out.find_first_not_of("\n");
  if (b == std::string::npos)
    return {};
  std::size_t e = out.find_last_not_of("\n");
  return out.substr(b, e - b + 1);
}

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    if (src_.substr(0, 2) == "#!") {
      while (pos_ < src_.size() && src_[pos_] != '\n')
        ++pos_;
    }
    for (;;) {
      skip_trivia();
      Token tok;
      tok.line = line_;
      tok.column = column();
      tok.newline_before = newline_;
      tok.doc = std::move(pending_doc_);
      pending_doc_.clear();
      newline_ = false;
      if (pos_ >= src_.size()) {
        tok.type = TokenType::End;
        if (!braces_.empty() && braces_.back())
          throw ParseError("unterminated template literal", line_, column());
        tokens_.push_back(std::move(tok));
        return std::move(tokens_);
      }
      lex_one(tok);
      tokens_.push_back(std::move(tok));
    }
  }

private:
  int column() const { return static_cast<int>(pos_ - line_start_) + 1; }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string &what) const {
    throw ParseError(what, line_, column());
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        newline_ = true;
        advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        advance();
      } else if (static_cast<unsigned char>(c) == 0xe2 && pos_ + 2 < src_.size() &&
                 static_cast<unsigned char>(src_[pos_ + 1]) == 0x80 &&
                 (static_cast<unsigned char>(src_[pos_ + 2]) == 0xa8 ||
                  static_cast<unsigned char>(src_[pos_ + 2]) == 0xa9)) {
        newline_ = true;
        pos_ += 3;
      } else if (static_cast<unsigned char>(c) == 0xef && pos_ + 2 < src_.size() &&
                 static_cast<unsigned char>(src_[pos_ + 1]) == 0xbb &&
                 static_cast<unsigned char>(src_[pos_ + 2]) == 0xbf) {
        pos_ += 3; // BOM
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n')
          advance();
      } else if (c == '/' && peek(1) == '*') {
        int start_line = line_, start_col = column();
        std::size_t start = pos_;
        pos_ += 2;
        bool closed = false;
        while (pos_ < src_.size()) {
          if (src_[pos_] == '*' && peek(1) == '/') {
            pos_ += 2;
            closed = true;
            break;
          }
          if (src_[pos_] == '\n')
            newline_ = true;
          advance();
        }
        if (!closed)
          throw ParseError("unterminated comment", start_line, start_col);
        std::string_view text = src_.substr(start, pos_ - start);
        if (text.size() >= 5 && text[2] == '*' && text[3] != '/')
          pending_doc_ = clean_doc(text.substr(3, text.size() - 5));
      } else {
        break;
      }
    }
  }

  bool regex_allowed() const {
    if (tokens_.empty())
      return true;
    const Token &prev = tokens_.back();
    switch (prev.type) {
    case TokenType::Number:
    case TokenType::String:
    case TokenType::Regex:
    case TokenType::PrivateName:
      return false;
    case TokenType::Template:
      return prev.template_part == TemplatePart::Head ||
             prev.template_part == TemplatePart::Middle;
    case TokenType::Identifier:
      for (auto kw : kRegexAfterKeyword)
        if (prev.text == kw)
          return true;
      return false;
    case TokenType::Punctuator:
      return !(prev.text == ")" || prev.text == "]" || prev.text == "}");
    case TokenType::End:
      return true;
    }
    return true;
  }

  void lex_one(Token &tok) {
    unsigned char c = static_cast<unsigned char>(src_[pos_]);
    if (is_ident_start(c) || c == '\\') {
      tok.type = TokenType::Identifier;
      tok.text = lex_identifier();
      return;
    }
    if (c == '#' && pos_ + 1 < src_.size() &&
        is_ident_start(static_cast<unsigned char>(src_[pos_ + 1]))) {
      advance();
      tok.type = TokenType::PrivateName;
      tok.text = "#" + lex_identifier();
      return;
    }
    if (is_digit(c) || (c == '.' && is_digit(static_cast<unsigned char>(peek(1))))) {
      tok.type = TokenType::Number;
      tok.text = lex_number();
      return;
    }
    if (c == '"' || c == '\'') {
      tok.type = TokenType::String;
      tok.text = lex_string(static_cast<char>(c));
      return;
    }
    if (c == '`') {
      advance();
      lex_template(tok);
      return;
    }
    if (c == '}' && !braces_.empty() && braces_.back()) {
      braces_.pop_back();
      advance();
      lex_template(tok);
      return;
    }
    if (c == '/' && regex_allowed()) {
      tok.type = TokenType::Regex;
      tok.text = lex_regex();
      return;
    }
    tok.type = TokenType::Punctuator;
    for (auto p : kPunctuators) {
      if (src_.substr(pos_, p.size()) == p) {
        if (p == "?." && is_digit(static_cast<unsigned char>(peek(2))))
          continue;
        tok.text = std::string(p);
        pos_ += p.size();
        track_brace(tok.text);
        return;
      }
    }
    for (auto p : kSinglePunct) {
      if (src_[pos_] == p[0]) {
        tok.text = std::string(p);
        ++pos_;
        return;
      }
    }
    fail(std::string("unexpected character '") + static_cast<char>(c) + "'");
  }

  void track_brace(const std::string &p) {
    if (p == "{")
      braces_.push_back(false);
    else if (p == "}" && !braces_.empty())
      braces_.pop_back();
  }

  std::string lex_identifier() {
    std::string out;
    while (pos_ < src_.size()) {
      unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (c == '\\' && peek(1) == 'u') {
        pos_ += 2;
        append_utf8(out, lex_unicode_escape());
        continue;
      }
      if (!is_ident_part(c))
        break;
      out += static_cast<char>(c);
      advance();
    }
    if (out.empty())
      fail("invalid identifier");
    return out;
  }

  std::uint32_t lex_unicode_escape() {
    std::uint32_t cp = 0;
    if (peek() == '{') {
      advance();
      int digits = 0;
      while (peek() != '}') {
        int v = hex_value(peek());
        if (v < 0)
          fail("invalid unicode escape");
        cp = cp * 16 + static_cast<std::uint32_t>(v);
        ++digits;
        advance();
      }
      advance();
      if (digits == 0 || cp > 0x10ffff)
        fail("invalid unicode escape");
      return cp;
    }
    for (int i = 0; i < 4; ++i) {
      int v = hex_value(peek());
      if (v < 0)
        fail("invalid unicode escape");
      cp = cp * 16 + static_cast<std::uint32_t>(v);
      advance();
    }
    return cp;
  }

  std::string lex_number() {
    std::size_t start = pos_;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X' || peek(1) == 'o' || peek(1) == 'O' ||
                          peek(1) == 'b' || peek(1) == 'B')) {
      pos_ += 2;
      while (pos_ < src_.size() && (hex_value(src_[pos_]) >= 0 || src_[pos_] == '_'))
        ++pos_;
    } else {
      while (pos_ < src_.size() && (is_digit(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '_'))
        ++pos_;
      if (peek() == '.') {
        ++pos_;
        while (pos_ < src_.size() && (is_digit(static_cast<unsigned char>(src_[pos_])) ||
                                      src_[pos_] == '_'))
          ++pos_;
      }
      if (peek() == 'e' || peek() == 'E') {
        ++pos_;
        if (peek() == '+' || peek() == '-')
          ++pos_;
        if (!is_digit(static_cast<unsigned char>(peek())))
          fail("malformed exponent");
        while (pos_ < src_.size() && is_digit(static_cast<unsigned char>(src_[pos_])))
          ++pos_;
      }
    }
    if (peek() == 'n')
      ++pos_;
    if (pos_ < src_.size() && is_ident_start(static_cast<unsigned char>(src_[pos_])))
      fail("identifier directly after number");
    return std::string(src_.substr(start, pos_ - start));
  }

  // Decodes the escape after a backslash. Line continuations append nothing.
  void lex_escape(std::string &out) {
    char e = peek();
    if (e == '\0')
      fail("unterminated escape");
    advance();
    switch (e) {
    case 'n': out += '\n'; break;
    case 't': out += '\t'; break;
    case 'r': out += '\r'; break;
    case 'b': out += '\b'; break;
    case 'f': out += '\f'; break;
    case 'v': out += '\v'; break;
    case '0':
      if (!is_digit(static_cast<unsigned char>(peek()))) {
        out += '\0';
        break;
      }
      [[fallthrough]];
    case 'x':
      if (e == 'x') {
        int hi = hex_value(peek());
        int lo = hex_value(peek(1));
        if (hi < 0 || lo < 0)
          fail("invalid hex escape");
        pos_ += 2;
        append_utf8(out, static_cast<std::uint32_t>(hi * 16 + lo));
        break;
      }
      out += e;
      break;
    case 'u': append_utf8(out, lex_unicode_escape()); break;
    case '\r':
      if (peek() == '\n')
        advance();
      break;
    case '\n': break;
    default: out += e; break;
    }
  }

  std::string lex_string(char quote) {
    int start_line = line_, start_col = column();
    advance();
    std::string out;
    for (;;) {
      if (pos_ >= src_.size() || src_[pos_] == '\n')
        throw ParseError("unterminated string literal", start_line, start_col);
      char c = src_[pos_];
      if (c == quote) {
        advance();
        return out;
      }
      if (c == '\\') {
        advance();
        lex_escape(out);
        continue;
      }
      out += c;
      advance();
    }
  }

  // Called just after '`' or the '}' closing a substitution.
  void lex_template(Token &tok) {
    bool opened_with_backtick = pos_ > 0 && src_[pos_ - 1] == '`';
    tok.type = TokenType::Template;
    std::string out;
    for (;;) {
      if (pos_ >= src_.size())
        throw ParseError("unterminated template literal", tok.line, tok.column);
      char c = src_[pos_];
      if (c == '`') {
        advance();
        tok.template_part =
            opened_with_backtick ? TemplatePart::NoSubstitution : TemplatePart::Tail;
        break;
      }
      if (c == '$' && peek(1) == '{') {
        pos_ += 2;
        braces_.push_back(true);
        tok.template_part = opened_with_backtick ? TemplatePart::Head : TemplatePart::Middle;
        break;
      }
      if (c == '\\') {
        advance();
        lex_escape(out);
        continue;
      }
      out += c;
      advance();
    }
    tok.text = std::move(out);
  }

  std::string lex_regex() {
    int start_line = line_, start_col = column();
    std::size_t start = pos_;
    advance();
    bool in_class = false;
    for (;;) {
      if (pos_ >= src_.size() || src_[pos_] == '\n')
        throw ParseError("unterminated regular expression", start_line, start_col);
      char c = src_[pos_];
      if (c == '\\') {
        pos_ += 2;
        continue;
      }
      if (c == '[')
        in_class = true;
      else if (c == ']')
        in_class = false;
      else if (c == '/' && !in_class)
        break;
      advance();
    }
    advance();
    while (pos_ < src_.size() && is_ident_part(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;
  bool newline_ = false;
  std::string pending_doc_;
  // One entry per open '{' (false) or template substitution (true).
  std::vector<bool> braces_;
  std::vector<Token> tokens_;
};

} // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

} // namespace nlflow::js
