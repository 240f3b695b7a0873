#include <cstdint>

#include "rsl/model.hpp"
#include "rsl/parser.hpp"

namespace rsl {

namespace {

bool is_alpha(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) noexcept { return is_alpha(c) || is_digit(c) || c == '_'; }
bool is_punct(char c) noexcept {
  switch (c) {
    case '{': case '}': case '[': case ']': case '(': case ')': case ':': case ',': case '.':
      return true;
    default:
      return false;
  }
}

/// Length of the UTF-8 sequence introduced by `lead` (1 for invalid leads).
std::size_t utf8_length(unsigned char lead) noexcept {
  if (lead >= 0xF0 && lead <= 0xF4) return 4;
  if (lead >= 0xE0) return 3;
  if (lead >= 0xC2 && lead <= 0xDF) return 2;
  return 1;
}

class Lexer {
 public:
  Lexer(std::string_view src, std::string_view file) : src_(src), file_(file) {}

  LexResult run() {
    while (true) {
      skip_whitespace();
      if (pos_ >= src_.size()) break;
      char c = src_[pos_];
      if (c == '/' && peek(1) == '/') {
        lex_comment();
      } else if (c == '"') {
        lex_string();
      } else if (is_alpha(c)) {
        lex_word();
      } else if (is_digit(c)) {
        lex_int();
      } else if (is_punct(c)) {
        auto start = mark();
        advance(1);
        push(TokenKind::Punct, start);
      } else {
        auto start = mark();
        std::size_t len = utf8_length(static_cast<unsigned char>(c));
        std::string shown(src_.substr(pos_, len));
        advance(std::min(len, src_.size() - pos_));
        result_.diagnostics.push_back(
            Diagnostic::make(Code::P002_IllegalCharacter, span_from(start), "illegal character '" + shown + "'"));
      }
    }
    auto end = mark();
    result_.tokens.push_back(Token{TokenKind::EndOfFile, "", "", span_from(end), pos_});
    return std::move(result_);
  }

 private:
  struct Mark {
    std::size_t pos;
    std::uint32_t line;
    std::uint32_t col;
  };

  char peek(std::size_t ahead) const noexcept {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  Mark mark() const noexcept { return {pos_, line_, col_}; }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  SourceSpan span_from(const Mark& start) const {
    return SourceSpan{std::string(file_), start.line, start.col, line_, col_};
  }

  void push(TokenKind kind, const Mark& start, std::string value) {
    Token t{kind, std::string(src_.substr(start.pos, pos_ - start.pos)), std::move(value), span_from(start),
            start.pos};
    result_.tokens.push_back(std::move(t));
  }

  void push(TokenKind kind, const Mark& start) {
    push(kind, start, std::string(src_.substr(start.pos, pos_ - start.pos)));
  }

  void skip_whitespace() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance(1);
      } else {
        break;
      }
    }
  }

  void lex_comment() {
    auto start = mark();
    while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') advance(1);
    push(TokenKind::Comment, start);
  }

  void lex_word() {
    auto start = mark();
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance(1);
    auto word = src_.substr(start.pos, pos_ - start.pos);
    push(is_reserved_word(word) ? TokenKind::Keyword : TokenKind::Identifier, start);
  }

  void lex_int() {
    auto start = mark();
    while (pos_ < src_.size() && is_digit(src_[pos_])) advance(1);
    push(TokenKind::IntLiteral, start);
  }

  void lex_string() {
    auto start = mark();
    advance(1);
    std::string value;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n' || src_[pos_] == '\r') {
        result_.diagnostics.push_back(
            Diagnostic::make(Code::P001_UnterminatedString, span_from(start), "unterminated string literal"));
        push(TokenKind::StringLiteral, start, std::move(value));
        return;
      }
      char c = src_[pos_];
      if (c == '"') {
        advance(1);
        push(TokenKind::StringLiteral, start, std::move(value));
        return;
      }
      if (c == '\\') {
        char next = peek(1);
        if (next == '"' || next == '\\') {
          value += next;
          advance(2);
          continue;
        }
        auto esc = mark();
        advance(1);
        result_.diagnostics.push_back(Diagnostic::make(Code::P002_IllegalCharacter, span_from(esc),
                                                       "illegal escape; only \\\" and \\\\ are allowed"));
        continue;
      }
      value += c;
      advance(1);
    }
  }

  std::string_view src_;
  std::string_view file_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
  LexResult result_;
};

}  // namespace

std::string_view to_string(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::StringLiteral: return "string";
    case TokenKind::IntLiteral: return "integer";
    case TokenKind::Punct: return "punctuation";
    case TokenKind::Comment: return "comment";
    case TokenKind::EndOfFile: return "end of file";
  }
  return "token";
}

LexResult tokenize(std::string_view source, std::string_view file) { return Lexer(source, file).run(); }

}  // namespace rsl
