#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsl/diagnostics.hpp"
#include "rsl/model.hpp"

namespace rsl {

enum class TokenKind : std::uint8_t { Keyword, Identifier, StringLiteral, IntLiteral, Punct, Comment, EndOfFile };

std::string_view to_string(TokenKind kind) noexcept;

struct Token {
  TokenKind kind = TokenKind::EndOfFile;
  std::string text;    // raw lexeme, quotes and escapes included
  std::string value;   // decoded string literal contents; equals `text` otherwise
  SourceSpan span;     // end is exclusive
  std::size_t offset = 0;
};

struct LexResult {
  std::vector<Token> tokens;  // always ends with EndOfFile
  Diagnostics diagnostics;
};

/// Splits source text into tokens. Comments are kept as Comment tokens.
/// The bytes between consecutive tokens are whitespace only.
LexResult tokenize(std::string_view source, std::string_view file = {});

struct ParseResult {
  std::optional<SpecificationModel> model;
  Diagnostics diagnostics;

  bool ok() const noexcept { return model.has_value() && !has_errors(diagnostics); }
};

/// Parses one `.rsl` file. The model is present unless the package header
/// itself is unreadable; malformed elements are dropped and reported, and
/// parsing resumes at the next element keyword.
ParseResult parse(std::string_view source, std::string_view file = {});

/// Canonical text form: 4-space indentation, one element per block,
/// attributes in metamodel order, LF line endings.
std::string format(const SpecificationModel& model);

/// `"..."` with `\"` and `\\` escaped.
std::string quote(std::string_view text);

}  // namespace rsl
