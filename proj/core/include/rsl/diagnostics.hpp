#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rsl {

/// 1-based source position range. Columns count bytes.
struct SourceSpan {
  std::string file;
  std::uint32_t start_line = 1;
  std::uint32_t start_col = 1;
  std::uint32_t end_line = 1;
  std::uint32_t end_col = 1;

  bool valid() const noexcept {
    return start_line >= 1 && start_col >= 1 && end_line >= 1 && end_col >= 1 &&
           std::pair(start_line, start_col) <= std::pair(end_line, end_col);
  }

  /// Smallest span covering both.
  static SourceSpan cover(const SourceSpan& a, const SourceSpan& b);

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class Severity : std::uint8_t { Error, Warning, Info };

std::string_view to_string(Severity s) noexcept;

/// Every code the toolchain can emit. The string form is `RSL-<family><nnn>`.
enum class Code : std::uint16_t {
  // parse
  P001_UnterminatedString,
  P002_IllegalCharacter,
  P010_ExpectedToken,
  P011_UnknownElementKeyword,
  P012_UnknownVocabularyLiteral,
  P013_InvalidElement,
  // consistency
  C001_DuplicateIdentifier,
  C010_UnresolvedReference,
  C011_WrongReferenceKind,
  C012_StepOrder,
  C013_DuplicateScenario,
  C014_GoalCycle,
  C015_MultipleMainScenarios,
  C016_ForeignKeyDatatype,
  C017_DuplicateAttribute,
  C018_MultiplePrimaryKeys,
  // completeness
  X001_MalformedConstructRule,
  X002_InvalidCheckConfig,
  X010_MissingRequiredKind,
  X011_EmptyViewpoint,
  X012_ConstructRuleViolated,
  // ambiguity
  A010_VagueTerm,
  A011_NonPreferredTerm,
  A012_ConflictingGlossary,
  // imports
  I010_ImportNotFound,
  I011_ImportParseFailed,
  I012_ImportCycle,
  // transforms
  T010_UnknownField,
  T011_UnsupportedSchemaVersion,
  T012_MalformedDocument,
  T020_IoFailure,
  T021_OrphanRow,
  T022_MissingColumn,
  T023_BadValue,
  T024_UnknownWorkbookFile,
  T030_UnknownPath,
  T031_UnknownStyle,
  T032_UnbalancedTags,
  T040_ForeignKeyTargetWithoutKey,
  T041_InconsistentModel,
  // libraries
  L010_NameCollision,
  L011_ManifestMismatch,
};

struct CodeInfo {
  Code code;
  std::string_view text;  // "RSL-C010"
  Severity default_severity;
  std::string_view meaning;
};

/// The full registry, in documentation order.
std::span<const CodeInfo> code_registry() noexcept;
const CodeInfo& info(Code code) noexcept;
std::string_view code_text(Code code) noexcept;
std::optional<Code> code_from_text(std::string_view text) noexcept;

/// Markdown table of the registry (the content of docs/diagnostics.md).
std::string render_code_table();

struct RelatedInfo {
  SourceSpan span;
  std::string message;
  friend bool operator==(const RelatedInfo&, const RelatedInfo&) = default;
};

struct Diagnostic {
  Severity severity = Severity::Error;
  Code code{};
  std::optional<SourceSpan> span;
  std::string message;
  std::vector<RelatedInfo> related;

  static Diagnostic make(Code code, std::optional<SourceSpan> span, std::string message);

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& diags) noexcept;
std::size_t count(const Diagnostics& diags, Severity s) noexcept;

/// `file:line:col: severity[code]: message`
std::string format_diagnostic(const Diagnostic& d, std::string_view fallback_file = {});

/// A value plus whatever diagnostics producing it raised. `value` is empty
/// when an Error-severity diagnostic prevented the result.
template <class T>
struct Outcome {
  std::optional<T> value;
  Diagnostics diagnostics;

  bool ok() const noexcept { return value.has_value() && !has_errors(diagnostics); }
  explicit operator bool() const noexcept { return ok(); }
};

}  // namespace rsl
