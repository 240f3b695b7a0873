#include "rsl/diagnostics.hpp"

#include <algorithm>
#include <sstream>

namespace rsl {

namespace {

constexpr std::array kRegistry = {
    CodeInfo{Code::P001_UnterminatedString, "RSL-P001", Severity::Error, "unterminated string literal"},
    CodeInfo{Code::P002_IllegalCharacter, "RSL-P002", Severity::Error, "illegal character"},
    CodeInfo{Code::P010_ExpectedToken, "RSL-P010", Severity::Error, "expected a different token"},
    CodeInfo{Code::P011_UnknownElementKeyword, "RSL-P011", Severity::Error, "unknown element keyword"},
    CodeInfo{Code::P012_UnknownVocabularyLiteral, "RSL-P012", Severity::Error,
             "literal is not a member of the attribute's vocabulary"},
    CodeInfo{Code::P013_InvalidElement, "RSL-P013", Severity::Error,
             "element violates a structural invariant (identifier form, empty text, synonym equal to term)"},
    CodeInfo{Code::C001_DuplicateIdentifier, "RSL-C001", Severity::Error, "duplicate element identifier"},
    CodeInfo{Code::C010_UnresolvedReference, "RSL-C010", Severity::Error, "reference does not resolve"},
    CodeInfo{Code::C011_WrongReferenceKind, "RSL-C011", Severity::Error,
             "reference resolves to an element of the wrong kind"},
    CodeInfo{Code::C012_StepOrder, "RSL-C012", Severity::Error,
             "step orders are not strictly ascending within a scenario"},
    CodeInfo{Code::C013_DuplicateScenario, "RSL-C013", Severity::Error, "duplicate scenario id in a use case"},
    CodeInfo{Code::C014_GoalCycle, "RSL-C014", Severity::Error, "goal partOf links form a cycle"},
    CodeInfo{Code::C015_MultipleMainScenarios, "RSL-C015", Severity::Error,
             "use case has more than one Main scenario"},
    CodeInfo{Code::C016_ForeignKeyDatatype, "RSL-C016", Severity::Error,
             "foreign key attribute must be Integer or Text"},
    CodeInfo{Code::C017_DuplicateAttribute, "RSL-C017", Severity::Error, "duplicate attribute name in a data entity"},
    CodeInfo{Code::C018_MultiplePrimaryKeys, "RSL-C018", Severity::Error,
             "data entity has more than one PrimaryKey attribute"},
    CodeInfo{Code::X001_MalformedConstructRule, "RSL-X001", Severity::Error, "malformed construct rule in check config"},
    CodeInfo{Code::X002_InvalidCheckConfig, "RSL-X002", Severity::Error,
             "check config is unreadable or names an unknown element kind"},
    CodeInfo{Code::X010_MissingRequiredKind, "RSL-X010", Severity::Warning,
             "model has no element of a required kind"},
    CodeInfo{Code::X011_EmptyViewpoint, "RSL-X011", Severity::Warning, "viewpoint has no element instances"},
    CodeInfo{Code::X012_ConstructRuleViolated, "RSL-X012", Severity::Warning, "element violates a construct rule"},
    CodeInfo{Code::A010_VagueTerm, "RSL-A010", Severity::Warning, "vague term used in specification text"},
    CodeInfo{Code::A011_NonPreferredTerm, "RSL-A011", Severity::Warning,
             "non-preferred synonym used where a preferred glossary term exists"},
    CodeInfo{Code::A012_ConflictingGlossary, "RSL-A012", Severity::Warning,
             "two preferred glossary terms declare each other as synonyms"},
    CodeInfo{Code::I010_ImportNotFound, "RSL-I010", Severity::Error, "imported package not found on the search path"},
    CodeInfo{Code::I011_ImportParseFailed, "RSL-I011", Severity::Error, "imported file fails to parse"},
    CodeInfo{Code::I012_ImportCycle, "RSL-I012", Severity::Error, "import cycle"},
    CodeInfo{Code::T010_UnknownField, "RSL-T010", Severity::Error, "unknown field in JSON document"},
    CodeInfo{Code::T011_UnsupportedSchemaVersion, "RSL-T011", Severity::Error, "unsupported JSON schema version"},
    CodeInfo{Code::T012_MalformedDocument, "RSL-T012", Severity::Error, "malformed JSON document or style sheet"},
    CodeInfo{Code::T020_IoFailure, "RSL-T020", Severity::Error, "file system read or write failure"},
    CodeInfo{Code::T021_OrphanRow, "RSL-T021", Severity::Error, "workbook row references an absent parent"},
    CodeInfo{Code::T022_MissingColumn, "RSL-T022", Severity::Error, "workbook table misses a required column"},
    CodeInfo{Code::T023_BadValue, "RSL-T023", Severity::Error, "workbook cell holds a bad vocabulary literal or value"},
    CodeInfo{Code::T024_UnknownWorkbookFile, "RSL-T024", Severity::Warning, "unknown workbook file ignored"},
    CodeInfo{Code::T030_UnknownPath, "RSL-T030", Severity::Error, "template references an unknown path"},
    CodeInfo{Code::T031_UnknownStyle, "RSL-T031", Severity::Error,
             "template references an unknown or mismatched style"},
    CodeInfo{Code::T032_UnbalancedTags, "RSL-T032", Severity::Error, "template tags are unbalanced"},
    CodeInfo{Code::T040_ForeignKeyTargetWithoutKey, "RSL-T040", Severity::Error,
             "foreign key target has no PrimaryKey attribute"},
    CodeInfo{Code::T041_InconsistentModel, "RSL-T041", Severity::Error,
             "code generation requires a consistent model"},
    CodeInfo{Code::L010_NameCollision, "RSL-L010", Severity::Error, "qualified name collision after merge"},
    CodeInfo{Code::L011_ManifestMismatch, "RSL-L011", Severity::Error,
             "library manifest is malformed or names a different package"},
};

}  // namespace

SourceSpan SourceSpan::cover(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan out = a;
  if (std::pair(b.start_line, b.start_col) < std::pair(a.start_line, a.start_col)) {
    out.start_line = b.start_line;
    out.start_col = b.start_col;
  }
  if (std::pair(b.end_line, b.end_col) > std::pair(a.end_line, a.end_col)) {
    out.end_line = b.end_line;
    out.end_col = b.end_col;
  }
  return out;
}

std::string_view to_string(Severity s) noexcept {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Info: return "info";
  }
  return "error";
}

std::span<const CodeInfo> code_registry() noexcept { return kRegistry; }

const CodeInfo& info(Code code) noexcept {
  for (const auto& entry : kRegistry) {
    if (entry.code == code) return entry;
  }
  return kRegistry.front();  // unreachable: every enumerator is registered
}

std::string_view code_text(Code code) noexcept { return info(code).text; }

std::optional<Code> code_from_text(std::string_view text) noexcept {
  for (const auto& entry : kRegistry) {
    if (entry.text == text) return entry.code;
  }
  return std::nullopt;
}

std::string render_code_table() {
  std::ostringstream out;
  out << "# Diagnostic codes\n\n"
      << "Generated from the code registry in `core/src/diagnostics.cpp` by `rsl-diagtable`.\n"
      << "Family letters: P parse, C consistency, X completeness, A ambiguity, I import,\n"
      << "T transform, L library. Completeness findings are Warnings unless the check\n"
      << "configuration selects `WarningsAsErrors`.\n\n"
      << "| Code | Default severity | Meaning |\n"
      << "|------|------------------|---------|\n";
  for (const auto& entry : kRegistry) {
    out << "| " << entry.text << " | " << to_string(entry.default_severity) << " | " << entry.meaning << " |\n";
  }
  return out.str();
}

Diagnostic Diagnostic::make(Code code, std::optional<SourceSpan> span, std::string message) {
  return Diagnostic{info(code).default_severity, code, std::move(span), std::move(message), {}};
}

bool has_errors(const Diagnostics& diags) noexcept {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::size_t count(const Diagnostics& diags, Severity s) noexcept {
  return static_cast<std::size_t>(
      std::count_if(diags.begin(), diags.end(), [s](const Diagnostic& d) { return d.severity == s; }));
}

std::string format_diagnostic(const Diagnostic& d, std::string_view fallback_file) {
  std::ostringstream out;
  if (d.span) {
    out << (d.span->file.empty() ? std::string(fallback_file) : d.span->file) << ':' << d.span->start_line << ':'
        << d.span->start_col;
  } else {
    out << fallback_file;
  }
  out << ": " << to_string(d.severity) << '[' << code_text(d.code) << "]: " << d.message;
  return out.str();
}

}  // namespace rsl
