#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rsl/diagnostics.hpp"
#include "rsl/model.hpp"
#include "rsl/patterns.hpp"

namespace rsl {

// ---- JSON interchange ----

inline constexpr std::string_view kJsonSchemaVersion = "1";

/// Compact canonical JSON, keys in the order listed in docs/json-schema.md.
/// Spans and the source path are not serialized. No trailing newline.
std::string export_json(const SpecificationModel& model);

/// Inverse of export_json. Errors: RSL-T010 unknown key or kind, RSL-T011
/// schema version other than "1", RSL-T012 malformed document or value,
/// RSL-C001 duplicate id, RSL-P013 structurally invalid element.
Outcome<SpecificationModel> import_json(std::string_view text, std::string_view file = {});

// ---- CSV and workbooks ----

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // each padded or trimmed to header size
  std::vector<std::uint32_t> row_lines;        // 1-based line on which each row starts

  /// Index of `column` in the header, or npos.
  std::size_t column(std::string_view name) const noexcept;
};

/// RFC 4180 with CRLF record separators; fields are quoted only when they
/// contain a comma, quote, CR or LF.
std::string write_csv(const std::vector<std::vector<std::string>>& records);

/// Accepts LF or CRLF. A missing header or an unterminated quoted field is
/// RSL-T022 / RSL-T023 respectively; rows with a different field count than
/// the header are RSL-T023.
Outcome<CsvTable> read_csv(std::string_view text, std::string_view file = {});

inline constexpr std::array<std::string_view, 12> kWorkbookFiles = {
    "package.csv",          "actors.csv", "data_entities.csv",         "attributes.csv",
    "use_cases.csv",        "scenarios.csv", "steps.csv",             "user_stories.csv",
    "goals.csv",            "quality_requirements.csv", "test_cases.csv", "glossary.csv",
};

/// File name to CSV content for every workbook file (the pure half of
/// export_workbook).
std::map<std::string, std::string> workbook_tables(const SpecificationModel& model);

/// Writes the 12 workbook files into `dir`, creating it if needed.
/// RSL-T020 on any I/O failure.
Diagnostics export_workbook(const SpecificationModel& model, const std::filesystem::path& dir);

/// Assembles a model from workbook tables given as file name to content.
/// `label` prefixes file names in diagnostics. The result is canonical.
Outcome<SpecificationModel> import_workbook_tables(const std::map<std::string, std::string>& files,
                                                   const std::string& label = {});

/// Reads every `*.csv` in `dir` and defers to import_workbook_tables. Unknown
/// CSV files give RSL-T024 warnings; a missing directory is RSL-T020.
Outcome<SpecificationModel> import_workbook(const std::filesystem::path& dir);

// ---- document templates ----

/// Style sheet blocks, separated by blank lines:
///   style <id>
///   kind <ElementKind>
///   template <text>
/// Lines starting with `#` are comments. Malformed blocks are RSL-T012; a
/// template naming a field its kind lacks is RSL-T031.
Outcome<std::vector<LinguisticStyle>> parse_styles(std::string_view text, std::string_view file = {});

/// Fills a style's `{{field}}` placeholders from `e`. RSL-T031 when the
/// element kind differs from the style's pattern.
Outcome<std::string> render_style(const Element& e, const LinguisticStyle& style);

/// Expands `{{path}}`, `{{#each X}}..{{/each}}`, `{{#if X}}..{{/if}}`,
/// `{{this}}` and `{{style:id}}`. See docs/templates.md.
Outcome<std::string> render_document(const SpecificationModel& model, std::string_view template_text,
                                     const std::vector<LinguisticStyle>& styles,
                                     std::string_view template_file = {});

// ---- SQL ----

/// Bare when `[A-Za-z][A-Za-z0-9_]*`, otherwise double-quoted with inner
/// quotes doubled.
std::string sql_identifier(std::string_view name);

/// DDL for every DataEntity: CREATE TABLE statements in foreign-key
/// dependency order, then ALTER TABLE statements for foreign keys inside
/// dependency cycles. One statement per line.
Outcome<std::string> generate_sql(const SpecificationModel& model);

}  // namespace rsl
