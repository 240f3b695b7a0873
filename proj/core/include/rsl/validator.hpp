#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rsl/diagnostics.hpp"
#include "rsl/model.hpp"

namespace rsl {

enum class Strictness : std::uint8_t { ErrorsOnly, WarningsAsErrors };

/// Completeness levels and ambiguity lexicon. Construct rules are kept as
/// raw tokens (`<field>:set`, `<collection>>=<n>`) and validated when the
/// completeness check runs.
struct CheckConfig {
  std::set<ElementKind> model_required_kinds;
  std::map<std::string, std::set<ElementKind>> viewpoints;
  std::map<ElementKind, std::vector<std::string>> construct_rules;
  std::vector<std::string> vague_terms;  // lowercase
  Strictness strictness = Strictness::ErrorsOnly;

  friend bool operator==(const CheckConfig&, const CheckConfig&) = default;
};

/// The configuration used when no `rslcheck.json` is present. Identical to
/// the shipped `config/rslcheck.json`.
CheckConfig default_check_config();

/// Reads an `rslcheck.json` document (comments allowed). Unknown keys,
/// unknown element kinds and wrong value types yield RSL-X002.
Outcome<CheckConfig> parse_check_config(std::string_view json_text, std::string_view file = {});

struct SeverityCounts {
  std::size_t errors = 0;
  std::size_t warnings = 0;
  std::size_t infos = 0;
  friend bool operator==(const SeverityCounts&, const SeverityCounts&) = default;
};

struct ValidationReport {
  Diagnostics diagnostics;
  SeverityCounts counts;
  bool passed = true;
};

/// Referential integrity, step numbering, scenario and attribute uniqueness,
/// goal cycles and foreign-key typing (RSL-C010..C018).
Diagnostics check_consistency(const SpecificationModel& model);

/// Model-, viewpoint- and construct-level completeness (RSL-X010..X012),
/// plus RSL-X001 for malformed construct rules.
Diagnostics check_completeness(const SpecificationModel& model, const CheckConfig& config);

/// Vague terms, non-preferred synonyms and conflicting glossary entries
/// (RSL-A010..A012), all Warnings.
Diagnostics check_ambiguity(const SpecificationModel& model, const CheckConfig& config);

/// Consistency, completeness, ambiguity, in that order.
ValidationReport check_all(const SpecificationModel& model, const CheckConfig& config);

/// Stable JSON serialization of a report (key order fixed).
std::string report_to_json(const ValidationReport& report, std::string_view file);

/// Positions of whole-word, case-insensitive occurrences of `needle`
/// (lowercase, may contain spaces) in `text`. Word characters are ASCII
/// letters and digits.
std::vector<std::size_t> find_whole_word(std::string_view text, std::string_view needle);

}  // namespace rsl
