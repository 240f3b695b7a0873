#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rsl/diagnostics.hpp"
#include "rsl/model.hpp"

namespace rsl {

enum class SentenceCategory : std::uint8_t { UserStory, UseCase, QualityRequirement, Goal, Unclassified };

inline constexpr std::array kAllSentenceCategories = {
    SentenceCategory::UserStory, SentenceCategory::UseCase, SentenceCategory::QualityRequirement,
    SentenceCategory::Goal, SentenceCategory::Unclassified,
};

std::string_view to_string(SentenceCategory c) noexcept;
std::optional<SentenceCategory> sentence_category_from_string(std::string_view name) noexcept;

struct Sentence {
  std::string text;  // exact source slice, surrounding whitespace trimmed
  SourceSpan span;
};

/// Splits on `.`, `!`, `?` followed by whitespace or end of text, and on
/// blank lines. "e.g.", "i.e." and "etc." do not end a sentence.
std::vector<Sentence> split_sentences(std::string_view text, std::string_view file = {});

/// Fragment role to text, in the rule's role order.
using Fragments = std::vector<std::pair<std::string, std::string>>;

struct Classification {
  SentenceCategory category = SentenceCategory::Unclassified;
  Fragments fragments;
};

struct ExtractionRules {
  /// Whole-word, case-insensitive; the earliest occurrence in the predicate wins.
  std::vector<std::string> quality_keywords;
};

ExtractionRules default_extraction_rules();

/// Whitespace runs (newlines included) and control characters become one
/// space; the result is trimmed. Classification works on this form.
std::string normalize_sentence(std::string_view sentence);

/// First matching rule wins: user story, quality requirement, use case,
/// goal, else Unclassified. Fragments are slices of normalize_sentence(s)
/// without the final punctuation.
Classification classify_sentence(std::string_view sentence,
                                 const ExtractionRules& rules = default_extraction_rules());

/// Performance for respond/performance, Security for secure/encrypted,
/// Usability for usable, Reliability for reliable/available,
/// Maintainability for maintainable, Other for anything else.
QRKind qr_kind_for_keyword(std::string_view keyword);

/// `a_` + slug(phrase).
std::string actor_id_for(std::string_view phrase);

struct SentenceRecord {
  std::size_t index = 0;
  std::string text;
  SourceSpan span;
  SentenceCategory category = SentenceCategory::Unclassified;
  std::optional<std::string> extracted;  // element id
  Fragments fragments;
};

/// An actor created to satisfy a story's `asA` or a use case's initiator.
struct ExtractedActor {
  std::string id;
  std::string phrase;
  std::size_t introduced_by = 0;  // sentence index
};

struct ExtractionReport {
  std::vector<SentenceRecord> sentences;
  std::vector<ExtractedActor> actors;
  SpecificationModel model;
  std::map<SentenceCategory, std::size_t> counts;  // every category present, zero included
};

ExtractionReport extract_model(std::string_view text, QualifiedName package_name, std::string_view file = {},
                               const ExtractionRules& rules = default_extraction_rules());

/// Stable JSON; see docs/extraction-report.md.
std::string extraction_report_to_json(const ExtractionReport& report);

}  // namespace rsl
