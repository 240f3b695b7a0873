#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rsl/model.hpp"

namespace rsl {

struct Multiplicity {
  unsigned min = 0;
  std::optional<unsigned> max;  // nullopt: unbounded

  std::string str() const;  // "1", "0..1", "0..n"
  friend bool operator==(const Multiplicity&, const Multiplicity&) = default;
};

struct AttributeRule {
  std::string name;
  bool required = false;
  Multiplicity multiplicity;
};

/// Attribute paths use dots for nested records, e.g. `scenarios.steps.performer`.
struct VocabularyRule {
  std::string attribute;
  std::vector<std::string> terms;
};

/// Element rule (attribute group) plus vocabulary rules for one element kind.
struct LinguisticPattern {
  ElementKind element_kind;
  std::vector<AttributeRule> attribute_rules;
  std::vector<VocabularyRule> vocabulary_rules;

  const AttributeRule* attribute(std::string_view name) const noexcept;
  const VocabularyRule* vocabulary(std::string_view attribute) const noexcept;
};

/// Built-in pattern for a kind.
const LinguisticPattern& pattern_for(ElementKind kind);

/// Lookup by kind name; throws std::invalid_argument for an unknown kind.
const LinguisticPattern& pattern_for(std::string_view kind_name);

/// Every (attribute path, literal) pair of vocabulary-typed fields in `e`.
std::vector<std::pair<std::string, std::string>> vocabulary_fields(const Element& e);

/// A named template rendering one element kind. Placeholders are `{{attr}}`.
struct LinguisticStyle {
  std::string style_id;
  ElementKind pattern = ElementKind::Actor;
  std::string template_text;
};

/// Names inside `{{...}}` placeholders, in order of appearance.
std::vector<std::string> style_placeholders(std::string_view template_text);

/// Empty when every placeholder names an attribute of the style's pattern.
std::vector<std::string> unknown_style_placeholders(const LinguisticStyle& style);

}  // namespace rsl
