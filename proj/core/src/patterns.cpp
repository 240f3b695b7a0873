#include "rsl/patterns.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace rsl {

namespace {

constexpr Multiplicity kOne{1, 1};
constexpr Multiplicity kOptional{0, 1};
constexpr Multiplicity kMany{0, std::nullopt};

template <class E>
VocabularyRule vocab(std::string attribute) {
  VocabularyRule rule{std::move(attribute), {}};
  for (auto lit : literals<E>()) rule.terms.emplace_back(lit);
  return rule;
}

LinguisticPattern make(ElementKind kind, std::vector<AttributeRule> specific, std::vector<VocabularyRule> vocabs) {
  LinguisticPattern p{kind, {{"id", true, kOne}, {"name", false, kOptional}, {"description", false, kOptional}},
                      std::move(vocabs)};
  for (auto& r : specific) p.attribute_rules.push_back(std::move(r));
  return p;
}

std::array<LinguisticPattern, kAllElementKinds.size()> build_patterns() {
  return {
      make(ElementKind::Actor, {{"kind", true, kOne}}, {vocab<ActorKind>("kind")}),
      make(ElementKind::DataEntity, {{"kind", true, kOne}, {"attributes", false, kMany}},
           {vocab<EntityKind>("kind"), vocab<Datatype>("attributes.datatype"),
            vocab<Constraint>("attributes.constraints")}),
      make(ElementKind::UseCase,
           {{"kind", true, kOne},
            {"primary_actor", true, kOne},
            {"data_entities", false, kMany},
            {"scenarios", false, kMany}},
           {vocab<UseCaseKind>("kind"), vocab<ScenarioKind>("scenarios.kind"),
            vocab<Performer>("scenarios.steps.performer")}),
      make(ElementKind::UserStory,
           {{"as_a", true, kOne}, {"i_want", true, kOne}, {"so_that", false, kOptional}, {"priority", false, kOptional}},
           {vocab<Priority>("priority")}),
      make(ElementKind::Goal, {{"parent", false, kOptional}, {"priority", false, kOptional}},
           {vocab<Priority>("priority")}),
      make(ElementKind::QualityRequirement,
           {{"kind", true, kOne}, {"metric", false, kOptional}, {"target_value", false, kOptional}},
           {vocab<QRKind>("kind")}),
      make(ElementKind::TestCase,
           {{"traces_to", true, kOne},
            {"scenario_ref", false, kOptional},
            {"given", false, kMany},
            {"when", false, kMany},
            {"then", false, kMany}},
           {}),
      make(ElementKind::GlossaryTerm,
           {{"term", true, kOne},
            {"part_of_speech", true, kOne},
            {"definition", false, kOptional},
            {"synonyms", false, kMany},
            {"preferred", false, kOptional}},
           {vocab<PartOfSpeech>("part_of_speech")}),
  };
}

const std::array<LinguisticPattern, kAllElementKinds.size()>& patterns() {
  static const auto table = build_patterns();
  return table;
}

}  // namespace

std::string Multiplicity::str() const {
  if (max && *max == min) return std::to_string(min);
  return std::to_string(min) + ".." + (max ? std::to_string(*max) : std::string("n"));
}

const AttributeRule* LinguisticPattern::attribute(std::string_view name) const noexcept {
  auto it = std::find_if(attribute_rules.begin(), attribute_rules.end(),
                         [&](const AttributeRule& r) { return r.name == name; });
  return it == attribute_rules.end() ? nullptr : &*it;
}

const VocabularyRule* LinguisticPattern::vocabulary(std::string_view attr) const noexcept {
  auto it = std::find_if(vocabulary_rules.begin(), vocabulary_rules.end(),
                         [&](const VocabularyRule& r) { return r.attribute == attr; });
  return it == vocabulary_rules.end() ? nullptr : &*it;
}

const LinguisticPattern& pattern_for(ElementKind kind) { return patterns()[static_cast<std::size_t>(kind)]; }

const LinguisticPattern& pattern_for(std::string_view kind_name) {
  auto kind = element_kind_from_string(kind_name);
  if (!kind) throw std::invalid_argument("unknown element kind '" + std::string(kind_name) + "'");
  return pattern_for(*kind);
}

std::vector<std::pair<std::string, std::string>> vocabulary_fields(const Element& e) {
  std::vector<std::pair<std::string, std::string>> out;
  auto add = [&](std::string path, std::string_view lit) { out.emplace_back(std::move(path), std::string(lit)); };
  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, Actor>) {
          add("kind", literal(body.kind));
        } else if constexpr (std::is_same_v<T, DataEntity>) {
          add("kind", literal(body.kind));
          for (const auto& attr : body.attributes) {
            add("attributes.datatype", literal(attr.datatype));
            for (auto c : attr.constraints.members()) add("attributes.constraints", literal(c));
          }
        } else if constexpr (std::is_same_v<T, UseCase>) {
          add("kind", literal(body.kind));
          for (const auto& sc : body.scenarios) {
            add("scenarios.kind", literal(sc.kind));
            for (const auto& st : sc.steps) add("scenarios.steps.performer", literal(st.performer));
          }
        } else if constexpr (std::is_same_v<T, UserStory> || std::is_same_v<T, Goal>) {
          add("priority", literal(body.priority));
        } else if constexpr (std::is_same_v<T, QualityRequirement>) {
          add("kind", literal(body.kind));
        } else if constexpr (std::is_same_v<T, GlossaryTerm>) {
          add("part_of_speech", literal(body.part_of_speech));
        }
      },
      e.body);
  return out;
}

std::vector<std::string> style_placeholders(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string_view::npos) {
    auto close = text.find("}}", pos + 2);
    if (close == std::string_view::npos) break;
    std::string_view inner = text.substr(pos + 2, close - pos - 2);
    while (!inner.empty() && inner.front() == ' ') inner.remove_prefix(1);
    while (!inner.empty() && inner.back() == ' ') inner.remove_suffix(1);
    out.emplace_back(inner);
    pos = close + 2;
  }
  return out;
}

std::vector<std::string> unknown_style_placeholders(const LinguisticStyle& style) {
  const auto& pattern = pattern_for(style.pattern);
  std::vector<std::string> unknown;
  for (auto& name : style_placeholders(style.template_text)) {
    if (!pattern.attribute(name)) unknown.push_back(std::move(name));
  }
  return unknown;
}

}  // namespace rsl
