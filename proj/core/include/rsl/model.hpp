#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "rsl/diagnostics.hpp"
#include "rsl/vocabulary.hpp"

namespace rsl {

/// Words the grammar reserves; none of them may be used as an identifier.
bool is_reserved_word(std::string_view word) noexcept;

/// `[A-Za-z][A-Za-z0-9_]*` and not reserved.
bool is_identifier(std::string_view text) noexcept;

/// Dot-separated identifiers, e.g. `org.acme.orders`.
class QualifiedName {
 public:
  /// Throws std::invalid_argument when a segment is not an identifier.
  explicit QualifiedName(std::vector<std::string> segments);
  /// Throws std::invalid_argument on a malformed dotted name.
  explicit QualifiedName(std::string_view dotted);

  static std::optional<QualifiedName> parse(std::string_view dotted);

  const std::vector<std::string>& segments() const noexcept { return segments_; }
  const std::string& last() const noexcept { return segments_.back(); }
  std::string str() const;

  friend bool operator==(const QualifiedName&, const QualifiedName&) = default;
  friend auto operator<=>(const QualifiedName&, const QualifiedName&) = default;

 private:
  std::vector<std::string> segments_;
};

/// True when `text` is a dotted sequence of identifiers (a bare identifier
/// qualifies). Element ids and references use this form; ids are bare in
/// source files and become qualified when libraries are merged.
bool is_reference(std::string_view text) noexcept;

struct ImportDecl {
  QualifiedName target;
  std::optional<std::string> alias;
  SourceSpan span;

  friend bool operator==(const ImportDecl&, const ImportDecl&) = default;
};

struct Actor {
  ActorKind kind = ActorKind::User;
  friend bool operator==(const Actor&, const Actor&) = default;
};

struct DataAttribute {
  std::string name;
  Datatype datatype = Datatype::Text;
  ConstraintSet constraints;
  std::optional<std::string> references;  // DataEntity id
  SourceSpan span;

  friend bool operator==(const DataAttribute&, const DataAttribute&) = default;
};

struct DataEntity {
  EntityKind kind = EntityKind::Master;
  std::vector<DataAttribute> attributes;
  friend bool operator==(const DataEntity&, const DataEntity&) = default;
};

struct Step {
  int order = 1;
  Performer performer = Performer::Actor;
  std::string action;
  SourceSpan span;
  friend bool operator==(const Step&, const Step&) = default;
};

struct Scenario {
  std::string id;
  ScenarioKind kind = ScenarioKind::Main;
  std::vector<Step> steps;
  SourceSpan span;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct UseCase {
  UseCaseKind kind = UseCaseKind::Other;
  std::string primary_actor;                // Actor id
  std::vector<std::string> data_entities;   // DataEntity ids
  std::vector<Scenario> scenarios;
  friend bool operator==(const UseCase&, const UseCase&) = default;
};

struct UserStory {
  std::string as_a;  // Actor id
  std::string i_want;
  std::optional<std::string> so_that;
  Priority priority = Priority::Unset;
  friend bool operator==(const UserStory&, const UserStory&) = default;
};

struct Goal {
  std::optional<std::string> parent;  // Goal id
  Priority priority = Priority::Unset;
  friend bool operator==(const Goal&, const Goal&) = default;
};

struct QualityRequirement {
  QRKind kind = QRKind::Other;
  std::optional<std::string> metric;
  std::optional<std::string> target_value;
  friend bool operator==(const QualityRequirement&, const QualityRequirement&) = default;
};

struct TestCase {
  std::string traces_to;                  // UseCase or UserStory id
  std::optional<std::string> scenario;    // scenario of the traced use case
  std::vector<std::string> given;
  std::vector<std::string> when;
  std::vector<std::string> then;
  friend bool operator==(const TestCase&, const TestCase&) = default;
};

struct GlossaryTerm {
  std::string term;
  PartOfSpeech part_of_speech = PartOfSpeech::Noun;
  std::optional<std::string> definition;
  std::vector<std::string> synonyms;
  bool preferred = true;
  friend bool operator==(const GlossaryTerm&, const GlossaryTerm&) = default;
};

enum class ElementKind : std::uint8_t {
  Actor,
  DataEntity,
  UseCase,
  UserStory,
  Goal,
  QualityRequirement,
  TestCase,
  GlossaryTerm,
};

inline constexpr std::array kAllElementKinds = {
    ElementKind::Actor,     ElementKind::DataEntity,         ElementKind::UseCase,  ElementKind::UserStory,
    ElementKind::Goal,      ElementKind::QualityRequirement, ElementKind::TestCase, ElementKind::GlossaryTerm,
};

std::string_view to_string(ElementKind kind) noexcept;
std::optional<ElementKind> element_kind_from_string(std::string_view name) noexcept;

using ElementBody =
    std::variant<Actor, DataEntity, UseCase, UserStory, Goal, QualityRequirement, TestCase, GlossaryTerm>;

struct Element {
  std::string id;
  std::optional<std::string> name;
  std::optional<std::string> description;
  ElementBody body;
  SourceSpan span;

  ElementKind kind() const noexcept { return static_cast<ElementKind>(body.index()); }

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&body);
  }
  template <class T>
  T* as() noexcept {
    return std::get_if<T>(&body);
  }

  friend bool operator==(const Element&, const Element&) = default;
};

/// Id a glossary term receives: `t_` followed by the term slug.
std::string glossary_term_id(std::string_view term);

/// Lowercases ASCII letters, maps every byte that is not [a-z0-9] to `_`.
std::string slug(std::string_view phrase);

Element make_glossary_term(GlossaryTerm term);

/// Structural problems of a single element (identifier form, empty required
/// text, control characters in text, synonym equal to its term), one
/// RSL-P013 diagnostic each. Empty means the element may enter a model.
Diagnostics structural_problems(const Element& e);

struct SpecificationModel {
  explicit SpecificationModel(QualifiedName package) : package_name(std::move(package)) {}

  QualifiedName package_name;
  std::vector<ImportDecl> imports;
  std::vector<Element> elements;
  std::optional<std::string> source;
  SourceSpan package_span;

  friend bool operator==(const SpecificationModel&, const SpecificationModel&) = default;
};

SpecificationModel new_model(QualifiedName package_name);

/// Appends `e`, or returns RSL-C001 without touching the model when the id
/// is taken. Throws std::invalid_argument when `e` is structurally invalid.
Outcome<SpecificationModel> add_element(SpecificationModel model, Element e);

/// Linear lookup by local id, case-sensitive.
const Element* resolve(const SpecificationModel& model, std::string_view id) noexcept;

/// Hash index over a model's element ids. The model must outlive the index.
class ElementIndex {
 public:
  explicit ElementIndex(const SpecificationModel& model);
  const Element* find(std::string_view id) const noexcept;

 private:
  std::unordered_map<std::string_view, const Element*> by_id_;
};

/// Incremental model construction with O(1) duplicate detection.
class ModelBuilder {
 public:
  explicit ModelBuilder(QualifiedName package_name);

  void set_source(std::string path) { model_.source = std::move(path); }
  void set_package_span(SourceSpan span) { model_.package_span = std::move(span); }
  void add_import(ImportDecl decl) { model_.imports.push_back(std::move(decl)); }

  /// RSL-C001 when the id is taken; the element is dropped in that case.
  std::optional<Diagnostic> add(Element e);

  bool contains(std::string_view id) const { return ids_.contains(std::string(id)); }
  SpecificationModel build() &&;

 private:
  SpecificationModel model_;
  std::unordered_set<std::string> ids_;
};

/// Renumbers step orders 1..n, applies PrimaryKey => NotNull. Nothing else.
SpecificationModel canonicalize(SpecificationModel model);

/// Copy with every SourceSpan and the source path cleared.
SpecificationModel strip_spans(SpecificationModel model);

/// Equality of canonical forms, ignoring spans and source paths.
bool structural_eq(const SpecificationModel& a, const SpecificationModel& b);

}  // namespace rsl
