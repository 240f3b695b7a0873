#include "rsl/model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

namespace rsl {

namespace {

constexpr std::array<std::string_view, 34> kReserved = {
    "Package",  "Import",  "as",       "Actor",      "DataEntity", "attribute",    "constraints",
    "references", "UseCase", "actorInitiates", "dataEntity", "scenario", "step",   "System",
    "UserStory", "asA",    "iWant",    "soThat",     "priority",   "Goal",         "partOf",
    "QR",       "metric",  "value",    "TestCase",   "traces",     "given",        "when",
    "then",     "Term",    "definition", "synonym",  "notPreferred", "description",
};

bool is_alpha(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

std::vector<std::string> split_dotted(std::string_view dotted) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto dot = dotted.find('.', start);
    out.emplace_back(dotted.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return out;
}

bool has_control_chars(std::string_view text) noexcept {
  return std::any_of(text.begin(), text.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return u < 0x20 || u == 0x7f;
  });
}

bool iequals(std::string_view a, std::string_view b) noexcept {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

class ProblemCollector {
 public:
  explicit ProblemCollector(const Element& e) : element_(e) {}

  void fail(std::string what) {
    diags_.push_back(Diagnostic::make(Code::P013_InvalidElement, element_.span,
                                      "element '" + element_.id + "': " + std::move(what)));
  }

  void text(std::string_view field, std::string_view value) {
    if (value.empty()) {
      fail(std::string(field) + " must not be empty");
    } else if (has_control_chars(value)) {
      fail(std::string(field) + " must not contain control characters");
    }
  }

  void optional_text(std::string_view field, const std::optional<std::string>& value) {
    if (value) text(field, *value);
  }

  void reference(std::string_view field, std::string_view value) {
    if (!is_reference(value)) fail(std::string(field) + " '" + std::string(value) + "' is not a valid reference");
  }

  void identifier(std::string_view field, std::string_view value) {
    if (!is_identifier(value)) fail(std::string(field) + " '" + std::string(value) + "' is not a valid identifier");
  }

  Diagnostics take() && { return std::move(diags_); }

 private:
  const Element& element_;
  Diagnostics diags_;
};

}  // namespace

bool is_reserved_word(std::string_view word) noexcept {
  return std::find(kReserved.begin(), kReserved.end(), word) != kReserved.end();
}

bool is_identifier(std::string_view text) noexcept {
  if (text.empty() || !is_alpha(text.front())) return false;
  if (!std::all_of(text.begin(), text.end(), [](char c) { return is_alpha(c) || is_digit(c) || c == '_'; })) {
    return false;
  }
  return !is_reserved_word(text);
}

bool is_reference(std::string_view text) noexcept {
  if (text.empty()) return false;
  for (const auto& segment : split_dotted(text)) {
    if (!is_identifier(segment)) return false;
  }
  return true;
}

QualifiedName::QualifiedName(std::vector<std::string> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("qualified name needs at least one segment");
  for (const auto& s : segments_) {
    if (!is_identifier(s)) throw std::invalid_argument("'" + s + "' is not a valid identifier");
  }
}

QualifiedName::QualifiedName(std::string_view dotted) : QualifiedName(split_dotted(dotted)) {}

std::optional<QualifiedName> QualifiedName::parse(std::string_view dotted) {
  if (!is_reference(dotted)) return std::nullopt;
  return QualifiedName(dotted);
}

std::string QualifiedName::str() const {
  std::string out;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (i) out += '.';
    out += segments_[i];
  }
  return out;
}

std::string_view to_string(ElementKind kind) noexcept {
  switch (kind) {
    case ElementKind::Actor: return "Actor";
    case ElementKind::DataEntity: return "DataEntity";
    case ElementKind::UseCase: return "UseCase";
    case ElementKind::UserStory: return "UserStory";
    case ElementKind::Goal: return "Goal";
    case ElementKind::QualityRequirement: return "QualityRequirement";
    case ElementKind::TestCase: return "TestCase";
    case ElementKind::GlossaryTerm: return "GlossaryTerm";
  }
  return "Actor";
}

std::optional<ElementKind> element_kind_from_string(std::string_view name) noexcept {
  for (auto k : kAllElementKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string slug(std::string_view phrase) {
  std::string out;
  out.reserve(phrase.size());
  for (char c : phrase) {
    auto lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out += ((lower >= 'a' && lower <= 'z') || is_digit(lower)) ? lower : '_';
  }
  return out;
}

std::string glossary_term_id(std::string_view term) { return "t_" + slug(term); }

Element make_glossary_term(GlossaryTerm term) {
  Element e;
  e.id = glossary_term_id(term.term);
  e.body = std::move(term);
  return e;
}

Diagnostics structural_problems(const Element& e) {
  ProblemCollector p(e);
  p.reference("id", e.id);
  p.optional_text("name", e.name);
  p.optional_text("description", e.description);

  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, DataEntity>) {
          for (const auto& attr : body.attributes) {
            p.identifier("attribute name", attr.name);
            if (attr.references) p.reference("references", *attr.references);
          }
        } else if constexpr (std::is_same_v<T, UseCase>) {
          p.reference("actorInitiates", body.primary_actor);
          for (const auto& de : body.data_entities) p.reference("dataEntity", de);
          for (const auto& sc : body.scenarios) {
            p.identifier("scenario id", sc.id);
            for (const auto& step : sc.steps) {
              if (step.order < 1) p.fail("step order must be a positive integer");
              p.text("step action", step.action);
            }
          }
        } else if constexpr (std::is_same_v<T, UserStory>) {
          p.reference("asA", body.as_a);
          p.text("iWant", body.i_want);
          p.optional_text("soThat", body.so_that);
        } else if constexpr (std::is_same_v<T, Goal>) {
          if (body.parent) p.reference("partOf", *body.parent);
        } else if constexpr (std::is_same_v<T, QualityRequirement>) {
          p.optional_text("metric", body.metric);
          p.optional_text("value", body.target_value);
        } else if constexpr (std::is_same_v<T, TestCase>) {
          p.reference("traces", body.traces_to);
          if (body.scenario) p.identifier("scenario", *body.scenario);
          for (const auto& t : body.given) p.text("given", t);
          for (const auto& t : body.when) p.text("when", t);
          for (const auto& t : body.then) p.text("then", t);
        } else if constexpr (std::is_same_v<T, GlossaryTerm>) {
          p.text("term", body.term);
          p.optional_text("definition", body.definition);
          for (const auto& syn : body.synonyms) {
            p.text("synonym", syn);
            if (iequals(syn, body.term)) p.fail("synonym '" + syn + "' equals its own term");
          }
          if (e.name || e.description) p.fail("glossary terms carry no name or description");
        }
      },
      e.body);
  return std::move(p).take();
}

SpecificationModel new_model(QualifiedName package_name) { return SpecificationModel(std::move(package_name)); }

Outcome<SpecificationModel> add_element(SpecificationModel model, Element e) {
  if (auto problems = structural_problems(e); !problems.empty()) {
    throw std::invalid_argument(problems.front().message);
  }
  if (const Element* existing = resolve(model, e.id)) {
    auto d = Diagnostic::make(Code::C001_DuplicateIdentifier, e.span, "duplicate identifier '" + e.id + "'");
    d.related.push_back({existing->span, "first declared here"});
    return {std::nullopt, {std::move(d)}};
  }
  model.elements.push_back(std::move(e));
  return {std::move(model), {}};
}

const Element* resolve(const SpecificationModel& model, std::string_view id) noexcept {
  for (const auto& e : model.elements) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

ElementIndex::ElementIndex(const SpecificationModel& model) {
  by_id_.reserve(model.elements.size());
  for (const auto& e : model.elements) by_id_.emplace(e.id, &e);
}

const Element* ElementIndex::find(std::string_view id) const noexcept {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : it->second;
}

ModelBuilder::ModelBuilder(QualifiedName package_name) : model_(std::move(package_name)) {}

std::optional<Diagnostic> ModelBuilder::add(Element e) {
  if (!ids_.insert(e.id).second) {
    auto d = Diagnostic::make(Code::C001_DuplicateIdentifier, e.span, "duplicate identifier '" + e.id + "'");
    if (const Element* first = resolve(model_, e.id)) d.related.push_back({first->span, "first declared here"});
    return d;
  }
  model_.elements.push_back(std::move(e));
  return std::nullopt;
}

SpecificationModel ModelBuilder::build() && { return std::move(model_); }

SpecificationModel canonicalize(SpecificationModel model) {
  for (auto& e : model.elements) {
    if (auto* uc = e.as<UseCase>()) {
      for (auto& sc : uc->scenarios) {
        int n = 1;
        for (auto& step : sc.steps) step.order = n++;
      }
    } else if (auto* de = e.as<DataEntity>()) {
      for (auto& attr : de->attributes) {
        if (attr.constraints.contains(Constraint::PrimaryKey)) attr.constraints.insert(Constraint::NotNull);
      }
    }
  }
  return model;
}

SpecificationModel strip_spans(SpecificationModel model) {
  model.source.reset();
  model.package_span = {};
  for (auto& imp : model.imports) imp.span = {};
  for (auto& e : model.elements) {
    e.span = {};
    if (auto* uc = e.as<UseCase>()) {
      for (auto& sc : uc->scenarios) {
        sc.span = {};
        for (auto& step : sc.steps) step.span = {};
      }
    } else if (auto* de = e.as<DataEntity>()) {
      for (auto& attr : de->attributes) attr.span = {};
    }
  }
  return model;
}

bool structural_eq(const SpecificationModel& a, const SpecificationModel& b) {
  return strip_spans(canonicalize(a)) == strip_spans(canonicalize(b));
}

}  // namespace rsl
