#include "rsl/validator.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <unordered_map>

#include <json.hpp>

#include "element_view.hpp"

namespace rsl {

namespace {

using Json = nlohmann::ordered_json;

bool is_word_char(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Models read from JSON or workbooks carry default-constructed spans.
const SourceSpan& located_or(const SourceSpan& span, const SourceSpan& fallback) {
  return span == SourceSpan{} ? fallback : span;
}

Diagnostics drop_empty_spans(Diagnostics diags) {
  for (auto& d : diags) {
    if (d.span && *d.span == SourceSpan{}) d.span.reset();
  }
  return diags;
}

// ---- consistency ----

class ConsistencyChecker {
 public:
  explicit ConsistencyChecker(const SpecificationModel& m) : model_(m), index_(m) {}

  Diagnostics run() {
    for (const auto& e : model_.elements) {
      std::visit([&](const auto& body) { check(e, body); }, e.body);
    }
    goal_cycles();
    return drop_empty_spans(std::move(diags_));
  }

 private:
  void emit(Code code, const SourceSpan& span, std::string message) {
    diags_.push_back(Diagnostic::make(code, span, std::move(message)));
  }

  /// Resolves `ref`; reports C010/C011 unless the target kind is allowed.
  const Element* reference(const Element& owner, const SourceSpan& span, std::string_view field,
                           std::string_view ref, std::initializer_list<ElementKind> allowed) {
    const Element* target = index_.find(ref);
    if (!target) {
      emit(Code::C010_UnresolvedReference, span,
           "unresolved reference '" + std::string(ref) + "' in " + std::string(field) + " of '" + owner.id + "'");
      return nullptr;
    }
    if (std::find(allowed.begin(), allowed.end(), target->kind()) == allowed.end()) {
      std::string expected;
      for (auto k : allowed) {
        if (!expected.empty()) expected += " or ";
        expected += to_string(k);
      }
      auto d = Diagnostic::make(Code::C011_WrongReferenceKind, span,
                                std::string(field) + " of '" + owner.id + "' names '" + std::string(ref) + "', a " +
                                    std::string(to_string(target->kind())) + "; expected " + expected);
      d.related.push_back({target->span, "declared here"});
      diags_.push_back(std::move(d));
      return nullptr;
    }
    return target;
  }

  void check(const Element&, const Actor&) {}
  void check(const Element&, const GlossaryTerm&) {}

  void check(const Element& e, const DataEntity& de) {
    std::unordered_map<std::string, const DataAttribute*> seen;
    const DataAttribute* primary = nullptr;
    for (const auto& attr : de.attributes) {
      const SourceSpan& span = located_or(attr.span, e.span);
      if (attr.references) {
        reference(e, span, "references of attribute '" + attr.name + "'", *attr.references, {ElementKind::DataEntity});
        if (attr.datatype != Datatype::Integer && attr.datatype != Datatype::Text) {
          emit(Code::C016_ForeignKeyDatatype, span,
               "foreign key attribute '" + e.id + "." + attr.name + "' has datatype " +
                   std::string(literal(attr.datatype)) + "; expected Integer or Text");
        }
      }
      if (!seen.emplace(attr.name, &attr).second) {
        emit(Code::C017_DuplicateAttribute, span, "duplicate attribute '" + attr.name + "' in '" + e.id + "'");
      }
      if (attr.constraints.contains(Constraint::PrimaryKey)) {
        if (primary) {
          emit(Code::C018_MultiplePrimaryKeys, span,
               "'" + e.id + "' declares a second PrimaryKey attribute '" + attr.name + "' (first: '" + primary->name +
                   "')");
        } else {
          primary = &attr;
        }
      }
    }
  }

  void check(const Element& e, const UseCase& uc) {
    reference(e, e.span, "actorInitiates", uc.primary_actor, {ElementKind::Actor});
    for (const auto& de : uc.data_entities) reference(e, e.span, "dataEntity", de, {ElementKind::DataEntity});

    std::unordered_map<std::string, const Scenario*> seen;
    const Scenario* main = nullptr;
    for (const auto& sc : uc.scenarios) {
      const SourceSpan& sc_span = located_or(sc.span, e.span);
      if (!seen.emplace(sc.id, &sc).second) {
        emit(Code::C013_DuplicateScenario, sc_span, "duplicate scenario '" + sc.id + "' in use case '" + e.id + "'");
      }
      if (sc.kind == ScenarioKind::Main) {
        if (main) {
          emit(Code::C015_MultipleMainScenarios, sc_span,
               "use case '" + e.id + "' has a second Main scenario '" + sc.id + "' (first: '" + main->id + "')");
        } else {
          main = &sc;
        }
      }
      for (std::size_t i = 1; i < sc.steps.size(); ++i) {
        const Step& prev = sc.steps[i - 1];
        const Step& cur = sc.steps[i];
        if (cur.order <= prev.order) {
          const SourceSpan& st_span = located_or(cur.span, sc_span);
          emit(Code::C012_StepOrder, st_span,
               "step " + std::to_string(cur.order) + " follows step " + std::to_string(prev.order) + " in scenario '" +
                   sc.id + "' of '" + e.id + "'; orders must be strictly ascending");
        }
      }
    }
  }

  void check(const Element& e, const UserStory& us) {
    reference(e, e.span, "asA", us.as_a, {ElementKind::Actor});
  }

  void check(const Element& e, const Goal& g) {
    if (g.parent) reference(e, e.span, "partOf", *g.parent, {ElementKind::Goal});
  }

  void check(const Element&, const QualityRequirement&) {}

  void check(const Element& e, const TestCase& tc) {
    const Element* target =
        reference(e, e.span, "traces", tc.traces_to, {ElementKind::UseCase, ElementKind::UserStory});
    if (!target || !tc.scenario) return;
    if (const auto* uc = target->as<UseCase>()) {
      bool found = std::any_of(uc->scenarios.begin(), uc->scenarios.end(),
                               [&](const Scenario& sc) { return sc.id == *tc.scenario; });
      if (!found) {
        emit(Code::C010_UnresolvedReference, e.span,
             "unresolved reference '" + *tc.scenario + "' in scenario of '" + e.id + "': use case '" + target->id +
                 "' has no such scenario");
      }
    } else {
      emit(Code::C011_WrongReferenceKind, e.span,
           "scenario of '" + e.id + "' requires traces to name a UseCase, but '" + target->id + "' is a UserStory");
    }
  }

  void goal_cycles() {
    // Each goal has at most one parent, so cycles are found by walking chains.
    enum class Mark : std::uint8_t { Unvisited, OnPath, Done };
    std::unordered_map<const Element*, Mark> marks;
    for (const auto& e : model_.elements) {
      if (!e.as<Goal>() || marks[&e] != Mark::Unvisited) continue;
      std::vector<const Element*> path;
      const Element* cur = &e;
      while (cur && marks[cur] == Mark::Unvisited) {
        marks[cur] = Mark::OnPath;
        path.push_back(cur);
        const auto* g = cur->as<Goal>();
        const Element* next = g->parent ? index_.find(*g->parent) : nullptr;
        cur = next && next->as<Goal>() ? next : nullptr;
      }
      if (cur && marks[cur] == Mark::OnPath) {
        auto start = std::find(path.begin(), path.end(), cur);
        std::vector<const Element*> cycle(start, path.end());
        // Report from the member declared first in the model.
        auto first = std::min_element(cycle.begin(), cycle.end());
        std::rotate(cycle.begin(), first, cycle.end());
        std::string text;
        for (const auto* g : cycle) text += g->id + " -> ";
        text += cycle.front()->id;
        auto d = Diagnostic::make(Code::C014_GoalCycle, cycle.front()->span, "goal partOf cycle: " + text);
        for (std::size_t i = 1; i < cycle.size(); ++i) d.related.push_back({cycle[i]->span, "cycle member"});
        diags_.push_back(std::move(d));
      }
      for (const auto* p : path) marks[p] = Mark::Done;
    }
  }

  const SpecificationModel& model_;
  ElementIndex index_;
  Diagnostics diags_;
};

// ---- completeness ----

struct ConstructRule {
  std::string field;
  bool set_rule = true;  // `<field>:set`; otherwise `<field>>=<min>`
  std::size_t min = 0;
};

std::optional<ConstructRule> parse_construct_rule(ElementKind kind, std::string_view token) {
  const auto view = [&] {
    // Shape of the fields for this kind, from a default-constructed element.
    Element probe;
    probe.id = "probe";
    switch (kind) {
      case ElementKind::Actor: probe.body = Actor{}; break;
      case ElementKind::DataEntity: probe.body = DataEntity{}; break;
      case ElementKind::UseCase: probe.body = UseCase{}; break;
      case ElementKind::UserStory: probe.body = UserStory{}; break;
      case ElementKind::Goal: probe.body = Goal{}; break;
      case ElementKind::QualityRequirement: probe.body = QualityRequirement{}; break;
      case ElementKind::TestCase: probe.body = TestCase{}; break;
      case ElementKind::GlossaryTerm: probe.body = GlossaryTerm{}; break;
    }
    return detail::element_view(probe);
  }();

  if (token.size() > 4 && token.substr(token.size() - 4) == ":set") {
    std::string field(token.substr(0, token.size() - 4));
    if (field == "element_kind" || !view.contains(field)) return std::nullopt;
    return ConstructRule{field, true, 0};
  }
  auto ge = token.find(">=");
  if (ge == std::string_view::npos || ge == 0) return std::nullopt;
  std::string field(token.substr(0, ge));
  auto digits = token.substr(ge + 2);
  std::size_t min = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), min);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  if (!view.contains(field) || !view[field].is_array()) return std::nullopt;
  return ConstructRule{field, false, min};
}

bool field_is_set(const Json& value) {
  if (value.is_null()) return false;
  if (value.is_string()) return !value.get_ref<const std::string&>().empty();
  if (value.is_array()) return !value.empty();
  return true;
}

// ---- ambiguity ----

struct TextField {
  std::string_view text;
  const SourceSpan* span;
  std::string where;
};

std::vector<TextField> text_fields(const Element& e) {
  std::vector<TextField> out;
  if (e.name) out.push_back({*e.name, &e.span, "name of '" + e.id + "'"});
  if (e.description) out.push_back({*e.description, &e.span, "description of '" + e.id + "'"});
  if (const auto* us = e.as<UserStory>()) out.push_back({us->i_want, &e.span, "iWant of '" + e.id + "'"});
  if (const auto* uc = e.as<UseCase>()) {
    for (const auto& sc : uc->scenarios) {
      for (const auto& st : sc.steps) {
        out.push_back({st.action, &located_or(st.span, e.span),
                       "step " + std::to_string(st.order) + " of scenario '" + sc.id + "' of '" + e.id + "'"});
      }
    }
  }
  return out;
}

Json span_json(const SourceSpan& s) {
  return Json{{"file", s.file},
              {"startLine", s.start_line},
              {"startColumn", s.start_col},
              {"endLine", s.end_line},
              {"endColumn", s.end_col}};
}

ElementKind parse_kind_or_throw(const Json& v) {
  if (!v.is_string()) throw std::invalid_argument("element kind names must be strings");
  auto k = element_kind_from_string(v.get<std::string>());
  if (!k) throw std::invalid_argument("unknown element kind '" + v.get<std::string>() + "'");
  return *k;
}

}  // namespace

namespace {

// Same acceptance rule as find_whole_word, for a needle already known to
// start at a word boundary of the lowercased text.
bool matches_at(std::string_view hay, std::size_t pos, std::string_view needle) {
  if (hay.compare(pos, needle.size(), needle) != 0) return false;
  std::size_t end = pos + needle.size();
  return end >= hay.size() || !is_word_char(hay[end]) || !is_word_char(needle.back());
}

}  // namespace

std::vector<std::size_t> find_whole_word(std::string_view text, std::string_view needle) {
  std::vector<std::size_t> out;
  if (needle.empty()) return out;
  std::string hay = lower(text);
  std::size_t pos = 0;
  while ((pos = hay.find(needle, pos)) != std::string::npos) {
    bool left = pos == 0 || !is_word_char(hay[pos - 1]);
    std::size_t end = pos + needle.size();
    bool right = end >= hay.size() || !is_word_char(hay[end]);
    // A needle ending in a non-word character (none shipped) needs no right boundary.
    if (left && (right || !is_word_char(needle.back()))) out.push_back(pos);
    ++pos;
  }
  return out;
}

CheckConfig default_check_config() {
  CheckConfig c;
  c.model_required_kinds = {ElementKind::Actor, ElementKind::UseCase};
  c.viewpoints["behaviour"] = {ElementKind::UseCase, ElementKind::UserStory};
  c.viewpoints["structure"] = {ElementKind::DataEntity};
  c.construct_rules[ElementKind::DataEntity] = {"attributes>=1"};
  c.construct_rules[ElementKind::UseCase] = {"primary_actor:set", "scenarios>=1"};
  c.construct_rules[ElementKind::TestCase] = {"then>=1"};
  c.vague_terms = {"user-friendly", "fast",   "efficient", "appropriate", "adequate",
                   "flexible",      "robust", "easy",      "simple",      "several",
                   "some",          "etc",    "as appropriate", "if possible", "tbd"};
  c.strictness = Strictness::ErrorsOnly;
  return c;
}

Outcome<CheckConfig> parse_check_config(std::string_view json_text, std::string_view file) {
  auto fail = [&](std::string why) {
    std::optional<SourceSpan> span;
    if (!file.empty()) span = SourceSpan{std::string(file), 1, 1, 1, 1};
    return Outcome<CheckConfig>{std::nullopt,
                                {Diagnostic::make(Code::X002_InvalidCheckConfig, span, "invalid check config: " + why)}};
  };
  Json doc;
  try {
    doc = Json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    return fail(e.what());
  }
  if (!doc.is_object()) return fail("top level must be an object");

  CheckConfig c;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "modelRequiredKinds") {
        for (const auto& k : value) c.model_required_kinds.insert(parse_kind_or_throw(k));
      } else if (key == "viewpoints") {
        if (!value.is_object()) throw std::invalid_argument("viewpoints must be an object");
        for (const auto& [name, kinds] : value.items()) {
          auto& set = c.viewpoints[name];
          for (const auto& k : kinds) set.insert(parse_kind_or_throw(k));
        }
      } else if (key == "constructRules") {
        if (!value.is_object()) throw std::invalid_argument("constructRules must be an object");
        for (const auto& [kind_name, rules] : value.items()) {
          auto& list = c.construct_rules[parse_kind_or_throw(Json(kind_name))];
          for (const auto& r : rules) list.push_back(r.get<std::string>());
        }
      } else if (key == "vagueTerms") {
        for (const auto& t : value) c.vague_terms.push_back(lower(t.get<std::string>()));
      } else if (key == "strictness") {
        auto s = value.get<std::string>();
        if (s == "ErrorsOnly") {
          c.strictness = Strictness::ErrorsOnly;
        } else if (s == "WarningsAsErrors") {
          c.strictness = Strictness::WarningsAsErrors;
        } else {
          throw std::invalid_argument("strictness must be ErrorsOnly or WarningsAsErrors");
        }
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    return fail(e.what());
  } catch (const std::invalid_argument& e) {
    return fail(e.what());
  }
  return {std::move(c), {}};
}

Diagnostics check_consistency(const SpecificationModel& model) { return ConsistencyChecker(model).run(); }

Diagnostics check_completeness(const SpecificationModel& model, const CheckConfig& config) {
  Diagnostics out;
  const Severity severity =
      config.strictness == Strictness::WarningsAsErrors ? Severity::Error : Severity::Warning;
  auto emit = [&](Code code, std::optional<SourceSpan> span, std::string message) {
    auto d = Diagnostic::make(code, std::move(span), std::move(message));
    d.severity = severity;
    out.push_back(std::move(d));
  };

  std::map<ElementKind, std::size_t> counts;
  for (const auto& e : model.elements) ++counts[e.kind()];

  for (auto kind : config.model_required_kinds) {
    if (counts[kind] == 0) {
      emit(Code::X010_MissingRequiredKind, model.package_span,
           "model '" + model.package_name.str() + "' has no " + std::string(to_string(kind)) + " element");
    }
  }

  for (const auto& [name, kinds] : config.viewpoints) {
    std::size_t total = 0;
    for (auto k : kinds) total += counts[k];
    if (total == 0) {
      std::string listed;
      for (auto k : kinds) {
        if (!listed.empty()) listed += ", ";
        listed += to_string(k);
      }
      emit(Code::X011_EmptyViewpoint, model.package_span,
           "viewpoint '" + name + "' is empty: no element of kind {" + listed + "}");
    }
  }

  std::map<ElementKind, std::vector<ConstructRule>> rules;
  for (const auto& [kind, tokens] : config.construct_rules) {
    for (const auto& token : tokens) {
      if (auto rule = parse_construct_rule(kind, token)) {
        rules[kind].push_back(std::move(*rule));
      } else {
        out.push_back(Diagnostic::make(Code::X001_MalformedConstructRule, std::nullopt,
                                       "malformed construct rule '" + token + "' for " +
                                           std::string(to_string(kind)) +
                                           "; expected '<field>:set' or '<collection>>=<n>' over a known field"));
      }
    }
  }

  for (const auto& e : model.elements) {
    auto it = rules.find(e.kind());
    if (it == rules.end()) continue;
    const Json view = detail::element_view(e);
    for (const auto& rule : it->second) {
      const Json& value = view[rule.field];
      if (rule.set_rule) {
        if (!field_is_set(value)) {
          emit(Code::X012_ConstructRuleViolated, e.span,
               "'" + e.id + "' violates construct rule '" + rule.field + ":set'");
        }
      } else if (value.size() < rule.min) {
        emit(Code::X012_ConstructRuleViolated, e.span,
             "'" + e.id + "' violates construct rule '" + rule.field + ">=" + std::to_string(rule.min) + "' (has " +
                 std::to_string(value.size()) + ")");
      }
    }
  }
  return drop_empty_spans(std::move(out));
}

Diagnostics check_ambiguity(const SpecificationModel& model, const CheckConfig& config) {
  Diagnostics out;

  struct Synonym {
    std::string needle;     // lowercase
    std::string shown;
    std::string preferred;  // term to suggest
  };
  std::vector<Synonym> synonyms;
  std::vector<const Element*> preferred_terms;
  for (const auto& e : model.elements) {
    const auto* gt = e.as<GlossaryTerm>();
    if (!gt || !gt->preferred) continue;
    preferred_terms.push_back(&e);
    for (const auto& s : gt->synonyms) synonyms.push_back({lower(s), s, gt->term});
  }
  // A whole-word hit starts where the text's word run equals the needle's
  // leading run, so synonyms are bucketed by that run. Needles that do not
  // start with a word character take the slow path.
  std::unordered_map<std::string_view, std::vector<std::size_t>> by_lead;
  std::vector<std::size_t> odd_synonyms;
  for (std::size_t s = 0; s < synonyms.size(); ++s) {
    std::string_view needle = synonyms[s].needle;
    if (needle.empty()) continue;
    if (!is_word_char(needle[0])) {
      odd_synonyms.push_back(s);
      continue;
    }
    std::size_t run = 0;
    while (run < needle.size() && is_word_char(needle[run])) ++run;
    by_lead[needle.substr(0, run)].push_back(s);
  }

  for (const auto& e : model.elements) {
    for (const auto& field : text_fields(e)) {
      std::vector<std::pair<std::size_t, std::size_t>> hits;  // (position, term index)
      for (std::size_t t = 0; t < config.vague_terms.size(); ++t) {
        for (auto pos : find_whole_word(field.text, config.vague_terms[t])) hits.emplace_back(pos, t);
      }
      std::sort(hits.begin(), hits.end());
      for (const auto& [pos, t] : hits) {
        out.push_back(Diagnostic::make(Code::A010_VagueTerm, *field.span,
                                       "vague term '" + config.vague_terms[t] + "' in " + field.where));
      }
      hits.clear();
      const std::string hay = lower(field.text);
      for (std::size_t pos = 0; pos < hay.size();) {
        if (!is_word_char(hay[pos]) || (pos > 0 && is_word_char(hay[pos - 1]))) {
          ++pos;
          continue;
        }
        std::size_t end = pos;
        while (end < hay.size() && is_word_char(hay[end])) ++end;
        auto it = by_lead.find(std::string_view(hay).substr(pos, end - pos));
        if (it != by_lead.end()) {
          for (auto s : it->second) {
            if (matches_at(hay, pos, synonyms[s].needle)) hits.emplace_back(pos, s);
          }
        }
        pos = end;
      }
      for (auto s : odd_synonyms) {
        for (auto pos : find_whole_word(field.text, synonyms[s].needle)) hits.emplace_back(pos, s);
      }
      std::sort(hits.begin(), hits.end());
      for (const auto& [pos, s] : hits) {
        out.push_back(Diagnostic::make(Code::A011_NonPreferredTerm, *field.span,
                                       "non-preferred term '" + synonyms[s].shown + "' in " + field.where +
                                           "; use '" + synonyms[s].preferred + "'"));
      }
    }
  }

  auto declares = [](const GlossaryTerm& a, const GlossaryTerm& b) {
    const std::string target = lower(b.term);
    return std::any_of(a.synonyms.begin(), a.synonyms.end(), [&](const std::string& s) { return lower(s) == target; });
  };
  for (std::size_t i = 0; i < preferred_terms.size(); ++i) {
    for (std::size_t j = i + 1; j < preferred_terms.size(); ++j) {
      const auto& a = *preferred_terms[i]->as<GlossaryTerm>();
      const auto& b = *preferred_terms[j]->as<GlossaryTerm>();
      if (declares(a, b) && declares(b, a)) {
        auto d = Diagnostic::make(Code::A012_ConflictingGlossary, preferred_terms[i]->span,
                                  "preferred terms '" + a.term + "' and '" + b.term +
                                      "' declare each other as synonyms");
        d.related.push_back({preferred_terms[j]->span, "other term declared here"});
        out.push_back(std::move(d));
      }
    }
  }
  return drop_empty_spans(std::move(out));
}

ValidationReport check_all(const SpecificationModel& model, const CheckConfig& config) {
  ValidationReport report;
  report.diagnostics = check_consistency(model);
  auto completeness = check_completeness(model, config);
  auto ambiguity = check_ambiguity(model, config);
  report.diagnostics.insert(report.diagnostics.end(), completeness.begin(), completeness.end());
  report.diagnostics.insert(report.diagnostics.end(), ambiguity.begin(), ambiguity.end());
  report.counts = {count(report.diagnostics, Severity::Error), count(report.diagnostics, Severity::Warning),
                   count(report.diagnostics, Severity::Info)};
  report.passed = report.counts.errors == 0 &&
                  (config.strictness == Strictness::ErrorsOnly || report.counts.warnings == 0);
  return report;
}

std::string report_to_json(const ValidationReport& report, std::string_view file) {
  Json j;
  j["file"] = std::string(file);
  j["passed"] = report.passed;
  j["counts"] = Json{{"error", report.counts.errors}, {"warning", report.counts.warnings}, {"info", report.counts.infos}};
  Json diags = Json::array();
  for (const auto& d : report.diagnostics) {
    Json related = Json::array();
    for (const auto& r : d.related) related.push_back(Json{{"span", span_json(r.span)}, {"message", r.message}});
    diags.push_back(Json{{"code", code_text(d.code)},
                         {"severity", to_string(d.severity)},
                         {"span", d.span ? span_json(*d.span) : Json(nullptr)},
                         {"message", d.message},
                         {"related", std::move(related)}});
  }
  j["diagnostics"] = std::move(diags);
  return j.dump();
}

}  // namespace rsl
