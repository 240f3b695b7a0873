#include <algorithm>
#include <limits>

#include <json.hpp>

#include "rsl/transform.hpp"

namespace rsl {

namespace {

using Json = nlohmann::ordered_json;

Json opt(const std::optional<std::string>& v) { return v ? Json(*v) : Json(nullptr); }

Json strings(const std::vector<std::string>& v) {
  Json arr = Json::array();
  for (const auto& s : v) arr.push_back(s);
  return arr;
}

std::string_view json_kind(ElementKind k) { return to_string(k); }

Json element_json(const Element& e) {
  Json j;
  j["kind"] = std::string(json_kind(e.kind()));
  if (const auto* gt = e.as<GlossaryTerm>()) {
    j["term"] = gt->term;
    j["partOfSpeech"] = literal(gt->part_of_speech);
    j["definition"] = opt(gt->definition);
    j["synonyms"] = strings(gt->synonyms);
    j["preferred"] = gt->preferred;
    return j;
  }
  j["id"] = e.id;
  j["name"] = opt(e.name);
  j["description"] = opt(e.description);
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Actor>) {
          j["actorKind"] = literal(b.kind);
        } else if constexpr (std::is_same_v<T, DataEntity>) {
          j["entityKind"] = literal(b.kind);
          Json attrs = Json::array();
          for (const auto& a : b.attributes) {
            Json cs = Json::array();
            for (auto c : a.constraints.members()) cs.push_back(literal(c));
            attrs.push_back(Json{{"name", a.name},
                                 {"datatype", literal(a.datatype)},
                                 {"constraints", std::move(cs)},
                                 {"references", opt(a.references)}});
          }
          j["attributes"] = std::move(attrs);
        } else if constexpr (std::is_same_v<T, UseCase>) {
          j["useCaseKind"] = literal(b.kind);
          j["primaryActor"] = b.primary_actor;
          j["dataEntities"] = strings(b.data_entities);
          Json scs = Json::array();
          for (const auto& sc : b.scenarios) {
            Json steps = Json::array();
            for (const auto& st : sc.steps) {
              steps.push_back(Json{{"order", st.order}, {"performer", literal(st.performer)}, {"action", st.action}});
            }
            scs.push_back(Json{{"id", sc.id}, {"kind", literal(sc.kind)}, {"steps", std::move(steps)}});
          }
          j["scenarios"] = std::move(scs);
        } else if constexpr (std::is_same_v<T, UserStory>) {
          j["asA"] = b.as_a;
          j["iWant"] = b.i_want;
          j["soThat"] = opt(b.so_that);
          j["priority"] = literal(b.priority);
        } else if constexpr (std::is_same_v<T, Goal>) {
          j["partOf"] = opt(b.parent);
          j["priority"] = literal(b.priority);
        } else if constexpr (std::is_same_v<T, QualityRequirement>) {
          j["qrKind"] = literal(b.kind);
          j["metric"] = opt(b.metric);
          j["value"] = opt(b.target_value);
        } else if constexpr (std::is_same_v<T, TestCase>) {
          j["traces"] = b.traces_to;
          j["scenario"] = opt(b.scenario);
          j["given"] = strings(b.given);
          j["when"] = strings(b.when);
          j["then"] = strings(b.then);
        }
      },
      e.body);
  return j;
}

// Raised while reading a document; carries the diagnostic code.
struct ImportError {
  Code code;
  std::string message;
};

[[noreturn]] void malformed(std::string message) { throw ImportError{Code::T012_MalformedDocument, std::move(message)}; }

class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) malformed(where_ + " must be an object");
  }

  /// Call after reading every expected key; anything left over is unknown.
  void finish(std::initializer_list<std::string_view> known) const {
    for (const auto& [key, value] : j_.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw ImportError{Code::T010_UnknownField, "unknown key '" + key + "' in " + where_};
      }
    }
  }

  const Json* get(std::string_view key) const {
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string string(std::string_view key) const {
    const Json* v = get(key);
    if (!v) malformed(where_ + " lacks required key '" + std::string(key) + "'");
    if (!v->is_string()) malformed("'" + std::string(key) + "' in " + where_ + " must be a string");
    return v->get<std::string>();
  }

  std::optional<std::string> optional_string(std::string_view key) const {
    const Json* v = get(key);
    if (!v || v->is_null()) return std::nullopt;
    if (!v->is_string()) malformed("'" + std::string(key) + "' in " + where_ + " must be a string or null");
    return v->get<std::string>();
  }

  std::vector<std::string> strings(std::string_view key) const {
    std::vector<std::string> out;
    const Json* v = get(key);
    if (!v) return out;
    if (!v->is_array()) malformed("'" + std::string(key) + "' in " + where_ + " must be an array");
    for (const auto& item : *v) {
      if (!item.is_string()) malformed("'" + std::string(key) + "' in " + where_ + " must hold strings");
      out.push_back(item.get<std::string>());
    }
    return out;
  }

  const Json& array(std::string_view key) const {
    static const Json empty = Json::array();
    const Json* v = get(key);
    if (!v) return empty;
    if (!v->is_array()) malformed("'" + std::string(key) + "' in " + where_ + " must be an array");
    return *v;
  }

  template <class E>
  E vocab(std::string_view key, std::optional<E> fallback = std::nullopt) const {
    const Json* v = get(key);
    if (!v && fallback) return *fallback;
    std::string text = string(key);
    auto parsed = parse_literal<E>(text);
    if (!parsed) {
      malformed("'" + text + "' is not a " + std::string(VocabularyTraits<E>::name) + " literal; allowed " +
                allowed_set<E>());
    }
    return *parsed;
  }

  const std::string& where() const { return where_; }

 private:
  const Json& j_;
  std::string where_;
};

Element read_element(const Json& j, std::size_t index) {
  ObjectReader r(j, "elements[" + std::to_string(index) + "]");
  std::string kind_text = r.string("kind");
  auto kind = element_kind_from_string(kind_text);
  if (!kind) throw ImportError{Code::T010_UnknownField, "unknown element kind '" + kind_text + "' in " + r.where()};

  Element e;
  if (*kind == ElementKind::GlossaryTerm) {
    GlossaryTerm gt;
    gt.term = r.string("term");
    gt.part_of_speech = r.vocab<PartOfSpeech>("partOfSpeech");
    gt.definition = r.optional_string("definition");
    gt.synonyms = r.strings("synonyms");
    if (const Json* p = r.get("preferred")) {
      if (!p->is_boolean()) malformed("'preferred' in " + r.where() + " must be a boolean");
      gt.preferred = p->get<bool>();
    }
    r.finish({"kind", "term", "partOfSpeech", "definition", "synonyms", "preferred"});
    return make_glossary_term(std::move(gt));
  }

  e.id = r.string("id");
  e.name = r.optional_string("name");
  e.description = r.optional_string("description");
  switch (*kind) {
    case ElementKind::Actor:
      e.body = Actor{r.vocab<ActorKind>("actorKind")};
      r.finish({"kind", "id", "name", "description", "actorKind"});
      break;
    case ElementKind::DataEntity: {
      DataEntity de;
      de.kind = r.vocab<EntityKind>("entityKind");
      std::size_t i = 0;
      for (const auto& aj : r.array("attributes")) {
        ObjectReader a(aj, r.where() + ".attributes[" + std::to_string(i++) + "]");
        DataAttribute attr;
        attr.name = a.string("name");
        attr.datatype = a.vocab<Datatype>("datatype");
        for (const auto& c : a.strings("constraints")) {
          auto parsed = parse_literal<Constraint>(c);
          if (!parsed) malformed("'" + c + "' is not a Constraint literal; allowed " + allowed_set<Constraint>());
          attr.constraints.insert(*parsed);
        }
        attr.references = a.optional_string("references");
        a.finish({"name", "datatype", "constraints", "references"});
        de.attributes.push_back(std::move(attr));
      }
      e.body = std::move(de);
      r.finish({"kind", "id", "name", "description", "entityKind", "attributes"});
      break;
    }
    case ElementKind::UseCase: {
      UseCase uc;
      uc.kind = r.vocab<UseCaseKind>("useCaseKind");
      uc.primary_actor = r.string("primaryActor");
      uc.data_entities = r.strings("dataEntities");
      std::size_t i = 0;
      for (const auto& sj : r.array("scenarios")) {
        ObjectReader s(sj, r.where() + ".scenarios[" + std::to_string(i++) + "]");
        Scenario sc;
        sc.id = s.string("id");
        sc.kind = s.vocab<ScenarioKind>("kind");
        std::size_t k = 0;
        for (const auto& tj : s.array("steps")) {
          ObjectReader t(tj, s.where() + ".steps[" + std::to_string(k++) + "]");
          Step st;
          const Json* order = t.get("order");
          if (!order || !order->is_number_integer()) malformed("'order' in " + t.where() + " must be an integer");
          auto value = order->get<long long>();
          if (value < 1 || value > std::numeric_limits<int>::max()) {
            malformed("'order' in " + t.where() + " must be a positive integer");
          }
          st.order = static_cast<int>(value);
          st.performer = t.vocab<Performer>("performer");
          st.action = t.string("action");
          t.finish({"order", "performer", "action"});
          sc.steps.push_back(std::move(st));
        }
        s.finish({"id", "kind", "steps"});
        uc.scenarios.push_back(std::move(sc));
      }
      e.body = std::move(uc);
      r.finish({"kind", "id", "name", "description", "useCaseKind", "primaryActor", "dataEntities", "scenarios"});
      break;
    }
    case ElementKind::UserStory: {
      UserStory us;
      us.as_a = r.string("asA");
      us.i_want = r.string("iWant");
      us.so_that = r.optional_string("soThat");
      us.priority = r.vocab<Priority>("priority", Priority::Unset);
      e.body = std::move(us);
      r.finish({"kind", "id", "name", "description", "asA", "iWant", "soThat", "priority"});
      break;
    }
    case ElementKind::Goal: {
      Goal g;
      g.parent = r.optional_string("partOf");
      g.priority = r.vocab<Priority>("priority", Priority::Unset);
      e.body = std::move(g);
      r.finish({"kind", "id", "name", "description", "partOf", "priority"});
      break;
    }
    case ElementKind::QualityRequirement: {
      QualityRequirement qr;
      qr.kind = r.vocab<QRKind>("qrKind");
      qr.metric = r.optional_string("metric");
      qr.target_value = r.optional_string("value");
      e.body = std::move(qr);
      r.finish({"kind", "id", "name", "description", "qrKind", "metric", "value"});
      break;
    }
    case ElementKind::TestCase: {
      TestCase tc;
      tc.traces_to = r.string("traces");
      tc.scenario = r.optional_string("scenario");
      tc.given = r.strings("given");
      tc.when = r.strings("when");
      tc.then = r.strings("then");
      e.body = std::move(tc);
      r.finish({"kind", "id", "name", "description", "traces", "scenario", "given", "when", "then"});
      break;
    }
    case ElementKind::GlossaryTerm:
      break;
  }
  return e;
}

}  // namespace

std::string export_json(const SpecificationModel& model) {
  Json doc;
  doc["schemaVersion"] = std::string(kJsonSchemaVersion);
  doc["package"] = model.package_name.str();
  Json imports = Json::array();
  for (const auto& imp : model.imports) imports.push_back(Json{{"target", imp.target.str()}, {"alias", opt(imp.alias)}});
  doc["imports"] = std::move(imports);
  Json elements = Json::array();
  for (const auto& e : model.elements) elements.push_back(element_json(e));
  doc["elements"] = std::move(elements);
  return doc.dump();
}

Outcome<SpecificationModel> import_json(std::string_view text, std::string_view file) {
  std::optional<SourceSpan> where;
  if (!file.empty()) where = SourceSpan{std::string(file), 1, 1, 1, 1};
  auto failure = [&](Code code, std::string message) {
    return Outcome<SpecificationModel>{std::nullopt, {Diagnostic::make(code, where, std::move(message))}};
  };

  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    return failure(Code::T012_MalformedDocument, std::string("not valid JSON: ") + e.what());
  }

  try {
    ObjectReader top(doc, "document");
    const Json* version = top.get("schemaVersion");
    if (!version) malformed("document lacks 'schemaVersion'");
    if (!version->is_string() || version->get<std::string>() != kJsonSchemaVersion) {
      throw ImportError{Code::T011_UnsupportedSchemaVersion,
                        "unsupported schemaVersion " + version->dump() + "; this build reads \"" +
                            std::string(kJsonSchemaVersion) + "\""};
    }
    top.finish({"schemaVersion", "package", "imports", "elements"});

    auto package = QualifiedName::parse(top.string("package"));
    if (!package) malformed("'package' must be a dotted identifier");
    ModelBuilder builder(std::move(*package));
    if (!file.empty()) builder.set_source(std::string(file));

    std::size_t i = 0;
    for (const auto& ij : top.array("imports")) {
      ObjectReader r(ij, "imports[" + std::to_string(i++) + "]");
      auto target = QualifiedName::parse(r.string("target"));
      if (!target) malformed("'target' in " + r.where() + " must be a dotted identifier");
      auto alias = r.optional_string("alias");
      if (alias && !is_identifier(*alias)) malformed("'alias' in " + r.where() + " must be an identifier");
      r.finish({"target", "alias"});
      builder.add_import(ImportDecl{std::move(*target), std::move(alias), {}});
    }

    Diagnostics diags;
    i = 0;
    for (const auto& ej : top.array("elements")) {
      Element e = read_element(ej, i++);
      if (auto problems = structural_problems(e); !problems.empty()) {
        for (auto& p : problems) {
          p.span = where;
          p.message = "elements[" + std::to_string(i - 1) + "]: " + p.message;
          diags.push_back(std::move(p));
        }
        continue;
      }
      if (auto dup = builder.add(std::move(e))) {
        dup->span = where;
        dup->related.clear();
        diags.push_back(std::move(*dup));
      }
    }
    if (has_errors(diags)) return {std::nullopt, std::move(diags)};
    return {std::move(builder).build(), std::move(diags)};
  } catch (const ImportError& err) {
    return failure(err.code, err.message);
  } catch (const std::invalid_argument& err) {
    return failure(Code::T012_MalformedDocument, err.what());
  }
}

}  // namespace rsl
