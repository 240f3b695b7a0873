#include "generator.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rsl/parser.hpp"

namespace rsl::testing {

namespace {

constexpr std::string_view kAlpha = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
constexpr std::string_view kIdentTail = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";
const std::vector<std::string> kTextPieces = {
    "a", "b", "z", "Q", "0", "7", " ", " ", " ", ",", ".", ";", ":", "!", "?", "'", "(", ")", "[", "]", "{", "}",
    "-", "/", "\"", "\\", "#", "é", "ü", "→", "日本", "order", "step", "Actor", "//", "fast"};

bool resolves_to(const SpecificationModel& m, const std::string& id, std::initializer_list<ElementKind> kinds) {
  const Element* e = resolve(m, id);
  return e && std::find(kinds.begin(), kinds.end(), e->kind()) != kinds.end();
}

}  // namespace

ModelGenerator::ModelGenerator(std::uint64_t seed, GeneratorOptions options) : rng_(seed), options_(options) {}

template <class E>
E ModelGenerator::pick_literal() {
  return static_cast<E>(below(vocabulary_size<E>()));
}

std::string ModelGenerator::identifier(std::size_t max_len) {
  for (;;) {
    std::string s(1, kAlpha[below(kAlpha.size())]);
    std::size_t len = below(max_len);
    for (std::size_t i = 0; i < len; ++i) s += kIdentTail[below(kIdentTail.size())];
    if (is_identifier(s)) return s;
  }
}

std::string ModelGenerator::text(std::size_t max_len) {
  std::string s;
  std::size_t pieces = 1 + below(max_len);
  for (std::size_t i = 0; i < pieces; ++i) s += kTextPieces[below(kTextPieces.size())];
  return s;
}

std::optional<std::string> ModelGenerator::maybe_text(double p) {
  if (!chance(p)) return std::nullopt;
  return text();
}

std::string ModelGenerator::reference_to(const SpecificationModel& m, ElementKind kind, const std::string& self_id) {
  if (!options_.consistent && chance(0.15)) {
    // Dangling or qualified references are legal model content.
    return chance(0.5) ? identifier() : identifier(4) + "." + identifier(6);
  }
  std::vector<const Element*> candidates;
  for (const auto& e : m.elements) {
    if (e.kind() == kind && e.id != self_id) candidates.push_back(&e);
  }
  if (candidates.empty()) return identifier();
  return candidates[below(candidates.size())]->id;
}

Element ModelGenerator::element(const SpecificationModel& m, ElementKind kind, std::vector<std::string>& used_ids) {
  Element e;
  auto fresh_id = [&] {
    for (;;) {
      std::string id = identifier();
      if (std::find(used_ids.begin(), used_ids.end(), id) == used_ids.end()) return id;
    }
  };
  if (kind != ElementKind::GlossaryTerm) {
    e.id = fresh_id();
    e.name = maybe_text();
    e.description = maybe_text(0.4);
  }
  const bool ok = options_.consistent;
  switch (kind) {
    case ElementKind::Actor:
      e.body = Actor{pick_literal<ActorKind>()};
      break;
    case ElementKind::DataEntity: {
      DataEntity de{pick_literal<EntityKind>(), {}};
      std::set<std::string> names;
      bool has_pk = false;
      std::size_t n = below(5);
      for (std::size_t i = 0; i < n; ++i) {
        DataAttribute a;
        a.name = identifier(8);
        if (ok && !names.insert(a.name).second) continue;
        a.datatype = pick_literal<Datatype>();
        for (std::size_t c = 0; c < vocabulary_size<Constraint>(); ++c) {
          if (chance(0.3)) a.constraints.insert(static_cast<Constraint>(c));
        }
        if (a.constraints.contains(Constraint::PrimaryKey)) {
          if (ok && has_pk) a.constraints.erase(Constraint::PrimaryKey);
          has_pk = true;
        }
        if (chance(0.25)) {
          a.references = reference_to(m, ElementKind::DataEntity, e.id);
          if (ok && a.datatype != Datatype::Integer && a.datatype != Datatype::Text) a.datatype = Datatype::Integer;
          if (ok && !resolves_to(m, *a.references, {ElementKind::DataEntity})) a.references.reset();
        }
        de.attributes.push_back(std::move(a));
      }
      e.body = std::move(de);
      break;
    }
    case ElementKind::UseCase: {
      UseCase uc;
      uc.kind = pick_literal<UseCaseKind>();
      uc.primary_actor = reference_to(m, ElementKind::Actor, e.id);
      std::size_t nd = below(3);
      for (std::size_t i = 0; i < nd; ++i) uc.data_entities.push_back(reference_to(m, ElementKind::DataEntity, e.id));
      std::set<std::string> ids;
      bool main = false;
      std::size_t ns = below(4);
      for (std::size_t i = 0; i < ns; ++i) {
        Scenario sc;
        sc.id = identifier(6);
        // Workbooks join steps to scenarios by id, so ids stay unique.
        if (!ids.insert(sc.id).second) continue;
        sc.kind = pick_literal<ScenarioKind>();
        if (ok && sc.kind == ScenarioKind::Main && main) sc.kind = ScenarioKind::Alternative;
        main = main || sc.kind == ScenarioKind::Main;
        int order = 0;
        std::size_t nst = below(5);
        for (std::size_t k = 0; k < nst; ++k) {
          order += ok ? 1 + static_cast<int>(below(3)) : 1 + static_cast<int>(below(5)) - (chance(0.1) ? 3 : 0);
          if (order < 1) order = 1;
          sc.steps.push_back(Step{order, pick_literal<Performer>(), text(), {}});
        }
        uc.scenarios.push_back(std::move(sc));
      }
      if (ok) {
        // Consistent models only reference what exists.
        if (!resolves_to(m, uc.primary_actor, {ElementKind::Actor})) return element(m, ElementKind::Actor, used_ids);
        std::erase_if(uc.data_entities,
                      [&](const std::string& d) { return !resolves_to(m, d, {ElementKind::DataEntity}); });
      }
      e.body = std::move(uc);
      break;
    }
    case ElementKind::UserStory: {
      UserStory us{reference_to(m, ElementKind::Actor, e.id), text(), maybe_text(0.7), pick_literal<Priority>()};
      if (ok && !resolves_to(m, us.as_a, {ElementKind::Actor})) return element(m, ElementKind::Actor, used_ids);
      e.body = std::move(us);
      break;
    }
    case ElementKind::Goal: {
      Goal g;
      if (chance(0.5)) {
        g.parent = reference_to(m, ElementKind::Goal, e.id);
        if (ok && !resolves_to(m, *g.parent, {ElementKind::Goal})) g.parent.reset();
      }
      g.priority = pick_literal<Priority>();
      e.body = std::move(g);
      break;
    }
    case ElementKind::QualityRequirement:
      e.body = QualityRequirement{pick_literal<QRKind>(), maybe_text(), maybe_text()};
      break;
    case ElementKind::TestCase: {
      TestCase tc;
      tc.traces_to = reference_to(m, chance(0.5) ? ElementKind::UseCase : ElementKind::UserStory, e.id);
      const Element* target = resolve(m, tc.traces_to);
      if (target && target->kind() != ElementKind::UseCase && target->kind() != ElementKind::UserStory) target = nullptr;
      if (ok && !target) return element(m, ElementKind::Actor, used_ids);
      if (target && target->as<UseCase>() && !target->as<UseCase>()->scenarios.empty() && chance(0.5)) {
        const auto& scs = target->as<UseCase>()->scenarios;
        tc.scenario = scs[below(scs.size())].id;
      } else if (!ok && chance(0.2)) {
        tc.scenario = identifier(6);
      }
      for (auto* list : {&tc.given, &tc.when, &tc.then}) {
        std::size_t n = below(3);
        for (std::size_t i = 0; i < n; ++i) list->push_back(text());
      }
      e.body = std::move(tc);
      break;
    }
    case ElementKind::GlossaryTerm: {
      for (;;) {
        GlossaryTerm gt;
        gt.term = text(4);
        gt.part_of_speech = pick_literal<PartOfSpeech>();
        gt.definition = maybe_text();
        std::size_t n = below(3);
        for (std::size_t i = 0; i < n; ++i) {
          std::string syn = text(3);
          if (slug(syn) != slug(gt.term)) gt.synonyms.push_back(std::move(syn));
        }
        gt.preferred = chance(0.7);
        Element t = make_glossary_term(std::move(gt));
        if (std::find(used_ids.begin(), used_ids.end(), t.id) != used_ids.end()) continue;
        if (!structural_problems(t).empty()) continue;
        used_ids.push_back(t.id);
        return t;
      }
    }
  }
  used_ids.push_back(e.id);
  return e;
}

SpecificationModel ModelGenerator::next() { return next_with(below(options_.max_elements + 1)); }

SpecificationModel ModelGenerator::next_with(std::size_t n) {
  std::vector<std::string> segments;
  std::size_t nseg = 1 + below(3);
  for (std::size_t i = 0; i < nseg; ++i) segments.push_back(identifier(6));
  SpecificationModel m{QualifiedName(segments)};
  if (options_.imports) {
    std::size_t ni = below(3);
    for (std::size_t i = 0; i < ni; ++i) {
      std::vector<std::string> target;
      std::size_t nt = 1 + below(3);
      for (std::size_t k = 0; k < nt; ++k) target.push_back(identifier(6));
      std::optional<std::string> alias;
      if (chance(0.5)) alias = identifier(4);
      m.imports.push_back(ImportDecl{QualifiedName(target), alias, {}});
    }
  }
  std::vector<std::string> used;
  while (m.elements.size() < n) {
    auto kind = kAllElementKinds[below(kAllElementKinds.size())];
    Element e = element(m, kind, used);
    if (!structural_problems(e).empty()) throw std::logic_error("generator produced an invalid element");
    m.elements.push_back(std::move(e));
  }
  return m;
}

std::string describe_difference(const SpecificationModel& a, const SpecificationModel& b) {
  if (structural_eq(a, b)) return {};
  std::string fa = format(canonicalize(a));
  std::string fb = format(canonicalize(b));
  std::istringstream la(fa), lb(fb);
  std::string x, y;
  for (int line = 1;; ++line) {
    bool ga = static_cast<bool>(std::getline(la, x));
    bool gb = static_cast<bool>(std::getline(lb, y));
    if (!ga && !gb) return "models differ in a field the text form does not show";
    if (!ga || !gb || x != y) {
      return "line " + std::to_string(line) + ":\n  left:  " + (ga ? x : "<end>") + "\n  right: " + (gb ? y : "<end>");
    }
  }
}

std::string fixture_path(const std::string& name) { return std::string(RSL_FIXTURE_DIR) + "/" + name; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace rsl::testing
