#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "generator.hpp"
#include "rsl/parser.hpp"
#include "rsl/validator.hpp"

using namespace rsl;
using rsl::testing::fixture_path;
using rsl::testing::ModelGenerator;
using rsl::testing::read_text;

namespace {

SpecificationModel parse_ok(const std::string& src) {
  auto r = parse(src, "test.rsl");
  EXPECT_TRUE(r.ok()) << (r.diagnostics.empty() ? "" : format_diagnostic(r.diagnostics[0]));
  return std::move(*r.model);
}

SpecificationModel fixture(const std::string& name) { return parse_ok(read_text(fixture_path(name))); }

std::vector<Code> codes(const Diagnostics& diags) {
  std::vector<Code> out;
  for (const auto& d : diags) out.push_back(d.code);
  return out;
}

std::size_t count_code(const Diagnostics& diags, Code c) {
  return static_cast<std::size_t>(std::count_if(diags.begin(), diags.end(), [&](const auto& d) { return d.code == c; }));
}

CheckConfig empty_config() { return CheckConfig{}; }

}  // namespace

// ---- consistency ----

TEST(Consistency, DanglingPrimaryActor) {
  auto m = parse_ok(R"(Package p {
    UseCase uc : Report [
        actorInitiates a_Ghost
    ]
})");
  auto diags = check_consistency(m);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, Code::C010_UnresolvedReference);
  EXPECT_NE(diags[0].message.find("a_Ghost"), std::string::npos);
  EXPECT_EQ(diags[0].severity, Severity::Error);
}

TEST(Consistency, GoalTwoCycle) {
  auto m = parse_ok(R"(Package p {
    Goal g1 [ partOf g2 ]
    Goal g2 [ partOf g1 ]
})");
  auto diags = check_consistency(m);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, Code::C014_GoalCycle);
  EXPECT_NE(diags[0].message.find("g1 -> g2 -> g1"), std::string::npos);
  EXPECT_EQ(diags[0].span->start_line, 2u);
  ASSERT_EQ(diags[0].related.size(), 1u);
  EXPECT_EQ(diags[0].related[0].span.start_line, 3u);
}

TEST(Consistency, WrongReferenceKind) {
  auto m = parse_ok(R"(Package p {
    DataEntity E : Master [ ]
    UserStory us [ asA E iWant "x" ]
})");
  EXPECT_EQ(codes(check_consistency(m)), std::vector<Code>{Code::C011_WrongReferenceKind});
}

TEST(Consistency, StepOrderDuplicateScenarioAndSecondMain) {
  auto m = parse_ok(R"(Package p {
    Actor a : User
    UseCase uc : Report [
        actorInitiates a
        scenario s : Main [
            step 1 : Actor "x"
            step 1 : System "y"
        ]
        scenario s : Main [
            step 2 : Actor "x"
        ]
    ]
})");
  auto diags = check_consistency(m);
  EXPECT_EQ(codes(diags), (std::vector<Code>{Code::C012_StepOrder, Code::C013_DuplicateScenario,
                                             Code::C015_MultipleMainScenarios}));
  EXPECT_EQ(diags[0].span->start_line, 7u);
  EXPECT_EQ(diags[1].span->start_line, 9u);
}

TEST(Consistency, ForeignKeysAndAttributes) {
  auto m = parse_ok(R"(Package p {
    DataEntity A : Master [
        attribute ID : Integer constraints (PrimaryKey)
    ]
    DataEntity B : Master [
        attribute ID : Integer constraints (PrimaryKey)
        attribute a : Date references A
        attribute a : Integer
        attribute k : Text constraints (PrimaryKey)
        attribute z : Integer references Nowhere
    ]
})");
  EXPECT_EQ(codes(check_consistency(m)),
            (std::vector<Code>{Code::C016_ForeignKeyDatatype, Code::C017_DuplicateAttribute,
                               Code::C018_MultiplePrimaryKeys, Code::C010_UnresolvedReference}));
}

TEST(Consistency, TestCaseScenarioMustExist) {
  auto m = parse_ok(R"(Package p {
    Actor a : User
    UseCase uc : Report [
        actorInitiates a
        scenario s : Main [ step 1 : Actor "x" ]
    ]
    TestCase t1 [ traces uc scenario s then "ok" ]
    TestCase t2 [ traces uc scenario nope then "ok" ]
    TestCase t3 [ traces a then "ok" ]
})");
  EXPECT_EQ(codes(check_consistency(m)),
            (std::vector<Code>{Code::C010_UnresolvedReference, Code::C011_WrongReferenceKind}));
}

TEST(Consistency, CycleReportedOnceFromEarliestMember) {
  auto m = parse_ok(R"(Package p {
    Goal g0 [ partOf g2 ]
    Goal g1 [ partOf g3 ]
    Goal g2 [ partOf g3 ]
    Goal g3 [ partOf g1 ]
})");
  auto diags = check_consistency(m);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_NE(diags[0].message.find("g1 -> g3 -> g1"), std::string::npos) << diags[0].message;
}

TEST(Consistency, ShippedFixturesAreClean) {
  for (const auto* name : {"orders.rsl", "shop.rsl", "large.rsl", "vague.rsl", "fk_chain.rsl", "fk_cycle.rsl"}) {
    EXPECT_TRUE(check_consistency(fixture(name)).empty()) << name;
  }
}

namespace {

struct Seeded {
  SpecificationModel model;
  std::multiset<Code> expected;
};

// Injects faults into a consistent model. Each fault touches an element no
// other fault touched and raises exactly one diagnostic of its code.
Seeded inject_faults(SpecificationModel m, std::size_t faults, std::mt19937_64& rng) {
  Seeded out{std::move(m), {}};
  std::set<std::size_t> touched;
  std::size_t fresh = 0;
  auto fresh_id = [&] { return "zz_missing_" + std::to_string(fresh++); };
  auto pick = [&](auto&& pred) -> Element* {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < out.model.elements.size(); ++i) {
      if (!touched.contains(i) && pred(out.model.elements[i])) candidates.push_back(i);
    }
    if (candidates.empty()) return nullptr;
    std::size_t i = candidates[rng() % candidates.size()];
    touched.insert(i);
    return &out.model.elements[i];
  };
  // Elements other elements point at are left alone so faults stay local.
  std::set<std::string> referenced;
  for (const auto& e : out.model.elements) {
    if (const auto* tc = e.as<TestCase>()) referenced.insert(tc->traces_to);
    if (const auto* g = e.as<Goal>(); g && g->parent) referenced.insert(*g->parent);
  }
  auto free_of_refs = [&](const Element& e) { return !referenced.contains(e.id); };

  const std::vector<Code> kinds = {Code::C010_UnresolvedReference, Code::C011_WrongReferenceKind,
                                   Code::C012_StepOrder,           Code::C013_DuplicateScenario,
                                   Code::C014_GoalCycle,           Code::C015_MultipleMainScenarios,
                                   Code::C016_ForeignKeyDatatype,  Code::C017_DuplicateAttribute};
  std::size_t guard = 0;
  while (out.expected.size() < faults && guard++ < 1000) {
    Code code = kinds[rng() % kinds.size()];
    bool done = false;
    switch (code) {
      case Code::C010_UnresolvedReference:
        if (auto* e = pick([](const Element& e) { return e.as<UserStory>() != nullptr; })) {
          e->as<UserStory>()->as_a = fresh_id();
          done = true;
        }
        break;
      case Code::C011_WrongReferenceKind: {
        const Element* entity = nullptr;
        for (const auto& e : out.model.elements) {
          if (e.as<DataEntity>()) entity = &e;
        }
        if (!entity) break;
        std::string target = entity->id;
        if (auto* e = pick([](const Element& e) { return e.as<UserStory>() != nullptr; })) {
          e->as<UserStory>()->as_a = target;
          done = true;
        }
        break;
      }
      case Code::C012_StepOrder:
        if (auto* e = pick([](const Element& e) {
              const auto* uc = e.as<UseCase>();
              return uc && !uc->scenarios.empty() && uc->scenarios[0].steps.size() >= 2;
            })) {
          auto& steps = e->as<UseCase>()->scenarios[0].steps;
          steps[1].order = steps[0].order;
          done = true;
        }
        break;
      case Code::C013_DuplicateScenario:
        if (auto* e = pick([](const Element& e) {
              const auto* uc = e.as<UseCase>();
              return uc && !uc->scenarios.empty();
            })) {
          auto& scs = e->as<UseCase>()->scenarios;
          Scenario copy = scs[0];
          copy.kind = ScenarioKind::Exception;
          scs.push_back(copy);
          done = true;
        }
        break;
      case Code::C014_GoalCycle: {
        Element* a = pick([&](const Element& e) { return e.as<Goal>() && free_of_refs(e); });
        if (!a) break;
        Element* b = pick([&](const Element& e) { return e.as<Goal>() && free_of_refs(e); });
        if (!b) {
          touched.erase(static_cast<std::size_t>(a - out.model.elements.data()));
          break;
        }
        a->as<Goal>()->parent = b->id;
        b->as<Goal>()->parent = a->id;
        done = true;
        break;
      }
      case Code::C015_MultipleMainScenarios:
        if (auto* e = pick([](const Element& e) { return e.as<UseCase>() != nullptr; })) {
          auto& scs = e->as<UseCase>()->scenarios;
          bool has_main = std::any_of(scs.begin(), scs.end(), [](const auto& s) { return s.kind == ScenarioKind::Main; });
          if (!has_main) scs.push_back(Scenario{"zz_main_a", ScenarioKind::Main, {}, {}});
          scs.push_back(Scenario{"zz_main_b", ScenarioKind::Main, {}, {}});
          done = true;
        }
        break;
      case Code::C016_ForeignKeyDatatype: {
        std::string target;
        for (const auto& e : out.model.elements) {
          if (e.as<DataEntity>()) target = e.id;
        }
        if (target.empty()) break;
        if (auto* e = pick([](const Element& e) { return e.as<DataEntity>() != nullptr; })) {
          e->as<DataEntity>()->attributes.push_back(DataAttribute{"zz_fk", Datatype::Boolean, {}, target, {}});
          done = true;
        }
        break;
      }
      case Code::C017_DuplicateAttribute:
        if (auto* e = pick([](const Element& e) { return e.as<DataEntity>() != nullptr; })) {
          auto& attrs = e->as<DataEntity>()->attributes;
          attrs.push_back(DataAttribute{"zz_dup", Datatype::Text, {}, {}, {}});
          attrs.push_back(DataAttribute{"zz_dup", Datatype::Integer, {}, {}, {}});
          done = true;
        }
        break;
      default:
        break;
    }
    if (done) out.expected.insert(code);
  }
  return out;
}

}  // namespace

TEST(Consistency, SeededFaultsAreReportedExactly) {
  std::mt19937_64 rng(rsl::testing::kSeed);
  ModelGenerator gen(rsl::testing::kSeed, {.consistent = true, .imports = false});
  for (int round = 0; round < 25; ++round) {
    auto base = gen.next_with(200);
    ASSERT_TRUE(check_consistency(base).empty());
    auto seeded = inject_faults(base, 10, rng);
    ASSERT_EQ(seeded.expected.size(), 10u);
    auto diags = check_consistency(seeded.model);
    std::multiset<Code> actual;
    for (const auto& d : diags) actual.insert(d.code);
    EXPECT_EQ(actual, seeded.expected) << "round " << round;
  }
}

namespace {

// Every reference field, checked by brute force against the element list.
std::size_t bad_references(const SpecificationModel& m) {
  auto kind_of = [&](const std::string& id) -> std::optional<ElementKind> {
    for (const auto& e : m.elements) {
      if (e.id == id) return e.kind();
    }
    return std::nullopt;
  };
  auto bad = [&](const std::string& id, std::initializer_list<ElementKind> ok) {
    auto k = kind_of(id);
    return !k || std::find(ok.begin(), ok.end(), *k) == ok.end();
  };
  std::size_t n = 0;
  for (const auto& e : m.elements) {
    if (const auto* uc = e.as<UseCase>()) {
      n += bad(uc->primary_actor, {ElementKind::Actor});
      for (const auto& d : uc->data_entities) n += bad(d, {ElementKind::DataEntity});
    } else if (const auto* us = e.as<UserStory>()) {
      n += bad(us->as_a, {ElementKind::Actor});
    } else if (const auto* g = e.as<Goal>()) {
      if (g->parent) n += bad(*g->parent, {ElementKind::Goal});
    } else if (const auto* de = e.as<DataEntity>()) {
      for (const auto& a : de->attributes) {
        if (a.references) n += bad(*a.references, {ElementKind::DataEntity});
      }
    } else if (const auto* tc = e.as<TestCase>()) {
      n += bad(tc->traces_to, {ElementKind::UseCase, ElementKind::UserStory});
    }
  }
  return n;
}

}  // namespace

TEST(Consistency, ReferenceFindingsAgreeWithBruteForce) {
  ModelGenerator gen(rsl::testing::kSeed);
  std::size_t clean = 0;
  for (int i = 0; i < 1000; ++i) {
    auto m = gen.next();
    auto diags = check_consistency(m);
    std::size_t reported = 0;
    for (const auto& d : diags) {
      // Scenario findings of test cases are not counted by the oracle.
      if ((d.code == Code::C010_UnresolvedReference || d.code == Code::C011_WrongReferenceKind) &&
          d.message.find("scenario") == std::string::npos) {
        ++reported;
      }
    }
    EXPECT_EQ(reported, bad_references(m)) << "model " << i;
    if (diags.empty()) {
      ++clean;
      EXPECT_EQ(bad_references(m), 0u);
    }
  }
  EXPECT_GT(clean, 0u);
}

// ---- completeness ----

TEST(Completeness, MissingRequiredKind) {
  auto m = parse_ok("Package p {\n    Actor a : User\n}");
  CheckConfig c;
  c.model_required_kinds = {ElementKind::UseCase};
  auto diags = check_completeness(m, c);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, Code::X010_MissingRequiredKind);
  EXPECT_EQ(diags[0].severity, Severity::Warning);
}

TEST(Completeness, ConstructRuleOnUseCaseWithoutScenarios) {
  auto m = parse_ok("Package p {\n    Actor a : User\n    UseCase uc : Report [ actorInitiates a ]\n}");
  CheckConfig c;
  c.construct_rules[ElementKind::UseCase] = {"scenarios>=1"};
  auto diags = check_completeness(m, c);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, Code::X012_ConstructRuleViolated);
  EXPECT_EQ(diags[0].span->start_line, 3u);
  EXPECT_NE(diags[0].message.find("uc"), std::string::npos);
}

TEST(Completeness, ViewpointMessageNamesViewpoint) {
  auto m = parse_ok("Package p {\n    Actor a : User\n}");
  CheckConfig c;
  c.viewpoints["structure"] = {ElementKind::DataEntity};
  auto diags = check_completeness(m, c);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, Code::X011_EmptyViewpoint);
  EXPECT_NE(diags[0].message.find("'structure'"), std::string::npos);
}

TEST(Completeness, DefaultConfigOnOrdersFixture) {
  auto m = fixture("orders.rsl");
  EXPECT_TRUE(check_completeness(m, default_check_config()).empty());
  m.elements[2].as<UseCase>()->scenarios.clear();
  auto diags = check_completeness(m, default_check_config());
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, Code::X012_ConstructRuleViolated);
}

TEST(Completeness, MalformedRuleTokens) {
  auto m = parse_ok("Package p {\n    Actor a : User\n}");
  for (const auto* token : {"scenarios", "scenarios>=", "scenarios>=x", "nope:set", "kind>=1", ">=1", "element_kind:set"}) {
    CheckConfig c;
    c.construct_rules[ElementKind::UseCase] = {token};
    auto diags = check_completeness(m, c);
    ASSERT_EQ(diags.size(), 1u) << token;
    EXPECT_EQ(diags[0].code, Code::X001_MalformedConstructRule) << token;
  }
  CheckConfig ok;
  ok.construct_rules[ElementKind::UseCase] = {"data_entities>=0", "description:set"};
  EXPECT_TRUE(check_completeness(m, ok).empty());
}

TEST(Completeness, WarningsAsErrorsPromotes) {
  auto m = parse_ok("Package p {\n}");
  CheckConfig c;
  c.model_required_kinds = {ElementKind::Actor};
  c.strictness = Strictness::WarningsAsErrors;
  auto diags = check_completeness(m, c);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].severity, Severity::Error);
}

TEST(Completeness, AddingMissingKindNeverAddsX010) {
  ModelGenerator gen(rsl::testing::kSeed);
  auto config = default_check_config();
  config.model_required_kinds = {kAllElementKinds.begin(), kAllElementKinds.end()};
  for (int i = 0; i < 300; ++i) {
    auto m = gen.next_with(i % 6);
    auto before = count_code(check_completeness(m, config), Code::X010_MissingRequiredKind);
    auto bigger = gen.next_with(4);
    for (auto& e : bigger.elements) {
      if (resolve(m, e.id)) continue;
      auto grown = m;
      grown.elements.push_back(e);
      EXPECT_LE(count_code(check_completeness(grown, config), Code::X010_MissingRequiredKind), before);
    }
  }
}

TEST(Completeness, RemovingAnElementIsLocal) {
  ModelGenerator gen(rsl::testing::kSeed + 5);
  auto config = default_check_config();
  config.construct_rules[ElementKind::UserStory] = {"so_that:set"};
  config.construct_rules[ElementKind::Goal] = {"parent:set"};
  auto x012_ids = [&](const SpecificationModel& m) {
    std::multiset<std::string> out;
    for (const auto& d : check_completeness(m, config)) {
      if (d.code != Code::X012_ConstructRuleViolated) continue;
      out.insert(d.message.substr(0, d.message.find("' violates")));
    }
    return out;
  };
  for (int i = 0; i < 150; ++i) {
    auto m = gen.next_with(8);
    auto before = x012_ids(m);
    for (std::size_t k = 0; k < m.elements.size(); ++k) {
      auto smaller = m;
      smaller.elements.erase(smaller.elements.begin() + static_cast<std::ptrdiff_t>(k));
      for (const auto& id : x012_ids(smaller)) EXPECT_TRUE(before.contains(id)) << id;
    }
  }
}

// ---- ambiguity ----

TEST(Ambiguity, VagueStep) {
  auto m = parse_ok(R"(Package p {
    Actor a : User
    UseCase uc : Report [
        actorInitiates a
        scenario s : Main [
            step 1 : System "responds fast"
        ]
    ]
})");
  CheckConfig c;
  c.vague_terms = {"fast"};
  auto diags = check_ambiguity(m, c);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, Code::A010_VagueTerm);
  EXPECT_EQ(diags[0].severity, Severity::Warning);
  EXPECT_EQ(diags[0].span->start_line, 6u);
  EXPECT_EQ(diags[0].span->start_col, 13u);
}

TEST(Ambiguity, NonPreferredSynonymSuggestsPreferredTerm) {
  auto m = parse_ok(R"(Package p {
    Actor a : User
    UseCase uc : Report [
        actorInitiates a
        scenario s : Main [
            step 1 : Actor "creates a purchase"
        ]
    ]
    Term "order" : Noun [ synonym "purchase" ]
})");
  auto diags = check_ambiguity(m, empty_config());
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, Code::A011_NonPreferredTerm);
  EXPECT_NE(diags[0].message.find("use 'order'"), std::string::npos);
}

TEST(Ambiguity, NonPreferredTermWithoutPreferredEntryIsSilent) {
  auto m = parse_ok(R"(Package p {
    Goal g "Handle each purchase"
    Term "order" : Noun [ synonym "purchase" notPreferred ]
})");
  EXPECT_TRUE(check_ambiguity(m, empty_config()).empty());
}

TEST(Ambiguity, ConflictingGlossary) {
  auto m = parse_ok(R"(Package p {
    Term "order" : Noun [ synonym "purchase" ]
    Term "purchase" : Noun [ synonym "order" ]
})");
  auto diags = check_ambiguity(m, empty_config());
  EXPECT_EQ(codes(diags), std::vector<Code>{Code::A012_ConflictingGlossary});
}

TEST(Ambiguity, WholeWordsOnly) {
  EXPECT_TRUE(find_whole_word("breakfast", "fast").empty());
  EXPECT_TRUE(find_whole_word("fastened", "fast").empty());
  EXPECT_EQ(find_whole_word("Fast, fast; FAST", "fast"), (std::vector<std::size_t>{0, 6, 12}));
  EXPECT_EQ(find_whole_word("ok if possible.", "if possible"), std::vector<std::size_t>{3});
  EXPECT_EQ(find_whole_word("a user-friendly UI", "user-friendly"), std::vector<std::size_t>{2});
  auto m = parse_ok("Package p {\n    Goal g \"Serve breakfast daily\"\n}");
  EXPECT_TRUE(check_ambiguity(m, default_check_config()).empty());
}

TEST(Ambiguity, HandMarkedVagueFixture) {
  auto m = fixture("vague.rsl");
  std::vector<std::string> expected;
  std::istringstream in(read_text(fixture_path("vague.expected")));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') expected.push_back(line);
  }
  ASSERT_EQ(expected.size(), 7u);
  std::vector<std::string> actual;
  for (const auto& d : check_ambiguity(m, default_check_config())) {
    ASSERT_EQ(d.code, Code::A010_VagueTerm);
    auto open = d.message.find('\'');
    auto close = d.message.find('\'', open + 1);
    actual.push_back(std::to_string(d.span->start_line) + ":" + std::to_string(d.span->start_col) + " " +
                     d.message.substr(open + 1, close - open - 1));
  }
  EXPECT_EQ(actual, expected);
}

TEST(Ambiguity, SynonymHitsAgreeWithPerSynonymScan) {
  // Synonyms with punctuation at either end, case variants and overlapping
  // prefixes, against texts drawn from the same pieces.
  const std::vector<std::string> synonyms = {"purchase", "purchase order", "po", "p.o.", "-x", "order-line",
                                             "Order Line", "x-", "line"};
  const std::vector<std::string> pieces = {"purchase", "PURCHASE", "order", "po", "p.o.", "-x", "x-", "line",
                                           "order-line", "reorder", "pos", "Line", ",", ".", " ", "  "};
  std::mt19937_64 rng(rsl::testing::kSeed);
  auto below = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  std::size_t total_hits = 0;
  for (int round = 0; round < 300; ++round) {
    std::vector<std::string> chosen;
    std::string src = "Package p {\n";
    for (std::size_t t = 0; t < 3; ++t) {
      src += "    Term \"term" + std::to_string(t) + "\" : Noun [";
      for (std::size_t k = 0; k < 1 + below(3); ++k) {
        const auto& syn = synonyms[below(synonyms.size())];
        src += " synonym \"" + syn + "\"";
        chosen.push_back(syn);
      }
      src += " ]\n";
    }
    std::vector<std::string> texts;
    for (std::size_t g = 0; g < 4; ++g) {
      std::string text;
      for (std::size_t w = 0; w < 2 + below(8); ++w) text += pieces[below(pieces.size())] + (below(2) ? " " : "");
      texts.push_back(text);
      src += "    Goal g" + std::to_string(g) + " \"" + text + "\"\n";
    }
    src += "}\n";
    auto m = parse_ok(src);

    std::vector<std::string> expected;
    for (std::size_t g = 0; g < texts.size(); ++g) {
      std::vector<std::pair<std::size_t, std::size_t>> hits;
      for (std::size_t k = 0; k < chosen.size(); ++k) {
        std::string needle = chosen[k];
        std::transform(needle.begin(), needle.end(), needle.begin(), [](unsigned char c) { return std::tolower(c); });
        for (auto pos : find_whole_word(texts[g], needle)) hits.emplace_back(pos, k);
      }
      std::sort(hits.begin(), hits.end());
      for (const auto& [pos, k] : hits) expected.push_back(std::to_string(5 + g) + " " + chosen[k]);
    }
    std::vector<std::string> actual;
    for (const auto& d : check_ambiguity(m, empty_config())) {
      ASSERT_EQ(d.code, Code::A011_NonPreferredTerm);
      auto open = d.message.find('\'');
      auto close = d.message.find('\'', open + 1);
      actual.push_back(std::to_string(d.span->start_line) + " " + d.message.substr(open + 1, close - open - 1));
    }
    ASSERT_EQ(actual, expected) << src;
    total_hits += actual.size();
  }
  EXPECT_GT(total_hits, 300u);
}

// ---- check_all ----

TEST(CheckAll, ValidFixturePasses) {
  for (const auto* name : {"orders.rsl", "shop.rsl"}) {
    auto report = check_all(fixture(name), default_check_config());
    EXPECT_TRUE(report.passed) << name;
    EXPECT_TRUE(report.diagnostics.empty()) << name << ": " << format_diagnostic(report.diagnostics[0]);
  }
}

TEST(CheckAll, DanglingReferenceFails) {
  auto m = fixture("orders.rsl");
  m.elements[2].as<UseCase>()->primary_actor = "a_Nobody";
  auto report = check_all(m, default_check_config());
  EXPECT_FALSE(report.passed);
  EXPECT_EQ(report.counts, (SeverityCounts{1, 0, 0}));
}

TEST(CheckAll, WarningsAsErrorsWithVagueTerm) {
  auto m = fixture("orders.rsl");
  m.elements[0].description = "A fast customer";
  auto config = default_check_config();
  EXPECT_TRUE(check_all(m, config).passed);
  config.strictness = Strictness::WarningsAsErrors;
  auto report = check_all(m, config);
  EXPECT_FALSE(report.passed);
  EXPECT_EQ(report.counts.warnings, 1u);
}

TEST(CheckAll, OrderIsConsistencyCompletenessAmbiguity) {
  auto m = parse_ok(R"(Package p {
    UserStory us [ asA nobody iWant "something easy" ]
})");
  auto report = check_all(m, default_check_config());
  ASSERT_GE(report.diagnostics.size(), 3u);
  EXPECT_EQ(report.diagnostics.front().code, Code::C010_UnresolvedReference);
  EXPECT_EQ(report.diagnostics.back().code, Code::A010_VagueTerm);
  auto first_x = std::find_if(report.diagnostics.begin(), report.diagnostics.end(),
                              [](const auto& d) { return code_text(d.code)[4] == 'X'; });
  EXPECT_NE(first_x, report.diagnostics.end());
}

TEST(CheckAll, Deterministic) {
  ModelGenerator gen(rsl::testing::kSeed);
  auto config = default_check_config();
  for (int i = 0; i < 200; ++i) {
    auto m = gen.next();
    auto a = check_all(m, config);
    auto b = check_all(m, config);
    EXPECT_EQ(a.diagnostics, b.diagnostics);
    EXPECT_EQ(report_to_json(a, "x"), report_to_json(b, "x"));
  }
}

TEST(CheckAll, PassedMatchesCounts) {
  ModelGenerator gen(rsl::testing::kSeed + 9);
  for (auto strictness : {Strictness::ErrorsOnly, Strictness::WarningsAsErrors}) {
    auto config = default_check_config();
    config.strictness = strictness;
    for (int i = 0; i < 200; ++i) {
      auto r = check_all(gen.next(), config);
      std::size_t blocking = r.counts.errors + (strictness == Strictness::WarningsAsErrors ? r.counts.warnings : 0);
      EXPECT_EQ(r.passed, blocking == 0);
      EXPECT_EQ(r.counts.errors + r.counts.warnings + r.counts.infos, r.diagnostics.size());
    }
  }
}

// ---- config ----

TEST(Config, ShippedFileEqualsDefault) {
  auto parsed = parse_check_config(read_text(std::string(RSL_DATA_DIR) + "/config/rslcheck.json"));
  ASSERT_TRUE(parsed.ok());
  EXPECT_EQ(*parsed.value, default_check_config());
}

TEST(Config, InvalidDocumentsAreX002) {
  for (const auto* text : {"[]", "{", R"({"modelRequiredKinds":["Banana"]})", R"({"surprise":1})",
                           R"({"strictness":"Lenient"})", R"({"vagueTerms":[1]})", R"({"viewpoints":[]})"}) {
    auto r = parse_check_config(text, "cfg.json");
    EXPECT_FALSE(r.value) << text;
    ASSERT_EQ(r.diagnostics.size(), 1u) << text;
    EXPECT_EQ(r.diagnostics[0].code, Code::X002_InvalidCheckConfig) << text;
  }
}

TEST(Report, JsonShape) {
  auto m = fixture("orders.rsl");
  m.elements[2].as<UseCase>()->primary_actor = "a_Nobody";
  auto json = report_to_json(check_all(m, default_check_config()), "orders.rsl");
  EXPECT_EQ(json.rfind(R"({"file":"orders.rsl","passed":false,"counts":{"error":1,"warning":0,"info":0},)", 0), 0u)
      << json;
  EXPECT_NE(json.find(R"("code":"RSL-C010","severity":"error","span":{"file":"test.rsl","startLine":12,)"),
            std::string::npos)
      << json;
}
