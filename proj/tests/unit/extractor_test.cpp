#include <gtest/gtest.h>

#include <json.hpp>

#include "generator.hpp"
#include "rsl/extractor.hpp"
#include "rsl/validator.hpp"

using namespace rsl;
using rsl::testing::fixture_path;
using rsl::testing::read_text;

namespace {

std::vector<std::string> texts(const std::vector<Sentence>& sentences) {
  std::vector<std::string> out;
  for (const auto& s : sentences) out.push_back(s.text);
  return out;
}

std::string span_text(const SourceSpan& s) {
  return std::to_string(s.start_line) + ":" + std::to_string(s.start_col) + "-" + std::to_string(s.end_line) + ":" +
         std::to_string(s.end_col);
}

// Byte offset of a 1-based line:col.
std::size_t offset_of(std::string_view text, std::uint32_t line, std::uint32_t col) {
  std::size_t pos = 0;
  for (std::uint32_t l = 1; l < line; ++l) pos = text.find('\n', pos) + 1;
  return pos + col - 1;
}

Fragments fragments_of(const nlohmann::json& j) {
  // Labels list roles in rule order; nlohmann::json sorts keys, so reorder.
  static const std::vector<std::string> order = {"as_a", "i_want", "so_that", "subject", "predicate",
                                                 "keyword", "action", "statement"};
  Fragments out;
  for (const auto& role : order) {
    if (j.contains(role)) out.emplace_back(role, j[role].get<std::string>());
  }
  EXPECT_EQ(out.size(), j.size());
  return out;
}

std::string slug_oracle(std::string_view phrase) {
  static const std::string lower = "abcdefghijklmnopqrstuvwxyz0123456789";
  static const std::string upper = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::string out = "a_";
  for (char c : phrase) {
    auto at = lower.find(c);
    if (at == std::string::npos) at = upper.find(c);
    out += at == std::string::npos ? '_' : lower[at];
  }
  return out;
}

// Free text assembled from rule-shaped and arbitrary sentences.
std::string random_document(rsl::testing::ModelGenerator& gen) {
  auto& rng = gen.rng();
  auto phrase = [&] { return gen.text(16); };
  std::string doc;
  std::size_t n = rng() % 12;
  for (std::size_t i = 0; i < n; ++i) {
    switch (rng() % 7) {
      case 0: doc += "As a " + phrase() + ", I want " + phrase() + " so that " + phrase() + "."; break;
      case 1: doc += "The " + phrase() + " shall respond " + phrase() + "."; break;
      case 2: doc += phrase() + " shall " + phrase() + "!"; break;
      case 3: doc += "We aim to " + phrase() + "."; break;
      case 4: doc += phrase() + "?"; break;
      case 5: doc += "\n\n" + phrase(); break;
      default: doc += "as an " + phrase() + ",I want " + phrase() + ", so that " + phrase(); break;
    }
    doc += rng() % 4 == 0 ? "\n" : " ";
  }
  return doc;
}

}  // namespace

// ---- split ----

TEST(Split, TwoShortSentences) { EXPECT_EQ(texts(split_sentences("A. B.")), (std::vector<std::string>{"A.", "B."})); }

TEST(Split, AbbreviationsDoNotEndSentences) {
  EXPECT_EQ(texts(split_sentences("Use e.g. caching. Done.")),
            (std::vector<std::string>{"Use e.g. caching.", "Done."}));
  EXPECT_EQ(texts(split_sentences("Tools, etc. are fine. I.e. all of them.")),
            (std::vector<std::string>{"Tools, etc. are fine.", "I.e. all of them."}));
  // Only whole abbreviations count.
  EXPECT_EQ(texts(split_sentences("See the fleetc. Next.")), (std::vector<std::string>{"See the fleetc.", "Next."}));
}

TEST(Split, BlankLinesAndWhitespace) {
  EXPECT_TRUE(split_sentences("").empty());
  EXPECT_TRUE(split_sentences(" \n\t\n  ").empty());
  EXPECT_EQ(texts(split_sentences("first part\n  \nsecond part")),
            (std::vector<std::string>{"first part", "second part"}));
  EXPECT_EQ(texts(split_sentences("one\nline")), (std::vector<std::string>{"one\nline"}));
}

TEST(Split, SpansCarryFile) {
  auto s = split_sentences("x.\n  y!", "notes.txt");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].span, (SourceSpan{"notes.txt", 2, 3, 2, 5}));
}

TEST(Split, HandMarkedFixture) {
  const std::string text = read_text(fixture_path("segmentation.txt"));
  std::vector<std::string> expected;
  std::istringstream in(read_text(fixture_path("segmentation.expected")));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') expected.push_back(line);
  }
  ASSERT_EQ(expected.size(), 47u);
  std::vector<std::string> got;
  for (const auto& s : split_sentences(text, "segmentation.txt")) {
    std::string shown = s.text;
    for (std::size_t at; (at = shown.find('\n')) != std::string::npos;) shown.replace(at, 1, "\\n");
    got.push_back(span_text(s.span) + " " + shown);
  }
  EXPECT_EQ(got, expected);
}

TEST(Split, SpansSliceTheSourceAndGapsAreWhitespace) {
  rsl::testing::ModelGenerator gen(rsl::testing::kSeed);
  for (int i = 0; i < 1000; ++i) {
    const std::string doc = random_document(gen);
    std::size_t previous_end = 0;
    for (const auto& s : split_sentences(doc)) {
      ASSERT_FALSE(s.text.empty());
      std::size_t begin = offset_of(doc, s.span.start_line, s.span.start_col);
      std::size_t end = offset_of(doc, s.span.end_line, s.span.end_col);
      ASSERT_LE(previous_end, begin);
      ASSERT_EQ(doc.substr(begin, end - begin), s.text);
      for (std::size_t k = previous_end; k < begin; ++k) {
        ASSERT_TRUE(std::isspace(static_cast<unsigned char>(doc[k]))) << "dropped text at " << k << " in: " << doc;
      }
      previous_end = end;
    }
    for (std::size_t k = previous_end; k < doc.size(); ++k) {
      ASSERT_TRUE(std::isspace(static_cast<unsigned char>(doc[k]))) << doc;
    }
  }
}

// ---- classify ----

TEST(Classify, UserStory) {
  auto c = classify_sentence("As a customer, I want to track orders so that I plan deliveries.");
  EXPECT_EQ(c.category, SentenceCategory::UserStory);
  EXPECT_EQ(c.fragments,
            (Fragments{{"as_a", "customer"}, {"i_want", "to track orders"}, {"so_that", "I plan deliveries"}}));
}

TEST(Classify, QualityRequirement) {
  auto c = classify_sentence("The system shall respond within 2 seconds.");
  EXPECT_EQ(c.category, SentenceCategory::QualityRequirement);
  EXPECT_EQ(c.fragments,
            (Fragments{{"subject", "The system"}, {"predicate", "respond within 2 seconds"}, {"keyword", "respond"}}));
}

TEST(Classify, EarliestKeywordWins) {
  auto c = classify_sentence("It shall stay usable and secure.");
  ASSERT_EQ(c.category, SentenceCategory::QualityRequirement);
  EXPECT_EQ(c.fragments.back(), (std::pair<std::string, std::string>{"keyword", "usable"}));
}

TEST(Classify, UseCaseAndGoal) {
  EXPECT_EQ(classify_sentence("The clerk shall file the form.").fragments,
            (Fragments{{"subject", "The clerk"}, {"action", "file the form"}}));
  auto g = classify_sentence("The objective is zero paper.");
  EXPECT_EQ(g.category, SentenceCategory::Goal);
  EXPECT_EQ(g.fragments, (Fragments{{"statement", "zero paper"}}));
}

TEST(Classify, StoryBeatsShall) {
  EXPECT_EQ(classify_sentence("As a clerk, I want the app that shall be secure so that I relax.").category,
            SentenceCategory::UserStory);
}

TEST(Classify, Unclassified) {
  auto c = classify_sentence("Yesterday it rained.");
  EXPECT_EQ(c.category, SentenceCategory::Unclassified);
  EXPECT_TRUE(c.fragments.empty());
  EXPECT_EQ(classify_sentence("").category, SentenceCategory::Unclassified);
}

TEST(Classify, CustomKeywords) {
  ExtractionRules rules{{"green"}};
  EXPECT_EQ(classify_sentence("It shall be green.", rules).category, SentenceCategory::QualityRequirement);
  EXPECT_EQ(classify_sentence("It shall be secure.", rules).category, SentenceCategory::UseCase);
}

TEST(Classify, QrKinds) {
  EXPECT_EQ(qr_kind_for_keyword("performance"), QRKind::Performance);
  EXPECT_EQ(qr_kind_for_keyword("encrypted"), QRKind::Security);
  EXPECT_EQ(qr_kind_for_keyword("usable"), QRKind::Usability);
  EXPECT_EQ(qr_kind_for_keyword("available"), QRKind::Reliability);
  EXPECT_EQ(qr_kind_for_keyword("maintainable"), QRKind::Maintainability);
  EXPECT_EQ(qr_kind_for_keyword("green"), QRKind::Other);
}

TEST(Classify, NormalizesWhitespace) {
  EXPECT_EQ(normalize_sentence("  a\n\tb \r\n c "), "a b c");
  EXPECT_EQ(classify_sentence("As a\nguest,  I want\tto look so that\nI see.").fragments,
            (Fragments{{"as_a", "guest"}, {"i_want", "to look"}, {"so_that", "I see"}}));
}

// ---- extract ----

TEST(Extract, EmptyText) {
  auto r = extract_model("", QualifiedName("p"));
  EXPECT_TRUE(r.sentences.empty());
  EXPECT_TRUE(r.model.elements.empty());
  EXPECT_EQ(r.counts.size(), kAllSentenceCategories.size());
  for (const auto& [_, n] : r.counts) EXPECT_EQ(n, 0u);
}

TEST(Extract, SharedActor) {
  auto r = extract_model("As a customer, I want a cart so that I buy. As a customer, I want a list so that I plan.",
                         QualifiedName("p"));
  ASSERT_EQ(r.model.elements.size(), 3u);
  EXPECT_EQ(r.actors.size(), 1u);
  EXPECT_EQ(r.model.elements[0].id, "a_customer");
  EXPECT_EQ(r.model.elements[1].as<UserStory>()->as_a, "a_customer");
  EXPECT_EQ(r.model.elements[2].as<UserStory>()->as_a, "a_customer");
}

TEST(Extract, CorpusMatchesLabels) {
  const auto labels = nlohmann::json::parse(read_text(fixture_path("corpus.labels.json")));
  auto r = extract_model(read_text(fixture_path("corpus.txt")), QualifiedName("library.notes"), "corpus.txt");
  ASSERT_EQ(r.sentences.size(), 30u);
  ASSERT_EQ(labels["sentences"].size(), 30u);
  for (std::size_t i = 0; i < 30; ++i) {
    const auto& label = labels["sentences"][i];
    const auto& rec = r.sentences[i];
    SCOPED_TRACE("sentence " + std::to_string(i) + ": " + rec.text);
    EXPECT_EQ(rec.index, i);
    EXPECT_EQ(rec.span.start_line, label["line"].get<std::uint32_t>());
    EXPECT_EQ(to_string(rec.category), label["category"].get<std::string>());
    EXPECT_EQ(rec.fragments, fragments_of(label["fragments"]));
    if (label["element"].is_null()) {
      EXPECT_FALSE(rec.extracted);
    } else {
      ASSERT_TRUE(rec.extracted);
      EXPECT_EQ(*rec.extracted, label["element"].get<std::string>());
      if (label.contains("qrKind")) {
        const auto* qr = resolve(r.model, *rec.extracted)->as<QualityRequirement>();
        ASSERT_NE(qr, nullptr);
        EXPECT_EQ(literal(qr->kind), label["qrKind"].get<std::string>());
      }
    }
  }
  ASSERT_EQ(r.actors.size(), labels["actors"].size());
  for (std::size_t i = 0; i < r.actors.size(); ++i) {
    EXPECT_EQ(r.actors[i].id, labels["actors"][i]["id"].get<std::string>());
    EXPECT_EQ(r.actors[i].introduced_by, labels["actors"][i]["introducedBy"].get<std::size_t>());
  }
  EXPECT_EQ(r.counts[SentenceCategory::UserStory], 5u);
  EXPECT_EQ(r.counts[SentenceCategory::QualityRequirement], 7u);
  EXPECT_EQ(r.counts[SentenceCategory::UseCase], 7u);
  EXPECT_EQ(r.counts[SentenceCategory::Goal], 5u);
  EXPECT_EQ(r.counts[SentenceCategory::Unclassified], 6u);
}

TEST(Extract, UseCaseStubsNameTheirInitiator) {
  auto r = extract_model("The clerk shall file the form.", QualifiedName("p"));
  ASSERT_EQ(r.model.elements.size(), 2u);
  const auto* uc = r.model.elements[1].as<UseCase>();
  ASSERT_NE(uc, nullptr);
  EXPECT_EQ(uc->primary_actor, "a_clerk");
  EXPECT_EQ(r.model.elements[1].name, "file the form");
  EXPECT_EQ(r.model.elements[1].description, "The clerk shall file the form.");
}

TEST(Extract, ConservationClosureDeterminism) {
  rsl::testing::ModelGenerator gen(rsl::testing::kSeed);
  std::size_t classified = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string doc = random_document(gen);
    auto r = extract_model(doc, QualifiedName("p.q"));
    auto sentences = split_sentences(doc);
    ASSERT_EQ(r.sentences.size(), sentences.size());
    std::size_t total = 0;
    for (const auto& [_, n] : r.counts) total += n;
    EXPECT_EQ(total, sentences.size());

    // Every non-actor element belongs to exactly one record and back.
    std::map<std::string, std::size_t> owners;
    for (const auto& rec : r.sentences) {
      EXPECT_EQ(rec.category != SentenceCategory::Unclassified, rec.extracted.has_value());
      EXPECT_EQ(rec.category != SentenceCategory::Unclassified, !rec.fragments.empty());
      if (rec.extracted) ++owners[*rec.extracted];
    }
    std::size_t non_actor = 0;
    for (const auto& e : r.model.elements) {
      if (e.kind() == ElementKind::Actor) continue;
      ++non_actor;
      EXPECT_EQ(owners[e.id], 1u) << e.id;
    }
    EXPECT_EQ(non_actor, owners.size());
    classified += owners.size();

    auto diags = check_consistency(r.model);
    EXPECT_FALSE(has_errors(diags)) << doc << "\n" << format_diagnostic(diags.at(0));
    EXPECT_EQ(extraction_report_to_json(r), extraction_report_to_json(extract_model(doc, QualifiedName("p.q"))));
  }
  EXPECT_GT(classified, 1000u);
}

TEST(Extract, ActorIdsAreSlugs) {
  rsl::testing::ModelGenerator gen(rsl::testing::kSeed);
  for (int i = 0; i < 1000; ++i) {
    std::string phrase = gen.text(20);
    EXPECT_EQ(actor_id_for(phrase), slug_oracle(phrase)) << phrase;
  }
  EXPECT_EQ(actor_id_for("Help-desk Agent"), "a_help_desk_agent");
}

TEST(Report, JsonShape) {
  auto r = extract_model("The goal is calm.\nNoise.", QualifiedName("p"), "n.txt");
  auto j = nlohmann::ordered_json::parse(extraction_report_to_json(r));
  std::vector<std::string> keys;
  for (const auto& [k, _] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"package", "counts", "sentences", "actors"}));
  EXPECT_EQ(j["counts"]["total"], 2);
  EXPECT_EQ(j["counts"]["Goal"], 1);
  EXPECT_EQ(j["sentences"][0]["element"], "g_1");
  EXPECT_EQ(j["sentences"][0]["fragments"]["statement"], "calm");
  EXPECT_TRUE(j["sentences"][1]["element"].is_null());
  EXPECT_EQ(j["sentences"][1]["span"]["startLine"], 2);
}
