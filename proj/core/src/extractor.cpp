#include "rsl/extractor.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include <json.hpp>

#include "rsl/validator.hpp"

namespace rsl {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 5> kCategoryNames = {"UserStory", "UseCase", "QualityRequirement", "Goal",
                                                            "Unclassified"};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool ends_with_abbreviation(std::string_view text, std::size_t dot) {
  for (std::string_view abbr : {"e.g.", "i.e.", "etc."}) {
    if (dot + 1 < abbr.size()) continue;
    std::size_t start = dot + 1 - abbr.size();
    bool same = true;
    for (std::size_t k = 0; k < abbr.size() && same; ++k) {
      same = std::tolower(static_cast<unsigned char>(text[start + k])) == abbr[k];
    }
    if (same && (start == 0 || !is_alnum(text[start - 1]))) return true;
  }
  return false;
}

std::string strip_final_punctuation(std::string s) {
  while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?' || s.back() == ' ')) s.pop_back();
  return s;
}

std::string trim_copy(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

std::string without_article(std::string_view phrase) {
  for (std::string_view article : {"the ", "a ", "an "}) {
    if (phrase.size() > article.size()) {
      bool same = true;
      for (std::size_t k = 0; k < article.size() && same; ++k) {
        same = std::tolower(static_cast<unsigned char>(phrase[k])) == article[k];
      }
      if (same) return trim_copy(phrase.substr(article.size()));
    }
  }
  return std::string(phrase);
}

const std::regex& story_rule() {
  static const std::regex re(R"(^as an? (.+?), ?i want (.+?),? so that (.+)$)", std::regex::icase);
  return re;
}

const std::regex& shall_rule() {
  static const std::regex re(R"(^(.+?) shall (.+)$)", std::regex::icase);
  return re;
}

const std::regex& goal_rule() {
  static const std::regex re(R"(^(?:the goal is|we aim to|the objective is) (.+)$)", std::regex::icase);
  return re;
}

}  // namespace

std::string_view to_string(SentenceCategory c) noexcept { return kCategoryNames[static_cast<std::size_t>(c)]; }

std::optional<SentenceCategory> sentence_category_from_string(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) return static_cast<SentenceCategory>(i);
  }
  return std::nullopt;
}

std::vector<Sentence> split_sentences(std::string_view text, std::string_view file) {
  std::vector<Sentence> out;
  std::vector<std::size_t> line_starts{0};
  for (std::size_t k = 0; k < text.size(); ++k) {
    if (text[k] == '\n') line_starts.push_back(k + 1);
  }
  auto position = [&](std::size_t offset) {
    auto it = std::upper_bound(line_starts.begin(), line_starts.end(), offset) - 1;
    return std::pair(static_cast<std::uint32_t>(it - line_starts.begin() + 1),
                     static_cast<std::uint32_t>(offset - *it + 1));
  };
  std::size_t seg_start = 0;

  auto emit = [&](std::size_t begin, std::size_t end) {
    while (begin < end && is_space(text[begin])) ++begin;
    while (end > begin && is_space(text[end - 1])) --end;
    if (begin == end) return;
    auto [sl, sc] = position(begin);
    auto [el, ec] = position(end);
    out.push_back(Sentence{std::string(text.substr(begin, end - begin)), SourceSpan{std::string(file), sl, sc, el, ec}});
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n') {
      std::size_t k = i + 1;
      while (k < text.size() && text[k] != '\n' && is_space(text[k])) ++k;
      if (k < text.size() && text[k] == '\n') {
        emit(seg_start, i);
        seg_start = i + 1;
      }
      continue;
    }
    if (c != '.' && c != '!' && c != '?') continue;
    bool boundary = i + 1 == text.size() || is_space(text[i + 1]);
    if (!boundary) continue;
    if (c == '.' && ends_with_abbreviation(text, i)) continue;
    emit(seg_start, i + 1);
    seg_start = i + 1;
  }
  emit(seg_start, text.size());
  return out;
}

ExtractionRules default_extraction_rules() {
  return ExtractionRules{{"secure", "usable", "reliable", "available", "maintainable", "respond", "performance",
                          "encrypted"}};
}

std::string normalize_sentence(std::string_view sentence) {
  std::string out;
  bool pending_space = false;
  for (char c : sentence) {
    auto u = static_cast<unsigned char>(c);
    if (is_space(c) || u < 0x20 || u == 0x7f) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

Classification classify_sentence(std::string_view sentence, const ExtractionRules& rules) {
  const std::string s = strip_final_punctuation(normalize_sentence(sentence));
  std::smatch m;
  if (std::regex_match(s, m, story_rule())) {
    return {SentenceCategory::UserStory,
            {{"as_a", trim_copy(m.str(1))}, {"i_want", trim_copy(m.str(2))}, {"so_that", trim_copy(m.str(3))}}};
  }
  if (std::regex_match(s, m, shall_rule())) {
    std::string subject = trim_copy(m.str(1));
    std::string predicate = trim_copy(m.str(2));
    std::optional<std::pair<std::size_t, std::string>> best;
    for (const auto& kw : rules.quality_keywords) {
      std::string needle = kw;
      std::transform(needle.begin(), needle.end(), needle.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      auto hits = find_whole_word(predicate, needle);
      if (!hits.empty() && (!best || hits.front() < best->first)) best.emplace(hits.front(), needle);
    }
    if (best) {
      return {SentenceCategory::QualityRequirement,
              {{"subject", subject}, {"predicate", predicate}, {"keyword", best->second}}};
    }
    return {SentenceCategory::UseCase, {{"subject", subject}, {"action", predicate}}};
  }
  if (std::regex_match(s, m, goal_rule())) {
    return {SentenceCategory::Goal, {{"statement", trim_copy(m.str(1))}}};
  }
  return {};
}

QRKind qr_kind_for_keyword(std::string_view keyword) {
  if (keyword == "respond" || keyword == "performance") return QRKind::Performance;
  if (keyword == "secure" || keyword == "encrypted") return QRKind::Security;
  if (keyword == "usable") return QRKind::Usability;
  if (keyword == "reliable" || keyword == "available") return QRKind::Reliability;
  if (keyword == "maintainable") return QRKind::Maintainability;
  return QRKind::Other;
}

std::string actor_id_for(std::string_view phrase) { return "a_" + slug(phrase); }

ExtractionReport extract_model(std::string_view text, QualifiedName package_name, std::string_view file,
                               const ExtractionRules& rules) {
  ExtractionReport report{{}, {}, SpecificationModel(std::move(package_name)), {}};
  for (auto c : kAllSentenceCategories) report.counts[c] = 0;
  if (!file.empty()) report.model.source = std::string(file);

  auto sentences = split_sentences(text, file);
  std::vector<Classification> classes;
  classes.reserve(sentences.size());
  for (const auto& s : sentences) classes.push_back(classify_sentence(s.text, rules));

  std::map<SentenceCategory, std::size_t> next_id;
  auto fragment = [](const Fragments& f, std::string_view role) -> const std::string& {
    for (const auto& [r, v] : f) {
      if (r == role) return v;
    }
    throw std::logic_error("missing fragment " + std::string(role));
  };
  auto ensure_actor = [&](std::string_view phrase, ActorKind kind, std::size_t index, const SourceSpan& span) {
    std::string id = actor_id_for(phrase);
    if (resolve(report.model, id)) return id;
    Element a;
    a.id = id;
    a.name = std::string(phrase);
    a.body = Actor{kind};
    a.span = span;
    report.model.elements.push_back(std::move(a));
    report.actors.push_back(ExtractedActor{id, std::string(phrase), index});
    return id;
  };

  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto& s = sentences[i];
    const auto& cls = classes[i];
    SentenceRecord rec{i, s.text, s.span, cls.category, std::nullopt, cls.fragments};
    ++report.counts[cls.category];
    if (cls.category != SentenceCategory::Unclassified) {
      static constexpr std::array<std::string_view, 4> prefixes = {"us_", "uc_", "qr_", "g_"};
      Element e;
      e.id = std::string(prefixes[static_cast<std::size_t>(cls.category)]) +
             std::to_string(++next_id[cls.category]);
      e.description = normalize_sentence(s.text);
      e.span = s.span;
      switch (cls.category) {
        case SentenceCategory::UserStory: {
          auto actor = ensure_actor(fragment(cls.fragments, "as_a"), ActorKind::User, i, s.span);
          e.body = UserStory{actor, fragment(cls.fragments, "i_want"), fragment(cls.fragments, "so_that"),
                             Priority::Unset};
          break;
        }
        case SentenceCategory::UseCase: {
          auto actor = ensure_actor(without_article(fragment(cls.fragments, "subject")), ActorKind::Other, i, s.span);
          UseCase uc;
          uc.primary_actor = actor;
          e.name = fragment(cls.fragments, "action");
          e.body = std::move(uc);
          break;
        }
        case SentenceCategory::QualityRequirement:
          e.body = QualityRequirement{qr_kind_for_keyword(fragment(cls.fragments, "keyword")), std::nullopt,
                                      std::nullopt};
          break;
        case SentenceCategory::Goal:
          e.name = fragment(cls.fragments, "statement");
          e.body = Goal{};
          break;
        case SentenceCategory::Unclassified:
          break;
      }
      rec.extracted = e.id;
      report.model.elements.push_back(std::move(e));
    }
    report.sentences.push_back(std::move(rec));
  }
  return report;
}

std::string extraction_report_to_json(const ExtractionReport& report) {
  Json j;
  j["package"] = report.model.package_name.str();
  Json counts;
  std::size_t total = 0;
  for (auto c : kAllSentenceCategories) {
    auto it = report.counts.find(c);
    std::size_t n = it == report.counts.end() ? 0 : it->second;
    counts[std::string(to_string(c))] = n;
    total += n;
  }
  counts["total"] = total;
  j["counts"] = std::move(counts);
  Json sentences = Json::array();
  for (const auto& r : report.sentences) {
    Json fragments = Json::object();
    for (const auto& [role, text] : r.fragments) fragments[role] = text;
    sentences.push_back(Json{{"index", r.index},
                             {"text", r.text},
                             {"span",
                              {{"startLine", r.span.start_line},
                               {"startColumn", r.span.start_col},
                               {"endLine", r.span.end_line},
                               {"endColumn", r.span.end_col}}},
                             {"category", std::string(to_string(r.category))},
                             {"element", r.extracted ? Json(*r.extracted) : Json(nullptr)},
                             {"fragments", std::move(fragments)}});
  }
  j["sentences"] = std::move(sentences);
  Json actors = Json::array();
  for (const auto& a : report.actors) {
    actors.push_back(Json{{"id", a.id}, {"phrase", a.phrase}, {"introducedBy", a.introduced_by}});
  }
  j["actors"] = std::move(actors);
  return j.dump(2) + "\n";
}

}  // namespace rsl
