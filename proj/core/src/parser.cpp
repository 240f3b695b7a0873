#include <charconv>
#include <climits>
#include <sstream>

#include "rsl/parser.hpp"

namespace rsl {

namespace {

/// Thrown after a syntax diagnostic has been recorded; unwinds to the
/// element loop, which resynchronizes.
struct SyntaxError {};

bool is_element_keyword(std::string_view text) noexcept {
  return text == "Actor" || text == "DataEntity" || text == "UseCase" || text == "UserStory" || text == "Goal" ||
         text == "QR" || text == "TestCase" || text == "Term" || text == "Import";
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::EndOfFile: return "end of file";
    case TokenKind::StringLiteral: return "string " + t.text;
    default: return "'" + t.text + "'";
  }
}

class Parser {
 public:
  Parser(std::string_view source, std::string_view file) : file_(file) {
    auto lexed = tokenize(source, file);
    diags_ = std::move(lexed.diagnostics);
    tokens_.reserve(lexed.tokens.size());
    for (auto& t : lexed.tokens) {
      if (t.kind != TokenKind::Comment) tokens_.push_back(std::move(t));
    }
  }

  ParseResult run() {
    std::optional<ModelBuilder> builder;
    try {
      const Token& kw = peek();
      expect_keyword("Package");
      auto name = parse_qname();
      SourceSpan header = SourceSpan::cover(kw.span, last_span_);
      expect_punct("{");
      builder.emplace(std::move(name));
      builder->set_package_span(header);
      if (!file_.empty()) builder->set_source(std::string(file_));
    } catch (const SyntaxError&) {
      return {std::nullopt, std::move(diags_)};
    }

    while (true) {
      const Token& t = peek();
      if (t.kind == TokenKind::EndOfFile) {
        error(t, "expected '}' to close the package, found end of file");
        break;
      }
      if (is_punct(t, "}")) {
        advance();
        if (peek().kind != TokenKind::EndOfFile) error(peek(), "expected end of file after package, found " + describe(peek()));
        break;
      }
      parse_member(*builder);
    }
    return {std::move(*builder).build(), std::move(diags_)};
  }

 private:
  // ---- token helpers ----

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }

  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (t.kind != TokenKind::EndOfFile) ++pos_;
    last_span_ = t.span;
    return t;
  }

  static bool is_punct(const Token& t, std::string_view p) { return t.kind == TokenKind::Punct && t.text == p; }
  static bool is_keyword(const Token& t, std::string_view k) { return t.kind == TokenKind::Keyword && t.text == k; }

  void error(const Token& at, std::string message) {
    diags_.push_back(Diagnostic::make(Code::P010_ExpectedToken, at.span, std::move(message)));
  }

  [[noreturn]] void fail(const Token& at, std::string_view expected) {
    error(at, "expected " + std::string(expected) + ", found " + describe(at));
    throw SyntaxError{};
  }

  void expect_punct(std::string_view p) {
    if (!is_punct(peek(), p)) fail(peek(), "'" + std::string(p) + "'");
    advance();
  }

  void expect_keyword(std::string_view k) {
    if (!is_keyword(peek(), k)) fail(peek(), "'" + std::string(k) + "'");
    advance();
  }

  bool accept_keyword(std::string_view k) {
    if (!is_keyword(peek(), k)) return false;
    advance();
    return true;
  }

  bool accept_punct(std::string_view p) {
    if (!is_punct(peek(), p)) return false;
    advance();
    return true;
  }

  std::string expect_identifier(std::string_view what = "identifier") {
    if (peek().kind != TokenKind::Identifier) fail(peek(), what);
    return advance().text;
  }

  std::string expect_string(std::string_view what = "string") {
    if (peek().kind != TokenKind::StringLiteral) fail(peek(), what);
    return advance().value;
  }

  std::optional<std::string> accept_string() {
    if (peek().kind != TokenKind::StringLiteral) return std::nullopt;
    return advance().value;
  }

  QualifiedName parse_qname() {
    std::vector<std::string> segments{expect_identifier("qualified name")};
    while (is_punct(peek(), ".")) {
      advance();
      segments.push_back(expect_identifier("identifier after '.'"));
    }
    return QualifiedName(std::move(segments));
  }

  /// ident { "." ident }, returned in dotted form.
  std::string parse_reference(std::string_view what) {
    std::string out = expect_identifier(what);
    while (is_punct(peek(), ".")) {
      advance();
      out += '.';
      out += expect_identifier("identifier after '.'");
    }
    return out;
  }

  template <class E>
  E parse_vocabulary(std::string_view attribute) {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier && t.kind != TokenKind::Keyword) fail(t, std::string(attribute) + " literal");
    advance();
    if (auto v = parse_literal<E>(t.text)) return *v;
    diags_.push_back(Diagnostic::make(Code::P012_UnknownVocabularyLiteral, t.span,
                                      "unknown " + std::string(attribute) + " '" + t.text + "'; allowed: " +
                                          allowed_set<E>()));
    element_ok_ = false;
    return E{};
  }

  // ---- recovery ----

  bool at_sync_point() const {
    const Token& t = peek();
    if (t.kind == TokenKind::EndOfFile) return true;
    if (t.kind == TokenKind::Keyword && is_element_keyword(t.text)) {
      // `Actor` also introduces step performers; only `Actor <ident>` starts an element.
      return t.text != "Actor" || peek(1).kind == TokenKind::Identifier;
    }
    return is_punct(t, "}") && peek(1).kind == TokenKind::EndOfFile;
  }

  void synchronize(std::size_t element_start) {
    if (pos_ == element_start) advance();
    while (!at_sync_point()) advance();
  }

  // ---- members ----

  void parse_member(ModelBuilder& builder) {
    std::size_t start = pos_;
    const Token& t = peek();
    element_ok_ = true;
    try {
      if (t.kind == TokenKind::Identifier) {
        diags_.push_back(Diagnostic::make(Code::P011_UnknownElementKeyword, t.span,
                                          "unknown element keyword '" + t.text + "'"));
        throw SyntaxError{};
      }
      if (t.kind != TokenKind::Keyword || !is_element_keyword(t.text)) fail(t, "element keyword");
      if (t.text == "Import") {
        builder.add_import(parse_import());
        return;
      }
      Element e = parse_element();
      if (!element_ok_) return;
      auto problems = structural_problems(e);
      if (!problems.empty()) {
        diags_.insert(diags_.end(), problems.begin(), problems.end());
        return;
      }
      if (auto dup = builder.add(std::move(e))) diags_.push_back(std::move(*dup));
    } catch (const SyntaxError&) {
      synchronize(start);
    }
  }

  ImportDecl parse_import() {
    const Token& kw = advance();
    ImportDecl decl{parse_qname(), std::nullopt, {}};
    if (accept_keyword("as")) decl.alias = expect_identifier("import alias");
    decl.span = SourceSpan::cover(kw.span, last_span_);
    return decl;
  }

  Element parse_element() {
    const Token& kw = advance();
    Element e;
    if (kw.text == "Actor") {
      parse_actor(e);
    } else if (kw.text == "DataEntity") {
      parse_entity(e);
    } else if (kw.text == "UseCase") {
      parse_usecase(e);
    } else if (kw.text == "UserStory") {
      parse_story(e);
    } else if (kw.text == "Goal") {
      parse_goal(e);
    } else if (kw.text == "QR") {
      parse_qr(e);
    } else if (kw.text == "TestCase") {
      parse_test(e);
    } else {
      parse_term(e);
    }
    e.span = SourceSpan::cover(kw.span, last_span_);
    return e;
  }

  void parse_header(Element& e) {
    e.id = expect_identifier("element identifier");
    e.name = accept_string();
  }

  void parse_description(Element& e) {
    if (accept_keyword("description")) e.description = expect_string("description text");
  }

  void parse_actor(Element& e) {
    parse_header(e);
    expect_punct(":");
    Actor a{parse_vocabulary<ActorKind>("actor kind")};
    if (accept_punct("[")) {
      parse_description(e);
      expect_punct("]");
    }
    e.body = a;
  }

  void parse_entity(Element& e) {
    parse_header(e);
    expect_punct(":");
    DataEntity de{parse_vocabulary<EntityKind>("entity kind"), {}};
    expect_punct("[");
    parse_description(e);
    while (is_keyword(peek(), "attribute")) de.attributes.push_back(parse_attribute());
    expect_punct("]");
    e.body = std::move(de);
  }

  DataAttribute parse_attribute() {
    const Token& kw = advance();
    DataAttribute attr;
    attr.name = expect_identifier("attribute name");
    expect_punct(":");
    attr.datatype = parse_vocabulary<Datatype>("datatype");
    if (accept_keyword("constraints")) {
      expect_punct("(");
      do {
        attr.constraints.insert(parse_vocabulary<Constraint>("constraint"));
      } while (!is_punct(peek(), ")") && peek().kind != TokenKind::EndOfFile && !at_sync_point());
      expect_punct(")");
    }
    if (accept_keyword("references")) attr.references = parse_reference("referenced data entity");
    if (attr.constraints.contains(Constraint::PrimaryKey)) attr.constraints.insert(Constraint::NotNull);
    attr.span = SourceSpan::cover(kw.span, last_span_);
    return attr;
  }

  void parse_usecase(Element& e) {
    parse_header(e);
    expect_punct(":");
    UseCase uc;
    uc.kind = parse_vocabulary<UseCaseKind>("use case kind");
    expect_punct("[");
    parse_description(e);
    bool have_actor = false;
    while (true) {
      if (accept_keyword("actorInitiates")) {
        if (have_actor) fail(tokens_[pos_ - 1], "a single 'actorInitiates' per use case");
        uc.primary_actor = parse_reference("actor reference");
        have_actor = true;
      } else if (accept_keyword("dataEntity")) {
        uc.data_entities.push_back(parse_reference("data entity reference"));
        while (accept_punct(",")) uc.data_entities.push_back(parse_reference("data entity reference"));
      } else if (is_keyword(peek(), "scenario")) {
        uc.scenarios.push_back(parse_scenario());
      } else {
        break;
      }
    }
    if (!have_actor) fail(peek(), "'actorInitiates' (use case '" + e.id + "' has no primary actor)");
    expect_punct("]");
    e.body = std::move(uc);
  }

  Scenario parse_scenario() {
    const Token& kw = advance();
    Scenario sc;
    sc.id = expect_identifier("scenario identifier");
    expect_punct(":");
    sc.kind = parse_vocabulary<ScenarioKind>("scenario kind");
    expect_punct("[");
    while (is_keyword(peek(), "step")) {
      const Token& step_kw = advance();
      Step st;
      const Token& num = peek();
      if (num.kind != TokenKind::IntLiteral) fail(num, "step number");
      advance();
      long long value = 0;
      auto [ptr, ec] = std::from_chars(num.text.data(), num.text.data() + num.text.size(), value);
      if (ec != std::errc{} || value > INT_MAX) {
        error(num, "step number out of range");
        throw SyntaxError{};
      }
      st.order = static_cast<int>(value);
      expect_punct(":");
      if (accept_keyword("Actor")) {
        st.performer = Performer::Actor;
      } else if (accept_keyword("System")) {
        st.performer = Performer::System;
      } else {
        fail(peek(), "'Actor' or 'System'");
      }
      st.action = expect_string("step action");
      st.span = SourceSpan::cover(step_kw.span, last_span_);
      sc.steps.push_back(std::move(st));
    }
    expect_punct("]");
    sc.span = SourceSpan::cover(kw.span, last_span_);
    return sc;
  }

  void parse_story(Element& e) {
    parse_header(e);
    expect_punct("[");
    parse_description(e);
    UserStory us;
    expect_keyword("asA");
    us.as_a = parse_reference("actor reference");
    expect_keyword("iWant");
    us.i_want = expect_string("iWant text");
    if (accept_keyword("soThat")) us.so_that = expect_string("soThat text");
    if (accept_keyword("priority")) us.priority = parse_vocabulary<Priority>("priority");
    expect_punct("]");
    e.body = std::move(us);
  }

  void parse_goal(Element& e) {
    parse_header(e);
    Goal g;
    if (accept_punct("[")) {
      parse_description(e);
      if (accept_keyword("partOf")) g.parent = parse_reference("goal reference");
      if (accept_keyword("priority")) g.priority = parse_vocabulary<Priority>("priority");
      expect_punct("]");
    }
    e.body = std::move(g);
  }

  void parse_qr(Element& e) {
    parse_header(e);
    expect_punct(":");
    QualityRequirement qr;
    qr.kind = parse_vocabulary<QRKind>("quality requirement kind");
    if (accept_punct("[")) {
      parse_description(e);
      if (accept_keyword("metric")) qr.metric = expect_string("metric text");
      if (accept_keyword("value")) qr.target_value = expect_string("target value text");
      expect_punct("]");
    }
    e.body = std::move(qr);
  }

  void parse_test(Element& e) {
    parse_header(e);
    expect_punct("[");
    parse_description(e);
    TestCase tc;
    expect_keyword("traces");
    tc.traces_to = parse_reference("traced use case or user story");
    if (accept_keyword("scenario")) tc.scenario = expect_identifier("scenario identifier");
    while (true) {
      if (accept_keyword("given")) {
        tc.given.push_back(expect_string("given text"));
      } else if (accept_keyword("when")) {
        tc.when.push_back(expect_string("when text"));
      } else if (accept_keyword("then")) {
        tc.then.push_back(expect_string("then text"));
      } else {
        break;
      }
    }
    expect_punct("]");
    e.body = std::move(tc);
  }

  void parse_term(Element& e) {
    GlossaryTerm gt;
    gt.term = expect_string("glossary term text");
    expect_punct(":");
    gt.part_of_speech = parse_vocabulary<PartOfSpeech>("part of speech");
    if (accept_punct("[")) {
      if (accept_keyword("definition")) gt.definition = expect_string("definition text");
      while (accept_keyword("synonym")) gt.synonyms.push_back(expect_string("synonym text"));
      if (accept_keyword("notPreferred")) gt.preferred = false;
      expect_punct("]");
    }
    e.id = glossary_term_id(gt.term);
    e.body = std::move(gt);
  }

  std::string_view file_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  SourceSpan last_span_;
  Diagnostics diags_;
  bool element_ok_ = true;
};

// ---- formatting ----

class Formatter {
 public:
  std::string run(const SpecificationModel& m) {
    out_ << "Package " << m.package_name.str() << " {\n";
    for (const auto& imp : m.imports) {
      line(1) << "Import " << imp.target.str();
      if (imp.alias) out_ << " as " << *imp.alias;
      out_ << '\n';
    }
    for (const auto& e : m.elements) element(e);
    out_ << "}\n";
    return out_.str();
  }

 private:
  std::ostringstream& line(int depth) {
    for (int i = 0; i < depth; ++i) out_ << "    ";
    return out_;
  }

  void header(std::string_view keyword, const Element& e) {
    line(1) << keyword << ' ' << e.id;
    if (e.name) out_ << ' ' << quote(*e.name);
  }

  void description(const Element& e) {
    if (e.description) line(2) << "description " << quote(*e.description) << '\n';
  }

  void element(const Element& e) {
    std::visit([&](const auto& body) { emit(e, body); }, e.body);
  }

  void emit(const Element& e, const Actor& a) {
    header("Actor", e);
    out_ << " : " << literal(a.kind);
    if (e.description) {
      out_ << " [\n";
      description(e);
      line(1) << "]";
    }
    out_ << '\n';
  }

  void emit(const Element& e, const DataEntity& de) {
    header("DataEntity", e);
    out_ << " : " << literal(de.kind) << " [\n";
    description(e);
    for (const auto& attr : de.attributes) {
      line(2) << "attribute " << attr.name << " : " << literal(attr.datatype);
      if (!attr.constraints.empty()) {
        out_ << " constraints (";
        bool first = true;
        for (auto c : attr.constraints.members()) {
          if (!first) out_ << ' ';
          out_ << literal(c);
          first = false;
        }
        out_ << ')';
      }
      if (attr.references) out_ << " references " << *attr.references;
      out_ << '\n';
    }
    line(1) << "]\n";
  }

  void emit(const Element& e, const UseCase& uc) {
    header("UseCase", e);
    out_ << " : " << literal(uc.kind) << " [\n";
    description(e);
    line(2) << "actorInitiates " << uc.primary_actor << '\n';
    if (!uc.data_entities.empty()) {
      line(2) << "dataEntity ";
      for (std::size_t i = 0; i < uc.data_entities.size(); ++i) {
        if (i) out_ << ", ";
        out_ << uc.data_entities[i];
      }
      out_ << '\n';
    }
    for (const auto& sc : uc.scenarios) {
      line(2) << "scenario " << sc.id << " : " << literal(sc.kind) << " [\n";
      for (const auto& st : sc.steps) {
        line(3) << "step " << st.order << " : " << literal(st.performer) << ' ' << quote(st.action) << '\n';
      }
      line(2) << "]\n";
    }
    line(1) << "]\n";
  }

  void emit(const Element& e, const UserStory& us) {
    header("UserStory", e);
    out_ << " [\n";
    description(e);
    line(2) << "asA " << us.as_a << '\n';
    line(2) << "iWant " << quote(us.i_want) << '\n';
    if (us.so_that) line(2) << "soThat " << quote(*us.so_that) << '\n';
    if (us.priority != Priority::Unset) line(2) << "priority " << literal(us.priority) << '\n';
    line(1) << "]\n";
  }

  void emit(const Element& e, const Goal& g) {
    header("Goal", e);
    if (e.description || g.parent || g.priority != Priority::Unset) {
      out_ << " [\n";
      description(e);
      if (g.parent) line(2) << "partOf " << *g.parent << '\n';
      if (g.priority != Priority::Unset) line(2) << "priority " << literal(g.priority) << '\n';
      line(1) << "]";
    }
    out_ << '\n';
  }

  void emit(const Element& e, const QualityRequirement& qr) {
    header("QR", e);
    out_ << " : " << literal(qr.kind);
    if (e.description || qr.metric || qr.target_value) {
      out_ << " [\n";
      description(e);
      if (qr.metric) line(2) << "metric " << quote(*qr.metric) << '\n';
      if (qr.target_value) line(2) << "value " << quote(*qr.target_value) << '\n';
      line(1) << "]";
    }
    out_ << '\n';
  }

  void emit(const Element& e, const TestCase& tc) {
    header("TestCase", e);
    out_ << " [\n";
    description(e);
    line(2) << "traces " << tc.traces_to << '\n';
    if (tc.scenario) line(2) << "scenario " << *tc.scenario << '\n';
    for (const auto& t : tc.given) line(2) << "given " << quote(t) << '\n';
    for (const auto& t : tc.when) line(2) << "when " << quote(t) << '\n';
    for (const auto& t : tc.then) line(2) << "then " << quote(t) << '\n';
    line(1) << "]\n";
  }

  void emit(const Element&, const GlossaryTerm& gt) {
    line(1) << "Term " << quote(gt.term) << " : " << literal(gt.part_of_speech);
    if (gt.definition || !gt.synonyms.empty() || !gt.preferred) {
      out_ << " [\n";
      if (gt.definition) line(2) << "definition " << quote(*gt.definition) << '\n';
      for (const auto& s : gt.synonyms) line(2) << "synonym " << quote(s) << '\n';
      if (!gt.preferred) line(2) << "notPreferred\n";
      line(1) << "]";
    }
    out_ << '\n';
  }

  std::ostringstream out_;
};

}  // namespace

ParseResult parse(std::string_view source, std::string_view file) { return Parser(source, file).run(); }

std::string quote(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  out += '"';
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string format(const SpecificationModel& model) { return Formatter{}.run(model); }

}  // namespace rsl
