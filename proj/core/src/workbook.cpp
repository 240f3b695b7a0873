#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <system_error>

#include "rsl/transform.hpp"

namespace rsl {

// ---- CSV ----

std::size_t CsvTable::column(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::string::npos;
}

std::string write_csv(const std::vector<std::vector<std::string>>& records) {
  std::string out;
  for (const auto& record : records) {
    for (std::size_t i = 0; i < record.size(); ++i) {
      if (i) out += ',';
      const std::string& f = record[i];
      if (f.find_first_of(",\"\r\n") == std::string::npos) {
        out += f;
        continue;
      }
      out += '"';
      for (char c : f) {
        if (c == '"') out += '"';
        out += c;
      }
      out += '"';
    }
    out += "\r\n";
  }
  return out;
}

Outcome<CsvTable> read_csv(std::string_view text, std::string_view file) {
  auto at = [&](std::uint32_t line) { return SourceSpan{std::string(file), line, 1, line, 1}; };

  std::vector<std::vector<std::string>> records;
  std::vector<std::uint32_t> lines;
  std::vector<std::string> record;
  std::string field;
  bool quoted_field = false;  // current field was quoted; keeps "" from being a blank line
  std::uint32_t line = 1;
  std::uint32_t record_line = 1;
  std::size_t i = 0;

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    bool blank = record.size() == 1 && record[0].empty() && !quoted_field;
    if (!blank) {
      records.push_back(std::move(record));
      lines.push_back(record_line);
    }
    record.clear();
    quoted_field = false;
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == '"' && field.empty() && !quoted_field) {
      quoted_field = true;
      std::uint32_t open_line = line;
      ++i;
      for (;;) {
        if (i >= text.size()) {
          return {std::nullopt,
                  {Diagnostic::make(Code::T023_BadValue, at(open_line), "unterminated quoted field")}};
        }
        char q = text[i++];
        if (q == '"') {
          if (i < text.size() && text[i] == '"') {
            field += '"';
            ++i;
          } else {
            break;
          }
        } else {
          if (q == '\n') ++line;
          field += q;
        }
      }
      if (i < text.size() && text[i] != ',' && text[i] != '\r' && text[i] != '\n') {
        return {std::nullopt,
                {Diagnostic::make(Code::T023_BadValue, at(line), "unexpected character after a quoted field")}};
      }
      continue;
    }
    if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      quoted_field = false;
      ++i;
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_record();
      i += 2;
      record_line = ++line;
    } else if (c == '\n') {
      end_record();
      ++i;
      record_line = ++line;
    } else {
      if (quoted_field) {
        return {std::nullopt,
                {Diagnostic::make(Code::T023_BadValue, at(line), "unexpected character after a quoted field")}};
      }
      field += c;
      ++i;
    }
  }
  if (!field.empty() || !record.empty() || quoted_field) end_record();

  if (records.empty()) {
    return {std::nullopt, {Diagnostic::make(Code::T022_MissingColumn, at(1), "missing header row")}};
  }
  CsvTable table;
  table.header = std::move(records.front());
  Diagnostics diags;
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      diags.push_back(Diagnostic::make(Code::T023_BadValue, at(lines[r]),
                                       "row has " + std::to_string(records[r].size()) + " fields; header has " +
                                           std::to_string(table.header.size())));
      continue;
    }
    table.rows.push_back(std::move(records[r]));
    table.row_lines.push_back(lines[r]);
  }
  if (!diags.empty()) return {std::nullopt, std::move(diags)};
  return {std::move(table), {}};
}

// ---- workbook export ----

namespace {

struct TableSpec {
  std::string_view file;
  std::vector<std::string_view> columns;
};

const std::vector<TableSpec>& table_specs() {
  static const std::vector<TableSpec> specs = {
      {"package.csv", {"entry", "name", "alias"}},
      {"actors.csv", {"seq", "id", "name", "description", "kind"}},
      {"data_entities.csv", {"seq", "id", "name", "description", "kind"}},
      {"attributes.csv", {"entity_id", "name", "datatype", "constraints", "references"}},
      {"use_cases.csv", {"seq", "id", "name", "description", "kind", "primary_actor", "data_entities"}},
      {"scenarios.csv", {"use_case_id", "id", "kind"}},
      {"steps.csv", {"scenario_id", "use_case_id", "order", "performer", "action"}},
      {"user_stories.csv", {"seq", "id", "name", "description", "as_a", "i_want", "so_that", "priority"}},
      {"goals.csv", {"seq", "id", "name", "description", "part_of", "priority"}},
      {"quality_requirements.csv", {"seq", "id", "name", "description", "kind", "metric", "target_value"}},
      {"test_cases.csv", {"seq", "id", "name", "description", "traces", "scenario", "given", "when", "then"}},
      {"glossary.csv", {"seq", "term", "part_of_speech", "definition", "synonyms", "preferred"}},
  };
  return specs;
}

const TableSpec& spec_of(std::string_view file) {
  for (const auto& s : table_specs()) {
    if (s.file == file) return s;
  }
  throw std::logic_error("no workbook table " + std::string(file));
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::vector<std::string> split(std::string_view cell, char sep) {
  std::vector<std::string> out;
  if (cell.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    auto pos = cell.find(sep, start);
    std::string item(cell.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (sep == '\n' && !item.empty() && item.back() == '\r') item.pop_back();
    if (sep != ' ' || !item.empty()) out.push_back(std::move(item));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string cell(const std::optional<std::string>& v) { return v.value_or(""); }

std::string priority_cell(Priority p) { return p == Priority::Unset ? "" : std::string(literal(p)); }

}  // namespace

std::map<std::string, std::string> workbook_tables(const SpecificationModel& model) {
  std::map<std::string, std::vector<std::vector<std::string>>> rows;
  for (const auto& s : table_specs()) {
    rows[std::string(s.file)].push_back(std::vector<std::string>(s.columns.begin(), s.columns.end()));
  }
  auto& package = rows["package.csv"];
  package.push_back({"package", model.package_name.str(), ""});
  for (const auto& imp : model.imports) package.push_back({"import", imp.target.str(), cell(imp.alias)});

  std::size_t seq = 0;
  for (const auto& e : model.elements) {
    std::string s = std::to_string(++seq);
    std::visit(
        [&](const auto& b) {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, Actor>) {
            rows["actors.csv"].push_back({s, e.id, cell(e.name), cell(e.description), std::string(literal(b.kind))});
          } else if constexpr (std::is_same_v<T, DataEntity>) {
            rows["data_entities.csv"].push_back(
                {s, e.id, cell(e.name), cell(e.description), std::string(literal(b.kind))});
            for (const auto& a : b.attributes) {
              std::vector<std::string> cs;
              for (auto c : a.constraints.members()) cs.emplace_back(literal(c));
              rows["attributes.csv"].push_back(
                  {e.id, a.name, std::string(literal(a.datatype)), join(cs, ' '), cell(a.references)});
            }
          } else if constexpr (std::is_same_v<T, UseCase>) {
            rows["use_cases.csv"].push_back({s, e.id, cell(e.name), cell(e.description), std::string(literal(b.kind)),
                                             b.primary_actor, join(b.data_entities, ' ')});
            for (const auto& sc : b.scenarios) {
              rows["scenarios.csv"].push_back({e.id, sc.id, std::string(literal(sc.kind))});
              for (const auto& st : sc.steps) {
                rows["steps.csv"].push_back(
                    {sc.id, e.id, std::to_string(st.order), std::string(literal(st.performer)), st.action});
              }
            }
          } else if constexpr (std::is_same_v<T, UserStory>) {
            rows["user_stories.csv"].push_back({s, e.id, cell(e.name), cell(e.description), b.as_a, b.i_want,
                                                cell(b.so_that), priority_cell(b.priority)});
          } else if constexpr (std::is_same_v<T, Goal>) {
            rows["goals.csv"].push_back(
                {s, e.id, cell(e.name), cell(e.description), cell(b.parent), priority_cell(b.priority)});
          } else if constexpr (std::is_same_v<T, QualityRequirement>) {
            rows["quality_requirements.csv"].push_back({s, e.id, cell(e.name), cell(e.description),
                                                        std::string(literal(b.kind)), cell(b.metric),
                                                        cell(b.target_value)});
          } else if constexpr (std::is_same_v<T, TestCase>) {
            rows["test_cases.csv"].push_back({s, e.id, cell(e.name), cell(e.description), b.traces_to,
                                              cell(b.scenario), join(b.given, '\n'), join(b.when, '\n'),
                                              join(b.then, '\n')});
          } else if constexpr (std::is_same_v<T, GlossaryTerm>) {
            rows["glossary.csv"].push_back({s, b.term, std::string(literal(b.part_of_speech)), cell(b.definition),
                                            join(b.synonyms, '\n'), b.preferred ? "true" : "false"});
          }
        },
        e.body);
  }

  std::map<std::string, std::string> out;
  for (auto& [file, records] : rows) out[file] = write_csv(records);
  return out;
}

Diagnostics export_workbook(const SpecificationModel& model, const std::filesystem::path& dir) {
  auto io_error = [&](const std::filesystem::path& p, const std::string& what) {
    return Diagnostics{
        Diagnostic::make(Code::T020_IoFailure, SourceSpan{p.string(), 1, 1, 1, 1}, "cannot write: " + what)};
  };
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return io_error(dir, ec.message());
  for (const auto& [file, content] : workbook_tables(model)) {
    auto path = dir / file;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) return io_error(path, "write failed");
  }
  return {};
}

// ---- workbook import ----

namespace {

class WorkbookReader {
 public:
  WorkbookReader(const std::map<std::string, std::string>& files, std::string label)
      : files_(files), label_(std::move(label)) {}

  Outcome<SpecificationModel> run() {
    for (const auto& [name, content] : files_) {
      if (std::find(kWorkbookFiles.begin(), kWorkbookFiles.end(), name) == kWorkbookFiles.end()) {
        diags_.push_back(Diagnostic::make(Code::T024_UnknownWorkbookFile, at(name, 1),
                                          "unknown workbook file '" + name + "' ignored"));
      }
    }
    for (auto file : kWorkbookFiles) load(file);
    if (has_errors(diags_)) return fail();

    if (!tables_.contains("package.csv")) {
      diags_.push_back(Diagnostic::make(Code::T022_MissingColumn, at("package.csv", 1),
                                        "missing package.csv; a workbook must name its package"));
      return fail();
    }
    auto builder = read_package();
    if (!builder) return fail();

    read_elements();
    if (has_errors(diags_)) return fail();

    std::stable_sort(pending_.begin(), pending_.end(),
                     [](const Pending& a, const Pending& b) { return a.seq < b.seq; });
    for (auto& p : pending_) {
      if (auto dup = builder->add(std::move(p.element))) {
        dup->span = p.span;
        dup->related.clear();
        diags_.push_back(std::move(*dup));
      }
    }
    if (has_errors(diags_)) return fail();
    // Step orders come out renumbered 1..n.
    return {canonicalize(std::move(*builder).build()), std::move(diags_)};
  }

 private:
  struct Row {
    const CsvTable* table;
    std::size_t index;
    std::string file;

    const std::string& operator[](std::string_view column) const {
      return table->rows[index][table->column(column)];
    }
    std::uint32_t line() const { return table->row_lines[index]; }
  };

  struct Pending {
    std::size_t seq;
    Element element;
    SourceSpan span;
  };

  SourceSpan at(std::string_view file, std::uint32_t line) const {
    std::string path = label_.empty() ? std::string(file) : label_ + "/" + std::string(file);
    return SourceSpan{std::move(path), line, 1, line, 1};
  }
  SourceSpan at(const Row& r) const { return at(r.file, r.line()); }

  Outcome<SpecificationModel> fail() { return {std::nullopt, std::move(diags_)}; }

  void load(std::string_view file) {
    auto it = files_.find(std::string(file));
    if (it == files_.end()) return;
    auto parsed = read_csv(it->second, at(file, 1).file);
    diags_.insert(diags_.end(), parsed.diagnostics.begin(), parsed.diagnostics.end());
    if (!parsed.value) return;
    const auto& spec = spec_of(file);
    bool complete = true;
    for (auto column : spec.columns) {
      if (column == "seq") continue;
      if (parsed.value->column(column) == std::string::npos) {
        diags_.push_back(Diagnostic::make(Code::T022_MissingColumn, at(file, 1),
                                          std::string(file) + " lacks required column '" + std::string(column) + "'"));
        complete = false;
      }
    }
    if (complete) tables_.emplace(std::string(file), std::move(*parsed.value));
  }

  std::vector<Row> rows(std::string_view file) const {
    std::vector<Row> out;
    auto it = tables_.find(std::string(file));
    if (it == tables_.end()) return out;
    for (std::size_t i = 0; i < it->second.rows.size(); ++i) out.push_back(Row{&it->second, i, std::string(file)});
    return out;
  }

  void bad_value(const Row& r, std::string message) {
    diags_.push_back(Diagnostic::make(Code::T023_BadValue, at(r), std::move(message)));
  }

  template <class E>
  E vocab(const Row& r, std::string_view column, std::optional<E> when_empty = std::nullopt) {
    const std::string& text = r[column];
    if (text.empty() && when_empty) return *when_empty;
    auto parsed = parse_literal<E>(text);
    if (!parsed) {
      bad_value(r, "'" + text + "' in column " + std::string(column) + " is not a " +
                       std::string(VocabularyTraits<E>::name) + " literal; allowed " + allowed_set<E>());
      return E{};
    }
    return *parsed;
  }

  std::optional<long long> integer(const Row& r, std::string_view column) {
    const std::string& text = r[column];
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || value < 1) {
      bad_value(r, "'" + text + "' in column " + std::string(column) + " is not a positive integer");
      return std::nullopt;
    }
    return value;
  }

  static std::optional<std::string> optional(const std::string& text) {
    if (text.empty()) return std::nullopt;
    return text;
  }

  std::optional<ModelBuilder> read_package() {
    std::optional<ModelBuilder> builder;
    std::vector<ImportDecl> imports;
    for (const auto& r : rows("package.csv")) {
      const std::string& entry = r["entry"];
      auto name = QualifiedName::parse(r["name"]);
      if (!name) {
        bad_value(r, "'" + r["name"] + "' is not a dotted identifier");
        continue;
      }
      if (entry == "package") {
        if (builder) {
          bad_value(r, "second package row");
          continue;
        }
        builder.emplace(std::move(*name));
      } else if (entry == "import") {
        auto alias = optional(r["alias"]);
        if (alias && !is_identifier(*alias)) {
          bad_value(r, "'" + *alias + "' is not an identifier");
          continue;
        }
        imports.push_back(ImportDecl{std::move(*name), std::move(alias), {}});
      } else {
        bad_value(r, "entry must be 'package' or 'import', not '" + entry + "'");
      }
    }
    if (!builder) {
      if (!has_errors(diags_)) {
        diags_.push_back(Diagnostic::make(Code::T023_BadValue, at("package.csv", 1), "package.csv has no package row"));
      }
      return std::nullopt;
    }
    if (has_errors(diags_)) return std::nullopt;
    for (auto& imp : imports) builder->add_import(std::move(imp));
    if (!label_.empty()) builder->set_source(label_);
    return builder;
  }

  std::size_t seq_of(const Row& r) {
    if (r.table->column("seq") == std::string::npos || r["seq"].empty()) {
      return std::numeric_limits<std::size_t>::max();
    }
    auto v = integer(r, "seq");
    return v ? static_cast<std::size_t>(*v) : std::numeric_limits<std::size_t>::max();
  }

  void push(const Row& r, Element e) {
    std::size_t seq = seq_of(r);
    for (auto& p : structural_problems(e)) {
      p.span = at(r);
      diags_.push_back(std::move(p));
    }
    pending_.push_back(Pending{seq, std::move(e), at(r)});
  }

  Element common(const Row& r) {
    Element e;
    e.id = r["id"];
    e.name = optional(r["name"]);
    e.description = optional(r["description"]);
    return e;
  }

  void read_elements() {
    for (const auto& r : rows("actors.csv")) {
      Element e = common(r);
      e.body = Actor{vocab<ActorKind>(r, "kind")};
      push(r, std::move(e));
    }

    std::map<std::string, std::vector<DataAttribute>> attributes;
    std::set<std::string> entity_ids;
    for (const auto& r : rows("data_entities.csv")) entity_ids.insert(r["id"]);
    for (const auto& r : rows("attributes.csv")) {
      if (!entity_ids.contains(r["entity_id"])) {
        orphan(r, "entity_id '" + r["entity_id"] + "' names no row of data_entities.csv");
        continue;
      }
      DataAttribute a;
      a.name = r["name"];
      a.datatype = vocab<Datatype>(r, "datatype");
      for (const auto& c : split(r["constraints"], ' ')) {
        auto parsed = parse_literal<Constraint>(c);
        if (!parsed) {
          bad_value(r, "'" + c + "' is not a Constraint literal; allowed " + allowed_set<Constraint>());
          continue;
        }
        a.constraints.insert(*parsed);
      }
      a.references = optional(r["references"]);
      attributes[r["entity_id"]].push_back(std::move(a));
    }
    for (const auto& r : rows("data_entities.csv")) {
      Element e = common(r);
      DataEntity de{vocab<EntityKind>(r, "kind"), {}};
      if (auto it = attributes.find(e.id); it != attributes.end()) {
        de.attributes = std::move(it->second);
        attributes.erase(it);  // a duplicated entity row gets none; C001 reports it
      }
      e.body = std::move(de);
      push(r, std::move(e));
    }

    std::set<std::string> use_case_ids;
    for (const auto& r : rows("use_cases.csv")) use_case_ids.insert(r["id"]);
    std::map<std::string, std::vector<Scenario>> scenarios;  // by use case id
    for (const auto& r : rows("scenarios.csv")) {
      if (!use_case_ids.contains(r["use_case_id"])) {
        orphan(r, "use_case_id '" + r["use_case_id"] + "' names no row of use_cases.csv");
        continue;
      }
      scenarios[r["use_case_id"]].push_back(Scenario{r["id"], vocab<ScenarioKind>(r, "kind"), {}, {}});
    }
    for (const auto& r : rows("steps.csv")) {
      auto uc = scenarios.find(r["use_case_id"]);
      Scenario* target = nullptr;
      if (uc != scenarios.end()) {
        for (auto& sc : uc->second) {
          if (sc.id == r["scenario_id"]) {
            target = &sc;
            break;
          }
        }
      }
      if (!target) {
        orphan(r, "scenario '" + r["scenario_id"] + "' of use case '" + r["use_case_id"] +
                      "' names no row of scenarios.csv");
        continue;
      }
      Step st;
      auto order = integer(r, "order");
      if (order && *order > std::numeric_limits<int>::max()) {
        bad_value(r, "step order out of range");
        order.reset();
      }
      st.order = order ? static_cast<int>(*order) : 1;
      st.performer = vocab<Performer>(r, "performer");
      st.action = r["action"];
      target->steps.push_back(std::move(st));
    }
    for (const auto& r : rows("use_cases.csv")) {
      Element e = common(r);
      UseCase uc;
      uc.kind = vocab<UseCaseKind>(r, "kind");
      uc.primary_actor = r["primary_actor"];
      uc.data_entities = split(r["data_entities"], ' ');
      if (auto it = scenarios.find(e.id); it != scenarios.end()) {
        uc.scenarios = std::move(it->second);
        scenarios.erase(it);
      }
      e.body = std::move(uc);
      push(r, std::move(e));
    }

    for (const auto& r : rows("user_stories.csv")) {
      Element e = common(r);
      e.body = UserStory{r["as_a"], r["i_want"], optional(r["so_that"]), vocab<Priority>(r, "priority", Priority::Unset)};
      push(r, std::move(e));
    }
    for (const auto& r : rows("goals.csv")) {
      Element e = common(r);
      e.body = Goal{optional(r["part_of"]), vocab<Priority>(r, "priority", Priority::Unset)};
      push(r, std::move(e));
    }
    for (const auto& r : rows("quality_requirements.csv")) {
      Element e = common(r);
      e.body = QualityRequirement{vocab<QRKind>(r, "kind"), optional(r["metric"]), optional(r["target_value"])};
      push(r, std::move(e));
    }
    for (const auto& r : rows("test_cases.csv")) {
      Element e = common(r);
      e.body = TestCase{r["traces"], optional(r["scenario"]), split(r["given"], '\n'), split(r["when"], '\n'),
                        split(r["then"], '\n')};
      push(r, std::move(e));
    }
    for (const auto& r : rows("glossary.csv")) {
      GlossaryTerm gt;
      gt.term = r["term"];
      gt.part_of_speech = vocab<PartOfSpeech>(r, "part_of_speech");
      gt.definition = optional(r["definition"]);
      gt.synonyms = split(r["synonyms"], '\n');
      const std::string& pref = r["preferred"];
      if (pref == "true" || pref.empty()) {
        gt.preferred = true;
      } else if (pref == "false") {
        gt.preferred = false;
      } else {
        bad_value(r, "preferred must be true or false, not '" + pref + "'");
      }
      push(r, make_glossary_term(std::move(gt)));
    }
  }

  void orphan(const Row& r, std::string message) {
    diags_.push_back(Diagnostic::make(Code::T021_OrphanRow, at(r),
                                      r.file + " line " + std::to_string(r.line()) + ": " + std::move(message)));
  }

  const std::map<std::string, std::string>& files_;
  std::string label_;
  std::map<std::string, CsvTable> tables_;
  std::vector<Pending> pending_;
  Diagnostics diags_;
};

}  // namespace

Outcome<SpecificationModel> import_workbook_tables(const std::map<std::string, std::string>& files,
                                                   const std::string& label) {
  return WorkbookReader(files, label).run();
}

Outcome<SpecificationModel> import_workbook(const std::filesystem::path& dir) {
  auto io_error = [&](const std::string& what) {
    return Outcome<SpecificationModel>{
        std::nullopt, {Diagnostic::make(Code::T020_IoFailure, SourceSpan{dir.string(), 1, 1, 1, 1}, what)}};
  };
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) return io_error("not a workbook directory: " + dir.string());

  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in && !in.eof()) return io_error("cannot read " + entry.path().string());
    files[entry.path().filename().string()] = buf.str();
  }
  if (ec) return io_error(ec.message());
  return import_workbook_tables(files, dir.string());
}

}  // namespace rsl
