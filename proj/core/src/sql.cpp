#include <algorithm>
#include <functional>
#include <queue>
#include <unordered_map>

#include "rsl/transform.hpp"
#include "rsl/validator.hpp"

namespace rsl {

namespace {

std::string_view sql_type(Datatype t) {
  switch (t) {
    case Datatype::Integer: return "INTEGER";
    case Datatype::Decimal: return "NUMERIC(18,4)";
    case Datatype::Boolean: return "BOOLEAN";
    case Datatype::Date: return "DATE";
    case Datatype::DateTime: return "TIMESTAMP";
    case Datatype::Text: return "TEXT";
  }
  return "TEXT";
}

struct Table {
  const Element* element;
  const DataEntity* entity;
  const DataAttribute* primary_key = nullptr;
  std::vector<std::size_t> depends_on;  // table indices, self excluded
};

/// Strongly connected components (Tarjan); component ids are arbitrary.
std::vector<std::size_t> components(const std::vector<Table>& tables, std::size_t& count) {
  const std::size_t n = tables.size();
  std::vector<std::size_t> comp(n, SIZE_MAX), index(n, SIZE_MAX), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t next = 0;
  count = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = next++;
    stack.push_back(v);
    on_stack[v] = true;
    for (auto w : tables[v].depends_on) {
      if (index[w] == SIZE_MAX) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = count;
      } while (w != v);
      ++count;
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] == SIZE_MAX) visit(v);
  }
  return comp;
}

}  // namespace

std::string sql_identifier(std::string_view name) {
  bool bare = !name.empty() && ((name[0] >= 'A' && name[0] <= 'Z') || (name[0] >= 'a' && name[0] <= 'z'));
  for (char c : name) {
    bare = bare && ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_');
  }
  if (bare) return std::string(name);
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Outcome<std::string> generate_sql(const SpecificationModel& model) {
  Diagnostics consistency = check_consistency(model);
  if (has_errors(consistency)) {
    Diagnostics diags{Diagnostic::make(Code::T041_InconsistentModel,
                                       model.package_span == SourceSpan{} ? std::nullopt
                                                                          : std::optional(model.package_span),
                                       "SQL generation requires a model without consistency errors (" +
                                           std::to_string(count(consistency, Severity::Error)) + " found)")};
    diags.insert(diags.end(), consistency.begin(), consistency.end());
    return {std::nullopt, std::move(diags)};
  }

  std::vector<Table> tables;
  std::unordered_map<std::string_view, std::size_t> by_id;
  for (const auto& e : model.elements) {
    if (const auto* de = e.as<DataEntity>()) {
      Table t{&e, de, nullptr, {}};
      for (const auto& a : de->attributes) {
        if (a.constraints.contains(Constraint::PrimaryKey)) {
          t.primary_key = &a;
          break;
        }
      }
      by_id.emplace(e.id, tables.size());
      tables.push_back(t);
    }
  }

  Diagnostics diags;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    for (const auto& a : tables[i].entity->attributes) {
      if (!a.references) continue;
      std::size_t target = by_id.at(*a.references);
      if (!tables[target].primary_key) {
        SourceSpan span = a.span == SourceSpan{} ? tables[i].element->span : a.span;
        diags.push_back(Diagnostic::make(Code::T040_ForeignKeyTargetWithoutKey,
                                         span == SourceSpan{} ? std::nullopt : std::optional(span),
                                         "'" + tables[i].element->id + "." + a.name + "' references '" +
                                             *a.references + "', which has no PrimaryKey attribute"));
      }
      if (target != i) tables[i].depends_on.push_back(target);
    }
  }
  if (has_errors(diags)) return {std::nullopt, std::move(diags)};

  std::size_t ncomp = 0;
  auto comp = components(tables, ncomp);

  // Kahn over the condensation; among ready components the one holding the
  // earliest-declared table goes first.
  std::vector<std::size_t> first_member(ncomp, SIZE_MAX);
  std::vector<std::vector<std::size_t>> members(ncomp);
  for (std::size_t i = 0; i < tables.size(); ++i) {
    first_member[comp[i]] = std::min(first_member[comp[i]], i);
    members[comp[i]].push_back(i);
  }
  std::vector<std::size_t> indegree(ncomp, 0);
  std::vector<std::vector<std::size_t>> dependents(ncomp);
  for (std::size_t i = 0; i < tables.size(); ++i) {
    for (auto d : tables[i].depends_on) {
      if (comp[d] == comp[i]) continue;
      dependents[comp[d]].push_back(comp[i]);
      ++indegree[comp[i]];
    }
  }
  using Ready = std::pair<std::size_t, std::size_t>;  // (first member, component)
  std::priority_queue<Ready, std::vector<Ready>, std::greater<>> ready;
  for (std::size_t c = 0; c < ncomp; ++c) {
    if (indegree[c] == 0) ready.emplace(first_member[c], c);
  }

  std::string creates;
  std::string alters;
  while (!ready.empty()) {
    auto [_, c] = ready.top();
    ready.pop();
    for (auto i : members[c]) {
      const Table& t = tables[i];
      const std::string table = sql_identifier(t.element->id);
      std::string columns;
      for (const auto& a : t.entity->attributes) {
        if (!columns.empty()) columns += ", ";
        columns += sql_identifier(a.name);
        columns += ' ';
        columns += sql_type(a.datatype);
        bool pk = a.constraints.contains(Constraint::PrimaryKey);
        if (pk) columns += " PRIMARY KEY";
        if (!pk && a.constraints.contains(Constraint::NotNull)) columns += " NOT NULL";
        if (a.constraints.contains(Constraint::Unique)) columns += " UNIQUE";
        if (!a.references) continue;
        std::size_t target = by_id.at(*a.references);
        const std::string ref =
            sql_identifier(tables[target].element->id) + "(" + sql_identifier(tables[target].primary_key->name) + ")";
        if (target != i && comp[target] == c) {
          alters += "ALTER TABLE " + table + " ADD CONSTRAINT " +
                    sql_identifier("fk_" + t.element->id + "_" + a.name) + " FOREIGN KEY (" + sql_identifier(a.name) +
                    ") REFERENCES " + ref + ";\n";
        } else {
          columns += " REFERENCES " + ref;
        }
      }
      creates += "CREATE TABLE " + table + " (" + columns + ");\n";
    }
    for (auto d : dependents[c]) {
      if (--indegree[d] == 0) ready.emplace(first_member[d], d);
    }
  }
  return {creates + alters, {}};
}

}  // namespace rsl
