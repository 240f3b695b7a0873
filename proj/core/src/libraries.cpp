#include "rsl/libraries.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "rsl/parser.hpp"

namespace rsl {

namespace {

std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::optional<SourceSpan> located(const SourceSpan& s) {
  if (s == SourceSpan{}) return std::nullopt;
  return s;
}

std::string qualify(const std::string& alias, const std::string& ref) { return alias + "." + ref; }

Element qualified(Element e, const std::string& alias) {
  e.id = qualify(alias, e.id);
  std::visit(
      [&](auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, DataEntity>) {
          for (auto& a : b.attributes) {
            if (a.references) a.references = qualify(alias, *a.references);
          }
        } else if constexpr (std::is_same_v<T, UseCase>) {
          b.primary_actor = qualify(alias, b.primary_actor);
          for (auto& d : b.data_entities) d = qualify(alias, d);
        } else if constexpr (std::is_same_v<T, UserStory>) {
          b.as_a = qualify(alias, b.as_a);
        } else if constexpr (std::is_same_v<T, Goal>) {
          if (b.parent) b.parent = qualify(alias, *b.parent);
        } else if constexpr (std::is_same_v<T, TestCase>) {
          b.traces_to = qualify(alias, b.traces_to);
        }
      },
      e.body);
  return e;
}

class Resolver {
 public:
  explicit Resolver(const SearchPath& path) : path_(path) {}

  void visit(const SpecificationModel& model, std::vector<QualifiedName>& stack) {
    for (const auto& decl : model.imports) {
      auto on_stack = std::find(stack.begin(), stack.end(), decl.target);
      if (on_stack != stack.end()) {
        std::string chain;
        for (auto it = on_stack; it != stack.end(); ++it) chain += it->str() + " -> ";
        chain += decl.target.str();
        diags_.push_back(Diagnostic::make(Code::I012_ImportCycle, located(decl.span), "import cycle: " + chain));
        continue;
      }
      if (resolved_.contains(decl.target) || failed_.contains(decl.target)) continue;

      std::vector<std::string> probed;
      std::optional<std::filesystem::path> hit;
      for (const auto& dir : path_) {
        auto candidate = library_file(dir, decl.target);
        probed.push_back(candidate.string());
        std::error_code ec;
        if (std::filesystem::is_regular_file(candidate, ec)) {
          hit = candidate;
          break;
        }
      }
      if (!hit) {
        std::string list;
        for (const auto& p : probed) list += (list.empty() ? "" : ", ") + p;
        diags_.push_back(Diagnostic::make(Code::I010_ImportNotFound, located(decl.span),
                                          "package '" + decl.target.str() + "' not found; probed: " +
                                              (list.empty() ? std::string("(empty search path)") : list)));
        failed_.insert(decl.target);
        continue;
      }
      auto text = read_file(*hit);
      auto parsed = text ? parse(*text, hit->string()) : ParseResult{};
      if (!parsed.ok()) {
        auto d = Diagnostic::make(Code::I011_ImportParseFailed, located(decl.span),
                                  "imported package '" + decl.target.str() + "' (" + hit->string() +
                                      ") fails to parse");
        for (const auto& inner : parsed.diagnostics) {
          if (inner.severity == Severity::Error && inner.span) d.related.push_back({*inner.span, inner.message});
        }
        diags_.push_back(std::move(d));
        failed_.insert(decl.target);
        continue;
      }
      if (parsed.model->package_name != decl.target) {
        diags_.push_back(Diagnostic::make(Code::I011_ImportParseFailed, located(decl.span),
                                          hit->string() + " declares package '" + parsed.model->package_name.str() +
                                              "', not '" + decl.target.str() + "'"));
        failed_.insert(decl.target);
        continue;
      }
      auto [it, _] = resolved_.emplace(decl.target, ResolvedLibrary{*hit, std::move(*parsed.model)});
      stack.push_back(decl.target);
      visit(it->second.model, stack);
      stack.pop_back();
    }
  }

  Outcome<std::map<QualifiedName, ResolvedLibrary>> result() && {
    if (has_errors(diags_)) return {std::nullopt, std::move(diags_)};
    return {std::move(resolved_), std::move(diags_)};
  }

 private:
  const SearchPath& path_;
  std::map<QualifiedName, ResolvedLibrary> resolved_;
  std::set<QualifiedName> failed_;
  Diagnostics diags_;
};

Outcome<SpecificationModel> merge_tree(const SpecificationModel& model,
                                       const std::map<QualifiedName, ResolvedLibrary>& libs,
                                       std::map<QualifiedName, SpecificationModel>& memo) {
  std::vector<std::pair<std::string, SpecificationModel>> imported;
  for (const auto& decl : model.imports) {
    auto cached = memo.find(decl.target);
    if (cached == memo.end()) {
      auto sub = merge_tree(libs.at(decl.target).model, libs, memo);
      if (!sub.value) return sub;
      cached = memo.emplace(decl.target, std::move(*sub.value)).first;
    }
    imported.emplace_back(import_alias(decl), cached->second);
  }
  return merge(model, imported);
}

}  // namespace

std::filesystem::path library_file(const std::filesystem::path& dir, const QualifiedName& package) {
  std::filesystem::path p = dir;
  const auto& segs = package.segments();
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) p /= segs[i];
  p /= segs.back() + ".rsl";
  return p;
}

std::string import_alias(const ImportDecl& decl) { return decl.alias ? *decl.alias : decl.target.last(); }

Outcome<std::map<QualifiedName, ResolvedLibrary>> resolve_imports(const SpecificationModel& root,
                                                                  const SearchPath& search_path) {
  Resolver r(search_path);
  std::vector<QualifiedName> stack{root.package_name};
  r.visit(root, stack);
  return std::move(r).result();
}

Outcome<SpecificationModel> merge(const SpecificationModel& base,
                                  const std::vector<std::pair<std::string, SpecificationModel>>& imported) {
  ModelBuilder builder(base.package_name);
  if (base.source) builder.set_source(*base.source);
  builder.set_package_span(base.package_span);
  Diagnostics diags;
  for (const auto& e : base.elements) {
    if (auto dup = builder.add(e)) diags.push_back(std::move(*dup));
  }
  std::set<std::string> aliases;
  for (const auto& [alias, lib] : imported) {
    if (!aliases.insert(alias).second) {
      diags.push_back(Diagnostic::make(Code::L010_NameCollision, located(base.package_span),
                                       "alias '" + alias + "' is used by more than one import"));
      continue;
    }
    for (const auto& e : lib.elements) {
      Element q = qualified(e, alias);
      if (builder.contains(q.id)) {
        auto d = Diagnostic::make(Code::L010_NameCollision, located(base.package_span),
                                  "qualified name '" + q.id + "' from package '" + lib.package_name.str() +
                                      "' collides with an existing element");
        if (auto span = located(e.span)) d.related.push_back({*span, "imported element"});
        diags.push_back(std::move(d));
        continue;
      }
      builder.add(std::move(q));
    }
  }
  if (has_errors(diags)) return {std::nullopt, std::move(diags)};
  return {std::move(builder).build(), std::move(diags)};
}

Outcome<SpecificationModel> compose(const SpecificationModel& root, const SearchPath& search_path) {
  auto libs = resolve_imports(root, search_path);
  if (!libs.value) return {std::nullopt, std::move(libs.diagnostics)};
  std::map<QualifiedName, SpecificationModel> memo;
  auto merged = merge_tree(root, *libs.value, memo);
  merged.diagnostics.insert(merged.diagnostics.begin(), libs.diagnostics.begin(), libs.diagnostics.end());
  return merged;
}

Outcome<LibraryManifest> parse_manifest(std::string_view text, const std::filesystem::path& manifest_file) {
  Diagnostics diags;
  auto fail = [&](std::uint32_t line, std::string message) {
    diags.push_back(Diagnostic::make(Code::L011_ManifestMismatch,
                                     SourceSpan{manifest_file.string(), line, 1, line, 1}, std::move(message)));
  };
  std::map<std::string, std::pair<std::string, std::uint32_t>> values;
  std::istringstream in{std::string(text)};
  std::string line;
  std::uint32_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) {
      fail(n, "expected 'key: value'");
      continue;
    }
    auto strip = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = strip(line.substr(0, colon));
    std::string value = strip(line.substr(colon + 1));
    if (key != "package" && key != "version" && key != "description") {
      fail(n, "unknown manifest key '" + key + "'");
    } else if (values.contains(key)) {
      fail(n, "repeated manifest key '" + key + "'");
    } else {
      values[key] = {value, n};
    }
  }
  std::optional<QualifiedName> package;
  if (!values.contains("package")) {
    fail(1, "manifest lacks 'package'");
  } else if (!(package = QualifiedName::parse(values["package"].first))) {
    fail(values["package"].second, "'" + values["package"].first + "' is not a dotted package name");
  }
  static const std::regex semver(R"(^(0|[1-9][0-9]*)\.(0|[1-9][0-9]*)\.(0|[1-9][0-9]*)$)");
  if (!values.contains("version")) {
    fail(1, "manifest lacks 'version'");
  } else if (!std::regex_match(values["version"].first, semver)) {
    fail(values["version"].second, "version '" + values["version"].first + "' is not MAJOR.MINOR.PATCH");
  }
  if (has_errors(diags)) return {std::nullopt, std::move(diags)};
  auto source = manifest_file;
  source.replace_extension(".rsl");
  return {LibraryManifest{std::move(*package), values["version"].first, values["description"].first, source,
                          manifest_file},
          {}};
}

Outcome<std::vector<LibraryManifest>> list_catalog(const SearchPath& search_path) {
  Diagnostics diags;
  std::map<QualifiedName, LibraryManifest> found;
  for (const auto& dir : search_path) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
      diags.push_back(Diagnostic::make(Code::T020_IoFailure, SourceSpan{dir.string(), 1, 1, 1, 1},
                                       "library path is not a readable directory"));
      continue;
    }
    std::vector<std::filesystem::path> manifests;
    std::filesystem::recursive_directory_iterator it(dir, ec), end;
    for (; !ec && it != end; it.increment(ec)) {
      if (it->path().extension() == ".manifest" && it->is_regular_file()) manifests.push_back(it->path());
    }
    if (ec) {
      diags.push_back(Diagnostic::make(Code::T020_IoFailure, SourceSpan{dir.string(), 1, 1, 1, 1},
                                       "cannot read library path: " + ec.message()));
      continue;
    }
    std::sort(manifests.begin(), manifests.end());
    for (const auto& m : manifests) {
      auto source = m;
      source.replace_extension(".rsl");
      if (!std::filesystem::is_regular_file(source, ec)) continue;
      auto text = read_file(m);
      if (!text) {
        diags.push_back(Diagnostic::make(Code::T020_IoFailure, SourceSpan{m.string(), 1, 1, 1, 1}, "cannot read"));
        continue;
      }
      auto manifest = parse_manifest(*text, m);
      diags.insert(diags.end(), manifest.diagnostics.begin(), manifest.diagnostics.end());
      if (!manifest.value) continue;
      auto src_text = read_file(source);
      auto parsed = src_text ? parse(*src_text, source.string()) : ParseResult{};
      if (!parsed.model) {
        diags.push_back(Diagnostic::make(Code::L011_ManifestMismatch, SourceSpan{m.string(), 1, 1, 1, 1},
                                         "library source " + source.string() + " has no readable package header"));
        continue;
      }
      if (parsed.model->package_name != manifest.value->package) {
        diags.push_back(Diagnostic::make(Code::L011_ManifestMismatch, SourceSpan{m.string(), 1, 1, 1, 1},
                                         "manifest names package '" + manifest.value->package.str() + "' but " +
                                             source.string() + " declares '" + parsed.model->package_name.str() +
                                             "'"));
        continue;
      }
      found.emplace(manifest.value->package, std::move(*manifest.value));  // first directory wins
    }
  }
  if (has_errors(diags)) return {std::nullopt, std::move(diags)};
  std::vector<LibraryManifest> out;
  for (auto& [_, m] : found) out.push_back(std::move(m));
  return {std::move(out), std::move(diags)};
}

}  // namespace rsl
