#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rsl/diagnostics.hpp"
#include "rsl/model.hpp"

namespace rsl {

using SearchPath = std::vector<std::filesystem::path>;

/// `<dir>/<segment>/.../<last>.rsl`
std::filesystem::path library_file(const std::filesystem::path& dir, const QualifiedName& package);

struct ResolvedLibrary {
  std::filesystem::path file;
  SpecificationModel model;  // as parsed, imports unresolved
};

/// Resolves every import of `root`, transitively. The first search-path
/// directory holding the file wins. Errors: RSL-I010 (lists the probed
/// paths), RSL-I011 (parse failure or package name mismatch), RSL-I012
/// (cycle, named as `a -> b -> a`).
Outcome<std::map<QualifiedName, ResolvedLibrary>> resolve_imports(const SpecificationModel& root,
                                                                  const SearchPath& search_path);

/// Adds each imported model under its alias: ids and every element
/// reference inside it gain the `<alias>.` prefix. Base elements keep their
/// ids; the inputs are not modified. The result carries no imports.
/// RSL-L010 for a repeated alias or a qualified id already taken.
Outcome<SpecificationModel> merge(const SpecificationModel& base,
                                  const std::vector<std::pair<std::string, SpecificationModel>>& imported);

/// Alias used for `decl`: the explicit alias or the last package segment.
std::string import_alias(const ImportDecl& decl);

/// resolve_imports followed by a bottom-up merge of the import tree.
Outcome<SpecificationModel> compose(const SpecificationModel& root, const SearchPath& search_path);

struct LibraryManifest {
  QualifiedName package;
  std::string version;  // MAJOR.MINOR.PATCH
  std::string description;
  std::filesystem::path source;    // the .rsl file
  std::filesystem::path manifest;  // the sidecar
};

/// `key: value` lines with keys package, version, description; `#` starts a
/// comment line. RSL-L011 on unknown or missing keys, a malformed package
/// name or version.
Outcome<LibraryManifest> parse_manifest(std::string_view text, const std::filesystem::path& manifest_file);

/// Every `.rsl` file with an adjacent `.manifest` under the search-path
/// directories, first directory winning per package, sorted by package.
/// RSL-L011 when a manifest is malformed or names a different package than
/// its source; RSL-T020 when a directory cannot be read.
Outcome<std::vector<LibraryManifest>> list_catalog(const SearchPath& search_path);

}  // namespace rsl
