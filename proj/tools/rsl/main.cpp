// rsl: check, import, export, generate and list libraries of .rsl specifications.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rsl/extractor.hpp"
#include "rsl/libraries.hpp"
#include "rsl/parser.hpp"
#include "rsl/transform.hpp"
#include "rsl/validator.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int { kOk = 0, kValidation = 1, kMalformed = 2, kIo = 3, kUsage = 4 };

// Exit class of one Error diagnostic.
int exit_class(rsl::Code code) {
  using rsl::Code;
  switch (code) {
    case Code::X001_MalformedConstructRule:
    case Code::X002_InvalidCheckConfig:
    case Code::T020_IoFailure:
      return kIo;
    case Code::T010_UnknownField:
    case Code::T011_UnsupportedSchemaVersion:
    case Code::T012_MalformedDocument:
    case Code::T021_OrphanRow:
    case Code::T022_MissingColumn:
    case Code::T023_BadValue:
    case Code::T024_UnknownWorkbookFile:
    case Code::I010_ImportNotFound:
    case Code::I011_ImportParseFailed:
    case Code::I012_ImportCycle:
    case Code::L011_ManifestMismatch:
      return kMalformed;
    default:
      break;
  }
  auto text = rsl::code_text(code);
  return text.size() > 4 && text[4] == 'P' ? kMalformed : kValidation;
}

int exit_for(const rsl::Diagnostics& diags) {
  int worst = kOk;
  for (const auto& d : diags) {
    if (d.severity == rsl::Severity::Error) worst = std::max(worst, exit_class(d.code));
  }
  return worst;
}

void print(const rsl::Diagnostics& diags, std::string_view file) {
  for (const auto& d : diags) std::cerr << rsl::format_diagnostic(d, file) << '\n';
}

rsl::Diagnostic io_failure(const fs::path& p, const std::string& what) {
  return rsl::Diagnostic::make(rsl::Code::T020_IoFailure, rsl::SourceSpan{p.string(), 1, 1, 1, 1}, what);
}

std::optional<std::string> read_file(const fs::path& p) {
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) return std::nullopt;
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool write_file(const fs::path& p, std::string_view content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  return static_cast<bool>(out);
}

fs::path executable_dir(const char* argv0) {
  std::error_code ec;
  auto self = fs::read_symlink("/proc/self/exe", ec);
  if (ec) self = fs::absolute(argv0, ec);
  return self.parent_path();
}

/// Shipped templates, styles, config and catalogs.
fs::path data_dir(const char* argv0) {
  if (const char* env = std::getenv("RSL_DATA_DIR"); env && *env) return env;
  std::error_code ec;
  auto installed = executable_dir(argv0) / ".." / RSL_DATA_SUBDIR;
  if (fs::is_directory(installed / "templates", ec)) return installed.lexically_normal();
  return RSL_SOURCE_DATA_DIR;
}

struct LibOptions {
  std::vector<std::string> lib_path;
  bool no_default = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--lib-path", lib_path, "Library search directory (repeatable, searched first)");
    cmd->add_flag("--no-default-lib-path", no_default, "Do not search the installed catalogs directory");
  }

  rsl::SearchPath resolve(const fs::path& data) const {
    rsl::SearchPath out(lib_path.begin(), lib_path.end());
    if (const char* env = std::getenv("RSL_LIB_PATH"); env && *env) {
      std::string_view rest = env;
      while (!rest.empty()) {
        auto sep = rest.find(':');
        auto item = rest.substr(0, sep);
        if (!item.empty()) out.emplace_back(std::string(item));
        if (sep == std::string_view::npos) break;
        rest.remove_prefix(sep + 1);
      }
    }
    if (!no_default) out.push_back(data / "catalogs");
    return out;
  }
};

/// Parses `file`; diagnostics are appended to `diags`.
std::optional<rsl::SpecificationModel> load(const fs::path& file, rsl::Diagnostics& diags) {
  auto text = read_file(file);
  if (!text) {
    diags.push_back(io_failure(file, "cannot read input file"));
    return std::nullopt;
  }
  auto parsed = rsl::parse(*text, file.string());
  diags.insert(diags.end(), parsed.diagnostics.begin(), parsed.diagnostics.end());
  if (!parsed.ok()) return std::nullopt;
  return std::move(parsed.model);
}

struct CheckResult {
  rsl::ValidationReport report;
  int exit = kOk;
};

CheckResult check_file(const fs::path& file, const rsl::CheckConfig& config, const rsl::SearchPath& path) {
  CheckResult r;
  rsl::Diagnostics diags;
  auto model = load(file, diags);
  if (model) {
    auto merged = rsl::compose(*model, path);
    diags.insert(diags.end(), merged.diagnostics.begin(), merged.diagnostics.end());
    if (merged.value) {
      auto report = rsl::check_all(*merged.value, config);
      diags.insert(diags.end(), report.diagnostics.begin(), report.diagnostics.end());
      if (!report.passed) r.exit = kValidation;
    }
  }
  r.exit = std::max(r.exit, exit_for(diags));
  r.report.diagnostics = std::move(diags);
  const auto& d = r.report.diagnostics;
  r.report.counts = {rsl::count(d, rsl::Severity::Error), rsl::count(d, rsl::Severity::Warning),
                     rsl::count(d, rsl::Severity::Info)};
  r.report.passed = r.exit == kOk;
  return r;
}

int cmd_check(const std::vector<std::string>& files, const std::string& config_file, const std::string& format,
              const rsl::SearchPath& path) {
  rsl::CheckConfig config = rsl::default_check_config();
  if (!config_file.empty()) {
    auto text = read_file(config_file);
    if (!text) {
      print({io_failure(config_file, "cannot read check configuration")}, config_file);
      return kIo;
    }
    auto parsed = rsl::parse_check_config(*text, config_file);
    if (!parsed.value) {
      print(parsed.diagnostics, config_file);
      return kIo;
    }
    config = std::move(*parsed.value);
  }

  std::vector<std::future<CheckResult>> jobs;
  for (const auto& f : files) {
    jobs.push_back(std::async(std::launch::async, [&, f] { return check_file(f, config, path); }));
  }
  int worst = kOk;
  std::size_t errors = 0, warnings = 0;
  std::string json = "[";
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto r = jobs[i].get();
    worst = std::max(worst, r.exit);
    errors += r.report.counts.errors;
    warnings += r.report.counts.warnings;
    if (format == "json") {
      if (i) json += ',';
      json += rsl::report_to_json(r.report, files[i]);
    } else {
      print(r.report.diagnostics, files[i]);
    }
  }
  if (format == "json") {
    std::cout << json << "]\n";
  } else {
    std::cout << errors << (errors == 1 ? " error, " : " errors, ") << warnings
              << (warnings == 1 ? " warning" : " warnings") << '\n';
  }
  return worst;
}

int cmd_import(const std::string& from, const fs::path& src, const fs::path& out, const std::string& package) {
  rsl::Diagnostics diags;
  std::optional<rsl::SpecificationModel> model;
  std::optional<std::string> report;

  if (from == "csv") {
    auto r = rsl::import_workbook(src);
    diags = std::move(r.diagnostics);
    model = std::move(r.value);
  } else {
    auto text = read_file(src);
    if (!text) {
      print({io_failure(src, "cannot read input file")}, src.string());
      return kIo;
    }
    if (from == "json") {
      auto r = rsl::import_json(*text, src.string());
      diags = std::move(r.diagnostics);
      model = std::move(r.value);
    } else {
      auto name = rsl::QualifiedName::parse(package);
      if (!name) {
        std::cerr << "rsl import: --package '" << package << "' is not a dotted identifier\n";
        return kUsage;
      }
      auto extracted = rsl::extract_model(*text, *name, src.string());
      report = rsl::extraction_report_to_json(extracted);
      model = std::move(extracted.model);
    }
  }
  print(diags, src.string());
  if (int code = exit_for(diags); code != kOk || !model) return code == kOk ? kMalformed : code;

  auto consistency = rsl::check_consistency(*model);
  print(consistency, out.string());

  if (!write_file(out, rsl::format(*model))) {
    print({io_failure(out, "cannot write output file")}, out.string());
    return kIo;
  }
  if (report) {
    fs::path sidecar = out.string() + ".report.json";
    if (!write_file(sidecar, *report)) {
      print({io_failure(sidecar, "cannot write extraction report")}, sidecar.string());
      return kIo;
    }
  }
  return exit_for(consistency);
}

int cmd_export(const fs::path& file, const std::string& to, const std::string& out, std::string tmpl,
               std::string styles_file, const fs::path& data) {
  rsl::Diagnostics diags;
  auto model = load(file, diags);
  print(diags, file.string());
  if (!model) return std::max(exit_for(diags), static_cast<int>(kMalformed));

  if (to == "csv") {
    if (out.empty()) {
      std::cerr << "rsl export: --to csv requires --out <directory>\n";
      return kUsage;
    }
    auto written = rsl::export_workbook(*model, out);
    print(written, out);
    return exit_for(written);
  }

  std::string content;
  if (to == "json") {
    content = rsl::export_json(*model) + "\n";
  } else {
    if (tmpl.empty()) tmpl = (data / "templates" / "srs.md.tmpl").string();
    if (styles_file.empty()) styles_file = (data / "styles" / "builtin.styles").string();
    auto template_text = read_file(tmpl);
    auto styles_text = read_file(styles_file);
    if (!template_text || !styles_text) {
      const auto& missing = template_text ? styles_file : tmpl;
      print({io_failure(missing, "cannot read")}, missing);
      return kIo;
    }
    auto styles = rsl::parse_styles(*styles_text, styles_file);
    print(styles.diagnostics, styles_file);
    if (!styles.value) return kMalformed;
    auto rendered = rsl::render_document(*model, *template_text, *styles.value, tmpl);
    print(rendered.diagnostics, tmpl);
    if (!rendered.value) return std::max(exit_for(rendered.diagnostics), static_cast<int>(kValidation));
    content = std::move(*rendered.value);
  }

  if (out.empty()) {
    std::cout << content;
    return kOk;
  }
  if (!write_file(out, content)) {
    print({io_failure(out, "cannot write output file")}, out);
    return kIo;
  }
  return kOk;
}

int cmd_gen(const fs::path& file, const std::string& out, const rsl::SearchPath& path) {
  rsl::Diagnostics diags;
  auto model = load(file, diags);
  if (!model) {
    print(diags, file.string());
    return std::max(exit_for(diags), static_cast<int>(kMalformed));
  }
  auto merged = rsl::compose(*model, path);
  diags.insert(diags.end(), merged.diagnostics.begin(), merged.diagnostics.end());
  if (!merged.value) {
    print(diags, file.string());
    return exit_for(diags);
  }
  auto sql = rsl::generate_sql(*merged.value);
  diags.insert(diags.end(), sql.diagnostics.begin(), sql.diagnostics.end());
  print(diags, file.string());
  if (!sql.value) return std::max(exit_for(diags), static_cast<int>(kValidation));
  if (out.empty()) {
    std::cout << *sql.value;
  } else if (!write_file(out, *sql.value)) {
    print({io_failure(out, "cannot write output file")}, out);
    return kIo;
  }
  return kOk;
}

int cmd_lib_list(const rsl::SearchPath& path) {
  auto catalog = rsl::list_catalog(path);
  print(catalog.diagnostics, "");
  if (!catalog.value) return exit_for(catalog.diagnostics);

  std::size_t wp = 7, wv = 7;
  for (const auto& m : *catalog.value) {
    wp = std::max(wp, m.package.str().size());
    wv = std::max(wv, m.version.size());
  }
  auto row = [&](const std::string& p, const std::string& v, const std::string& d) {
    std::string line = p + std::string(wp - p.size() + 2, ' ') + v + std::string(wv - v.size() + 2, ' ') + d;
    while (!line.empty() && line.back() == ' ') line.pop_back();
    std::cout << line << '\n';
  };
  row("package", "version", "description");

  // A library that does not check clean cannot be imported cleanly either.
  int worst = kOk;
  for (const auto& m : *catalog.value) {
    row(m.package.str(), m.version, m.description);
    rsl::Diagnostics diags;
    if (auto model = load(m.source, diags)) {
      auto consistency = rsl::check_consistency(*model);
      diags.insert(diags.end(), consistency.begin(), consistency.end());
    }
    print(diags, m.source.string());
    worst = std::max(worst, exit_for(diags));
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks, converts and generates from .rsl requirements specifications", "rsl"};
  app.set_version_flag("--version", std::string("rsl ") + RSL_VERSION);
  app.require_subcommand(1);
  const fs::path data = data_dir(argv[0]);

  auto* check = app.add_subcommand("check", "Parse, resolve imports and validate specifications");
  std::vector<std::string> check_files;
  std::string config_file, format = "text";
  LibOptions check_libs;
  check->add_option("files", check_files, "Specification files")->required();
  check->add_option("--config", config_file, "Check configuration (rslcheck.json)");
  check->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  check_libs.add_to(check);

  auto* import = app.add_subcommand("import", "Build a .rsl file from a workbook, JSON document or plain text");
  std::string from, import_src, import_out, package = "extracted";
  import->add_option("--from", from, "Source format")->required()->check(CLI::IsMember({"csv", "json", "text"}));
  import->add_option("src", import_src, "Workbook directory or input file")->required();
  import->add_option("--out", import_out, "Output .rsl file")->required();
  import->add_option("--package", package, "Package name for text extraction");

  auto* exp = app.add_subcommand("export", "Write a specification as JSON, a CSV workbook or a Markdown document");
  std::string export_file, to, export_out, tmpl, styles;
  exp->add_option("file", export_file, "Specification file")->required();
  exp->add_option("--to", to, "Target format")->required()->check(CLI::IsMember({"json", "csv", "md"}));
  exp->add_option("--out", export_out, "Output file (directory for csv); standard output when omitted");
  exp->add_option("--template", tmpl, "Document template for md");
  exp->add_option("--styles", styles, "Style sheet for md");

  auto* gen = app.add_subcommand("gen", "Generate code from a specification");
  std::string gen_file, target, gen_out;
  LibOptions gen_libs;
  gen->add_option("file", gen_file, "Specification file")->required();
  gen->add_option("--target", target, "Generator")->required()->check(CLI::IsMember({"sql"}));
  gen->add_option("--out", gen_out, "Output file; standard output when omitted");
  gen_libs.add_to(gen);

  auto* lib = app.add_subcommand("lib", "Library catalogs");
  lib->require_subcommand(1);
  auto* lib_list = lib->add_subcommand("list", "List libraries on the search path");
  LibOptions list_libs;
  list_libs.add_to(lib_list);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*check) return cmd_check(check_files, config_file, format, check_libs.resolve(data));
  if (*import) return cmd_import(from, import_src, import_out, package);
  if (*exp) return cmd_export(export_file, to, export_out, tmpl, styles, data);
  if (*gen) return cmd_gen(gen_file, gen_out, gen_libs.resolve(data));
  if (*lib_list) return cmd_lib_list(list_libs.resolve(data));
  return kUsage;
}
