#include <memory>

#include <json.hpp>

#include "element_view.hpp"
#include "rsl/transform.hpp"

namespace rsl {

namespace {

using Json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// ---- template syntax tree ----

struct Node {
  enum class Type { Text, Value, This, Style, Each, If } type = Type::Text;
  std::string text;  // literal text, path, or style id
  std::uint32_t line = 1;
  std::uint32_t col = 1;
  std::vector<Node> children;
};

Node text_node(std::string_view text) {
  Node n;
  n.text = std::string(text);
  return n;
}

struct Tag {
  std::size_t begin;  // offset of "{{"
  std::size_t end;    // offset after "}}"
  std::string_view inner;
  std::uint32_t line;
  std::uint32_t col;
};

bool is_block_tag(std::string_view inner) {
  return inner.starts_with("#each ") || inner.starts_with("#if ") || inner == "/each" || inner == "/if";
}

class TemplateParser {
 public:
  TemplateParser(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  std::optional<std::vector<Node>> run(Diagnostics& diags) {
    collect_tags(diags);
    if (has_errors(diags)) return std::nullopt;

    struct Frame {
      Node node;
      std::string closer;
    };
    std::vector<Frame> stack;
    stack.push_back(Frame{Node{}, ""});
    std::size_t pos = 0;
    for (const auto& tag : tags_) {
      auto [text_end, next] = standalone_bounds(tag);
      if (text_end > pos) {
        stack.back().node.children.push_back(text_node(text_.substr(pos, text_end - pos)));
      }
      pos = next;

      std::string_view inner = tag.inner;
      Node node;
      node.line = tag.line;
      node.col = tag.col;
      if (inner.starts_with("#each ") || inner.starts_with("#if ")) {
        bool each = inner.starts_with("#each ");
        node.type = each ? Node::Type::Each : Node::Type::If;
        node.text = std::string(trim(inner.substr(each ? 6 : 4)));
        if (node.text.empty()) {
          diags.push_back(error(Code::T032_UnbalancedTags, tag, "block tag without a name"));
          return std::nullopt;
        }
        stack.push_back(Frame{std::move(node), each ? "/each" : "/if"});
      } else if (inner == "/each" || inner == "/if") {
        if (stack.size() == 1 || stack.back().closer != inner) {
          std::string expected = stack.size() == 1 ? "no open block" : "{{" + stack.back().closer + "}}";
          diags.push_back(
              error(Code::T032_UnbalancedTags, tag, "unexpected {{" + std::string(inner) + "}}; expected " + expected));
          return std::nullopt;
        }
        Node done = std::move(stack.back().node);
        stack.pop_back();
        stack.back().node.children.push_back(std::move(done));
      } else if (inner.starts_with("style:")) {
        node.type = Node::Type::Style;
        node.text = std::string(trim(inner.substr(6)));
        stack.back().node.children.push_back(std::move(node));
      } else if (inner == "this") {
        node.type = Node::Type::This;
        stack.back().node.children.push_back(std::move(node));
      } else if (inner.empty() || inner.front() == '#' || inner.front() == '/') {
        diags.push_back(error(Code::T032_UnbalancedTags, tag, "unrecognized tag {{" + std::string(inner) + "}}"));
        return std::nullopt;
      } else {
        node.type = Node::Type::Value;
        node.text = std::string(inner);
        stack.back().node.children.push_back(std::move(node));
      }
    }
    if (stack.size() > 1) {
      const Node& open = stack.back().node;
      diags.push_back(Diagnostic::make(Code::T032_UnbalancedTags, span(open.line, open.col, 0),
                                       "block '" + open.text + "' is never closed with {{" + stack.back().closer +
                                           "}}"));
      return std::nullopt;
    }
    if (pos < text_.size()) {
      stack.back().node.children.push_back(text_node(text_.substr(pos)));
    }
    return std::move(stack.back().node.children);
  }

 private:
  SourceSpan span(std::uint32_t line, std::uint32_t col, std::size_t width) const {
    return SourceSpan{file_, line, col, line, static_cast<std::uint32_t>(col + width)};
  }

  Diagnostic error(Code code, const Tag& tag, std::string message) const {
    return Diagnostic::make(code, span(tag.line, tag.col, tag.end - tag.begin), std::move(message));
  }

  void collect_tags(Diagnostics& diags) {
    std::uint32_t line = 1;
    std::size_t line_start = 0;
    std::size_t i = 0;
    while (i < text_.size()) {
      if (text_[i] == '\n') {
        ++line;
        line_start = ++i;
        continue;
      }
      if (text_.compare(i, 2, "{{") != 0) {
        ++i;
        continue;
      }
      auto close = text_.find("}}", i + 2);
      auto newline = text_.find('\n', i + 2);
      auto col = static_cast<std::uint32_t>(i - line_start + 1);
      if (close == std::string_view::npos || newline < close) {
        diags.push_back(Diagnostic::make(Code::T032_UnbalancedTags, span(line, col, 2), "'{{' without a closing '}}'"));
        return;
      }
      tags_.push_back(Tag{i, close + 2, trim(text_.substr(i + 2, close - i - 2)), line, col});
      i = close + 2;
    }
  }

  // A block tag alone on its line swallows that line, indentation and newline included.
  std::pair<std::size_t, std::size_t> standalone_bounds(const Tag& tag) const {
    if (!is_block_tag(tag.inner)) return {tag.begin, tag.end};
    std::size_t start = tag.begin;
    while (start > 0 && (text_[start - 1] == ' ' || text_[start - 1] == '\t')) --start;
    if (start > 0 && text_[start - 1] != '\n') return {tag.begin, tag.end};
    std::size_t stop = tag.end;
    while (stop < text_.size() && (text_[stop] == ' ' || text_[stop] == '\t')) ++stop;
    if (stop < text_.size() && text_[stop] == '\r') ++stop;
    if (stop < text_.size() && text_[stop] != '\n') return {tag.begin, tag.end};
    if (stop < text_.size()) ++stop;
    return {start, stop};
  }

  std::string_view text_;
  std::string file_;
  std::vector<Tag> tags_;
};

// ---- rendering ----

std::string scalar_text(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  if (v.is_array()) {
    std::string out;
    for (const auto& item : v) {
      if (!out.empty()) out += ", ";
      if (item.is_object()) {
        out += item.contains("id") ? scalar_text(item["id"]) : scalar_text(item.value("name", Json()));
      } else {
        out += scalar_text(item);
      }
    }
    return out;
  }
  if (v.contains("id")) return scalar_text(v["id"]);
  return v.value("name", std::string());
}

bool truthy(const Json& v) {
  if (v.is_null()) return false;
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string() || v.is_array() || v.is_object()) return !v.empty();
  return true;
}

std::string fill_style(std::string_view text, const Json& view) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto open = text.find("{{", pos);
    auto close = open == std::string_view::npos ? open : text.find("}}", open + 2);
    if (close == std::string_view::npos) {
      out += text.substr(pos);
      break;
    }
    out += text.substr(pos, open - pos);
    std::string name(trim(text.substr(open + 2, close - open - 2)));
    if (view.contains(name)) out += scalar_text(view[name]);
    pos = close + 2;
  }
  return out;
}

class Renderer {
 public:
  Renderer(const std::vector<LinguisticStyle>& styles, std::string file, Diagnostics& diags)
      : styles_(styles), file_(std::move(file)), diags_(diags) {}

  void render(const std::vector<Node>& nodes, std::vector<const Json*>& scopes, std::string& out) {
    for (const auto& n : nodes) {
      switch (n.type) {
        case Node::Type::Text:
          out += n.text;
          break;
        case Node::Type::Value:
          if (const Json* v = lookup(n, scopes)) {
            if (v->is_object()) {
              fail(Code::T030_UnknownPath, n, "'" + n.text + "' names a record; use {{#each}} or a field path");
            } else {
              out += scalar_text(*v);
            }
          }
          break;
        case Node::Type::This: {
          const Json& cur = *scopes.back();
          if (cur.is_object()) {
            fail(Code::T030_UnknownPath, n, "{{this}} used where the current item is a record");
          } else {
            out += scalar_text(cur);
          }
          break;
        }
        case Node::Type::Style:
          style(n, *scopes.back(), out);
          break;
        case Node::Type::If:
          if (const Json* v = lookup(n, scopes); v && truthy(*v)) render(n.children, scopes, out);
          break;
        case Node::Type::Each: {
          const Json* v = lookup(n, scopes);
          if (!v) break;
          if (v->is_null()) break;
          if (!v->is_array()) {
            fail(Code::T030_UnknownPath, n, "'" + n.text + "' is not a list");
            break;
          }
          for (const auto& item : *v) {
            scopes.push_back(&item);
            render(n.children, scopes, out);
            scopes.pop_back();
          }
          break;
        }
      }
    }
  }

 private:
  void fail(Code code, const Node& n, std::string message) {
    diags_.push_back(Diagnostic::make(code, SourceSpan{file_, n.line, n.col, n.line, n.col + 2}, std::move(message)));
  }

  const Json* lookup(const Node& n, const std::vector<const Json*>& scopes) {
    std::string_view path = n.text;
    auto dot = path.find('.');
    std::string head(path.substr(0, dot));
    const Json* v = nullptr;
    for (auto it = scopes.rbegin(); it != scopes.rend() && !v; ++it) {
      if ((*it)->is_object()) {
        auto found = (*it)->find(head);
        if (found != (*it)->end()) v = &*found;
      }
    }
    while (v && dot != std::string_view::npos) {
      path.remove_prefix(dot + 1);
      dot = path.find('.');
      std::string seg(path.substr(0, dot));
      if (!v->is_object() || !v->contains(seg)) {
        v = nullptr;
        break;
      }
      v = &(*v)[seg];
    }
    if (!v) fail(Code::T030_UnknownPath, n, "unknown path '" + n.text + "'");
    return v;
  }

  void style(const Node& n, const Json& current, std::string& out) {
    auto it = std::find_if(styles_.begin(), styles_.end(), [&](const auto& s) { return s.style_id == n.text; });
    if (it == styles_.end()) {
      fail(Code::T031_UnknownStyle, n, "unknown style '" + n.text + "'");
      return;
    }
    if (!current.is_object() || !current.contains("element_kind")) {
      fail(Code::T031_UnknownStyle, n, "style '" + n.text + "' used outside an element block");
      return;
    }
    if (current["element_kind"] != to_string(it->pattern)) {
      fail(Code::T031_UnknownStyle, n,
           "style '" + n.text + "' renders " + std::string(to_string(it->pattern)) + " elements, not " +
               current["element_kind"].get<std::string>());
      return;
    }
    out += fill_style(it->template_text, current);
  }

  const std::vector<LinguisticStyle>& styles_;
  std::string file_;
  Diagnostics& diags_;

};

}  // namespace

Outcome<std::vector<LinguisticStyle>> parse_styles(std::string_view text, std::string_view file) {
  std::vector<LinguisticStyle> styles;
  Diagnostics diags;
  auto at = [&](std::uint32_t line) { return SourceSpan{std::string(file), line, 1, line, 1}; };

  struct Block {
    std::optional<std::string> id, kind, tmpl;
    std::uint32_t line = 0;
  } block;

  auto flush = [&] {
    if (block.line == 0) return;
    if (!block.id || !block.kind || !block.tmpl) {
      diags.push_back(Diagnostic::make(Code::T012_MalformedDocument, at(block.line),
                                       "style block needs 'style', 'kind' and 'template' lines"));
    } else if (auto kind = element_kind_from_string(*block.kind); !kind) {
      diags.push_back(Diagnostic::make(Code::T012_MalformedDocument, at(block.line),
                                       "unknown element kind '" + *block.kind + "'"));
    } else if (std::any_of(styles.begin(), styles.end(), [&](const auto& s) { return s.style_id == *block.id; })) {
      diags.push_back(
          Diagnostic::make(Code::T012_MalformedDocument, at(block.line), "duplicate style id '" + *block.id + "'"));
    } else {
      LinguisticStyle style{*block.id, *kind, *block.tmpl};
      auto unknown = unknown_style_placeholders(style);
      for (const auto& name : unknown) {
        diags.push_back(Diagnostic::make(Code::T031_UnknownStyle, at(block.line),
                                         "style '" + style.style_id + "' uses '" + name + "', which " +
                                             std::string(to_string(style.pattern)) + " lacks"));
      }
      if (unknown.empty()) styles.push_back(std::move(style));
    }
    block = Block{};
  };

  std::uint32_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::string_view content = trim(line);
    if (content.empty()) {
      flush();
      continue;
    }
    if (content.front() == '#') continue;
    auto space = content.find(' ');
    std::string_view key = content.substr(0, space);
    std::string value(space == std::string_view::npos ? std::string_view{} : trim(content.substr(space + 1)));
    if (block.line == 0) block.line = line_no;
    std::optional<std::string>* slot = key == "style"      ? &block.id
                                       : key == "kind"     ? &block.kind
                                       : key == "template" ? &block.tmpl
                                                           : nullptr;
    if (!slot || slot->has_value() || value.empty()) {
      diags.push_back(Diagnostic::make(Code::T012_MalformedDocument, at(line_no),
                                       "expected one 'style', 'kind' or 'template' line, got '" + std::string(key) +
                                           "'"));
      continue;
    }
    *slot = std::move(value);
  }
  flush();
  if (has_errors(diags)) return {std::nullopt, std::move(diags)};
  return {std::move(styles), std::move(diags)};
}

Outcome<std::string> render_style(const Element& e, const LinguisticStyle& style) {
  if (e.kind() != style.pattern) {
    return {std::nullopt,
            {Diagnostic::make(Code::T031_UnknownStyle, e.span == SourceSpan{} ? std::nullopt : std::optional(e.span),
                              "style '" + style.style_id + "' renders " + std::string(to_string(style.pattern)) +
                                  " elements, not " + std::string(to_string(e.kind())))}};
  }
  return {fill_style(style.template_text, detail::element_view(e)), {}};
}

Outcome<std::string> render_document(const SpecificationModel& model, std::string_view template_text,
                                     const std::vector<LinguisticStyle>& styles, std::string_view template_file) {
  Diagnostics diags;
  auto nodes = TemplateParser(template_text, std::string(template_file)).run(diags);
  if (!nodes) return {std::nullopt, std::move(diags)};

  Json top;
  top["package"] = model.package_name.str();
  Json imports = Json::array();
  for (const auto& imp : model.imports) {
    imports.push_back(Json{{"target", imp.target.str()}, {"alias", imp.alias ? Json(*imp.alias) : Json(nullptr)}});
  }
  top["imports"] = std::move(imports);
  for (auto kind : kAllElementKinds) top[std::string(to_string(kind))] = Json::array();
  for (const auto& e : model.elements) top[std::string(to_string(e.kind()))].push_back(detail::element_view(e));

  std::string out;
  std::vector<const Json*> scopes{&top};
  Renderer(styles, std::string(template_file), diags).render(*nodes, scopes, out);
  if (has_errors(diags)) return {std::nullopt, std::move(diags)};
  return {std::move(out), std::move(diags)};
}

}  // namespace rsl
