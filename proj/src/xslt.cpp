#include "spmx/xslt.hpp"

#include <utility>

#include "spmx/scan.hpp"
#include "xml_names.hpp"

namespace spmx {

namespace {

// Light XML reader for stylesheets. Keeps the raw source span of every tag
// and text node so literal result content can be reproduced exactly as
// written. Comments and processing instructions are skipped.
struct Node {
  enum class Kind { Element, Text };
  Kind kind = Kind::Text;

  // Element
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;  // decoded values
  std::vector<Node> children;
  std::string_view raw_start;  // "<name a='v'>" or "<name/>"
  std::string_view raw_end;    // "</name>", empty when self-closing
  bool self_closing = false;

  // Text
  std::string_view raw_text;  // as written, entities not decoded
};

class XmlReader {
 public:
  explicit XmlReader(std::string_view text) : text_(text) {}

  // Top-level node sequence (elements plus whitespace text).
  std::vector<Node> read_all() {
    skip_bom();
    std::vector<Node> tops;
    read_content(tops, /*close_name=*/std::string_view{});
    return tops;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw Error(ErrorCode::XsltSyntax, what + " at offset " + std::to_string(pos_));
  }

  void skip_bom() {
    if (text_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
  }

  char peek(size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  bool starts_with(std::string_view prefix) const {
    return text_.compare(pos_, prefix.size(), prefix) == 0;
  }

  void skip_until(std::string_view terminator, const char* what) {
    const size_t end = text_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
    pos_ = end + terminator.size();
  }

  std::string read_name() {
    const size_t start = pos_;
    if (!names::is_start(peek())) fail("expected a name");
    ++pos_;
    while (pos_ < text_.size() && (names::is_char(text_[pos_]) || text_[pos_] == ':')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void skip_ws() {
    pos_ += scan::find_non_space(text_.data() + pos_, text_.size() - pos_);
  }

  std::string decode_attr(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (size_t i = 0; i < raw.size();) {
      if (raw[i] != '&') {
        out += raw[i++];
        continue;
      }
      const size_t semi = raw.find(';', i + 1);
      if (semi == std::string_view::npos) fail("unterminated entity reference");
      const std::string_view ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "amp") out += '&';
      else if (ent == "lt") out += '<';
      else if (ent == "gt") out += '>';
      else if (ent == "apos") out += '\'';
      else if (ent == "quot") out += '"';
      else fail("unsupported entity '&" + std::string(ent) + ";' in attribute value");
      i = semi + 1;
    }
    return out;
  }

  Node read_element() {
    const size_t tag_start = pos_;
    ++pos_;  // '<'
    Node el;
    el.kind = Node::Kind::Element;
    el.name = read_name();
    for (;;) {
      skip_ws();
      if (peek() == '>') {
        ++pos_;
        el.raw_start = text_.substr(tag_start, pos_ - tag_start);
        break;
      }
      if (peek() == '/' && peek(1) == '>') {
        pos_ += 2;
        el.raw_start = text_.substr(tag_start, pos_ - tag_start);
        el.self_closing = true;
        return el;
      }
      if (pos_ >= text_.size()) fail("unterminated start tag");
      std::string attr_name = read_name();
      skip_ws();
      if (peek() != '=') fail("expected '=' after attribute name");
      ++pos_;
      skip_ws();
      const char quote = peek();
      if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
      ++pos_;
      const size_t vstart = pos_;
      pos_ += scan::find_byte(text_.data() + pos_, text_.size() - pos_, quote);
      if (pos_ >= text_.size()) fail("unterminated attribute value");
      el.attrs.emplace_back(std::move(attr_name),
                            decode_attr(text_.substr(vstart, pos_ - vstart)));
      ++pos_;  // closing quote
    }
    read_content(el.children, el.name);
    const size_t end_start = pos_;
    pos_ += 2;  // "</"
    const std::string close = read_name();
    if (close != el.name) {
      fail("mismatched close tag </" + close + "> for <" + el.name + ">");
    }
    skip_ws();
    if (peek() != '>') fail("expected '>' in close tag");
    ++pos_;
    el.raw_end = text_.substr(end_start, pos_ - end_start);
    return el;
  }

  // Reads until the close tag of `close_name` (or EOF at top level), leaving
  // the "</" unconsumed.
  void read_content(std::vector<Node>& out, std::string_view close_name) {
    for (;;) {
      const size_t run = scan::find_markup(text_.data() + pos_, text_.size() - pos_);
      if (run > 0) {
        Node text;
        text.kind = Node::Kind::Text;
        text.raw_text = text_.substr(pos_, run);
        out.push_back(std::move(text));
        pos_ += run;
      }
      if (pos_ >= text_.size()) {
        if (!close_name.empty()) fail("unexpected end of input inside <" + std::string(close_name) + ">");
        return;
      }
      if (text_[pos_] == '&') {
        // Raw entity text belongs to the surrounding text node.
        const size_t semi = text_.find(';', pos_);
        if (semi == std::string_view::npos) fail("unterminated entity reference");
        Node text;
        text.kind = Node::Kind::Text;
        text.raw_text = text_.substr(pos_, semi + 1 - pos_);
        out.push_back(std::move(text));
        pos_ = semi + 1;
        continue;
      }
      if (starts_with("</")) {
        if (close_name.empty()) fail("stray close tag at top level");
        return;
      }
      if (starts_with("<!--")) {
        pos_ += 4;
        skip_until("-->", "comment");
        continue;
      }
      if (starts_with("<![CDATA[")) {
        const size_t start = pos_;
        pos_ += 9;
        skip_until("]]>", "CDATA section");
        Node text;
        text.kind = Node::Kind::Text;
        text.raw_text = text_.substr(start, pos_ - start);
        out.push_back(std::move(text));
        continue;
      }
      if (starts_with("<!DOCTYPE")) {
        if (!close_name.empty()) fail("DOCTYPE inside an element");
        skip_until(">", "DOCTYPE");
        continue;
      }
      if (starts_with("<?")) {
        pos_ += 2;
        skip_until("?>", "processing instruction");
        continue;
      }
      if (peek() == '<' && !names::is_start(peek(1))) fail("malformed tag");
      out.push_back(read_element());
    }
  }

  std::string_view text_;
  size_t pos_ = 0;
};

bool is_ws_only(std::string_view s) {
  return scan::find_non_space(s.data(), s.size()) == s.size();
}

const std::string* find_attr(const Node& el, std::string_view name) {
  for (const auto& [k, v] : el.attrs) {
    if (k == name) return &v;
  }
  return nullptr;
}

[[noreturn]] void unsupported(const std::string& what) {
  throw Error(ErrorCode::UnsupportedConstruct, what);
}

std::vector<std::string> parse_select_path(const std::string& select, const MatchPattern& where) {
  std::vector<std::string> steps;
  size_t start = 0;
  while (start <= select.size()) {
    const size_t slash = select.find('/', start);
    const std::string step =
        select.substr(start, slash == std::string::npos ? std::string::npos : slash - start);
    if (!names::is_ncname(step)) {
      unsupported("select step '" + step + "' in rule match=\"" + where.to_string() +
                  "\" is not a child element name");
    }
    steps.push_back(step);
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  return steps;
}

class BodyBuilder {
 public:
  explicit BodyBuilder(const MatchPattern& pattern) : pattern_(pattern) {}

  std::vector<OutputItem> build(const std::vector<Node>& body) {
    walk(body);
    flush();
    return std::move(items_);
  }

 private:
  void flush() {
    if (!pending_.empty()) {
      items_.push_back(OutputItem::make_const(std::move(pending_)));
      pending_.clear();
    }
  }

  void walk(const std::vector<Node>& nodes) {
    for (const Node& n : nodes) {
      if (n.kind == Node::Kind::Text) {
        if (!is_ws_only(n.raw_text)) pending_ += n.raw_text;
        continue;
      }
      if (n.name.rfind("xsl:", 0) == 0) {
        instruction(n);
        continue;
      }
      // Literal result element, reproduced byte for byte.
      pending_ += n.raw_start;
      walk(n.children);
      pending_ += n.raw_end;
    }
  }

  void instruction(const Node& n) {
    if (n.name == "xsl:apply-templates") {
      if (!n.children.empty()) {
        unsupported("xsl:apply-templates content (xsl:sort etc.) in rule match=\"" +
                    pattern_.to_string() + "\"");
      }
      const std::string* select = find_attr(n, "select");
      if (!select) {
        unsupported("xsl:apply-templates without select in rule match=\"" +
                    pattern_.to_string() + "\"");
      }
      for (const auto& [k, v] : n.attrs) {
        if (k != "select") unsupported("xsl:apply-templates attribute '" + k + "'");
      }
      flush();
      items_.push_back(OutputItem::make_apply(parse_select_path(*select, pattern_)));
      return;
    }
    if (n.name == "xsl:value-of") {
      if (!n.children.empty()) unsupported("xsl:value-of with content");
      const std::string* select = find_attr(n, "select");
      if (!select || *select != ".") {
        unsupported("xsl:value-of supports only select=\".\" (rule match=\"" +
                    pattern_.to_string() + "\")");
      }
      for (const auto& [k, v] : n.attrs) {
        if (k != "select") unsupported("xsl:value-of attribute '" + k + "'");
      }
      flush();
      items_.push_back(OutputItem::value_of_self());
      return;
    }
    unsupported("instruction <" + n.name + ">");
  }

  const MatchPattern& pattern_;
  std::vector<OutputItem> items_;
  std::string pending_;
};

MatchPattern parse_match(const std::string& match) {
  if (match == "/") return {.is_root = true, .element = {}};
  if (names::is_ncname(match)) return {.is_root = false, .element = match};
  unsupported("match pattern \"" + match + "\" (only \"/\" and a single element name)");
}

TemplateRule parse_template(const Node& el) {
  const std::string* match = find_attr(el, "match");
  if (!match) {
    if (find_attr(el, "name")) unsupported("named templates");
    unsupported("xsl:template without match");
  }
  for (const auto& [k, v] : el.attrs) {
    if (k != "match") unsupported("xsl:template attribute '" + k + "'");
  }
  TemplateRule rule;
  rule.pattern = parse_match(*match);
  rule.items = BodyBuilder(rule.pattern).build(el.children);

  if (rule.has_value_of_self()) {
    // Leaf rules are limited to Const? ValueOfSelf Const? so they map onto
    // the end-event tri-tuple. Adjacent Consts are already merged, so with
    // one ValueOfSelf and no Apply a size cap is all that is left to check.
    size_t vos = 0, apply = 0;
    for (const auto& it : rule.items) {
      if (it.kind == ItemKind::ValueOfSelf) ++vos;
      if (it.kind == ItemKind::Apply) ++apply;
    }
    if (vos != 1 || apply != 0 || rule.items.size() > 3) {
      unsupported("rule match=\"" + rule.pattern.to_string() +
                  "\": xsl:value-of may only carry one leading and one trailing constant");
    }
  }
  return rule;
}

}  // namespace

const TemplateRule& XsltProgram::root_rule() const {
  for (const auto& r : rules) {
    if (r.pattern.is_root) return r;
  }
  throw Error(ErrorCode::UnsupportedConstruct, "stylesheet has no rule matching \"/\"");
}

const TemplateRule* XsltProgram::rule_for(std::string_view element) const {
  for (const auto& r : rules) {
    if (!r.pattern.is_root && r.pattern.element == element) return &r;
  }
  return nullptr;
}

XsltProgram parse_xslt(std::string_view text) {
  const std::vector<Node> tops = XmlReader(text).read_all();

  std::vector<const Node*> templates;
  auto collect = [&](const std::vector<Node>& nodes, bool inside_wrapper) {
    for (const Node& n : nodes) {
      if (n.kind == Node::Kind::Text) {
        if (!is_ws_only(n.raw_text)) {
          throw Error(ErrorCode::XsltSyntax, "stray text outside templates");
        }
        continue;
      }
      if (n.name == "xsl:template") {
        templates.push_back(&n);
        continue;
      }
      if (!inside_wrapper && (n.name == "xsl:stylesheet" || n.name == "xsl:transform")) {
        unsupported("nested " + n.name);
      }
      unsupported("top-level element <" + n.name + ">");
    }
  };

  const Node* wrapper = nullptr;
  size_t element_count = 0;
  for (const Node& n : tops) {
    if (n.kind == Node::Kind::Element) {
      ++element_count;
      wrapper = &n;
    }
  }
  if (element_count == 1 && wrapper &&
      (wrapper->name == "xsl:stylesheet" || wrapper->name == "xsl:transform")) {
    collect(wrapper->children, true);
  } else {
    collect(tops, false);
  }
  if (templates.empty()) {
    throw Error(ErrorCode::XsltSyntax, "no template rules found");
  }

  XsltProgram program;
  for (const Node* t : templates) {
    TemplateRule rule = parse_template(*t);
    for (const auto& existing : program.rules) {
      if (existing.pattern == rule.pattern) {
        throw Error(ErrorCode::DuplicateRule,
                    "two rules with pattern \"" + rule.pattern.to_string() + "\"");
      }
    }
    program.rules.push_back(std::move(rule));
  }

  size_t roots = 0;
  for (const auto& r : program.rules) {
    if (r.pattern.is_root) ++roots;
  }
  if (roots == 0) {
    unsupported("stylesheet has no rule matching \"/\"");
  }
  return program;
}

}  // namespace spmx
