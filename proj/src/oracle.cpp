#include "spmx/oracle.hpp"

#include "xml_names.hpp"

namespace spmx {

namespace {

bool ws_only(std::string_view s) {
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\r' && c != '\n') return false;
  }
  return true;
}

class DocParser {
 public:
  explicit DocParser(std::string_view text) : text_(text) {}

  std::unique_ptr<DocNode> parse() {
    if (text_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    skip_misc(/*allow_doctype=*/true);
    if (pos_ >= text_.size() || text_[pos_] != '<') fail("no document element");
    auto root = parse_element();
    skip_misc(/*allow_doctype=*/false);
    if (pos_ != text_.size()) fail("content after the document element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw Error(ErrorCode::MalformedXml, what + " at offset " + std::to_string(pos_));
  }

  char peek(size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  bool starts_with(std::string_view p) const { return text_.compare(pos_, p.size(), p) == 0; }

  void skip_ws() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c != ' ' && c != '\t' && c != '\r' && c != '\n') return;
      ++pos_;
    }
  }

  void skip_to(std::string_view marker, const char* what) {
    const size_t found = text_.find(marker, pos_);
    if (found == std::string_view::npos) fail(std::string("unterminated ") + what);
    pos_ = found + marker.size();
  }

  void skip_misc(bool allow_doctype) {
    for (;;) {
      skip_ws();
      if (starts_with("<?")) {
        pos_ += 2;
        skip_to("?>", "processing instruction");
       continue;
      }
      if (starts_with("<!--")) {
        pos_ += 4;
        skip_to("-->", "comment");
        continue;
      }
      if (allow_doctype && starts_with("<!DOCTYPE")) {
        pos_ += 9;
        bool in_subset = false;
        for (; pos_ < text_.size(); ++pos_) {
          if (text_[pos_] == '[') in_subset = true;
          else if (text_[pos_] == ']') in_subset = false;
          else if (text_[pos_] == '>' && !in_subset) break;
        }
        if (pos_ >= text_.size()) fail("unterminated DOCTYPE");
        ++pos_;
        continue;
      }
      return;
    }
  }

  std::string read_name() {
    if (!names::is_start(peek())) fail("expected a name");
    const size_t start = pos_;
    while (pos_ < text_.size() && names::is_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void skip_attributes() {
    for (;;) {
      skip_ws();
      if (peek() == '>' || peek() == '/') return;
      if (pos_ >= text_.size()) fail("unterminated start tag");
      read_name();
      skip_ws();
      if (peek() != '=') fail("expected '=' in attribute");
      ++pos_;
      skip_ws();
      const char quote = peek();
      if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
      ++pos_;
      const size_t end = text_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      pos_ = end + 1;
    }
  }

  void decode_reference(std::string& out) {
    const size_t semi = text_.find(';', pos_ + 1);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail("unterminated reference");
    const std::string_view body = text_.substr(pos_ + 1, semi - pos_ - 1);
    if (!body.empty() && body[0] == '#') {
      uint32_t cp = 0;
      size_t i = 1;
      uint32_t base = 10;
      if (i < body.size() && (body[i] == 'x' || body[i] == 'X')) {
        base = 16;
        ++i;
      }
      if (i >= body.size()) fail("bad character reference");
      for (; i < body.size(); ++i) {
        const char c = body[i];
        uint32_t d;
        if (c >= '0' && c <= '9') d = static_cast<uint32_t>(c - '0');
        else if (base == 16 && c >= 'a' && c <= 'f') d = static_cast<uint32_t>(c - 'a' + 10);
        else if (base == 16 && c >= 'A' && c <= 'F') d = static_cast<uint32_t>(c - 'A' + 10);
        else fail("bad character reference");
        cp = cp * base + d;
        if (cp > 0x10FFFF) fail("character reference out of range");
      }
      if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) fail("invalid character reference");
      if (cp < 0x80) {
        out += static_cast<char>(cp);
      } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      }
    } else if (body == "amp") out += '&';
    else if (body == "lt") out += '<';
    else if (body == "gt") out += '>';
    else if (body == "apos") out += '\'';
    else if (body == "quot") out += '"';
    else fail("unsupported entity '&" + std::string(body) + ";'");
    pos_ = semi + 1;
  }

  std::unique_ptr<DocNode> parse_element() {
    ++pos_;  // '<'
    auto node = std::make_unique<DocNode>();
    node->name = read_name();
    skip_attributes();
    if (peek() == '/') {
      if (peek(1) != '>') fail("bad '/' in start tag");
      pos_ += 2;
      return node;
    }
    ++pos_;  // '>'

    std::string text;
    bool saw_text = false;
    for (;;) {
      const size_t run_end = text_.find_first_of("<&", pos_);
      if (run_end == std::string_view::npos) {
        fail("unexpected end of input inside <" + node->name + ">");
      }
      if (run_end > pos_) {
        text.append(text_, pos_, run_end - pos_);
        pos_ = run_end;
      }
      if (text_[pos_] == '&') {
        decode_reference(text);
        saw_text = true;
        continue;
      }
      if (starts_with("</")) {
        pos_ += 2;
        const std::string close = read_name();
        if (close != node->name) {
          fail("close tag </" + close + "> does not match <" + node->name + ">");
        }
        skip_ws();
        if (peek() != '>') fail("expected '>' in close tag");
        ++pos_;
        break;
      }
      if (starts_with("<!--")) {
        pos_ += 4;
        skip_to("-->", "comment");
        continue;
      }
      if (starts_with("<![CDATA[")) {
        pos_ += 9;
        const size_t end = text_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        text.append(text_, pos_, end - pos_);
        saw_text = true;
        pos_ = end + 3;
        continue;
      }
      if (starts_with("<?")) {
        pos_ += 2;
        skip_to("?>", "processing instruction");
        continue;
      }
      node->children.push_back(parse_element());
    }

    if (!node->children.empty()) {
      if (saw_text || !ws_only(text)) {
        fail("mixed content inside <" + node->name + ">");
      }
    } else if (saw_text || !text.empty()) {
      node->text = std::move(text);
    }
    return node;
  }

  std::string_view text_;
  size_t pos_ = 0;
};

void escape_into(std::string& out, std::string_view s) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
}

class DomEval {
 public:
  DomEval(const XsltProgram& program, const DtdTree& dtd) : program_(program), dtd_(dtd) {}

  std::string run(const DocNode& doc) {
    const TemplateRule& root_rule = program_.root_rule();
    apply_rule(root_rule, doc, /*at_root=*/true);
    return std::move(out_);
  }

 private:
  void apply_rule(const TemplateRule& rule, const DocNode& node, bool at_root) {
    for (const OutputItem& item : rule.items) {
      switch (item.kind) {
        case ItemKind::Const:
          out_ += item.text;
          break;
        case ItemKind::ValueOfSelf:
          if (node.text) escape_into(out_, *node.text);
          break;
        case ItemKind::Apply:
          apply_path(item, node, at_root);
          break;
      }
    }
  }

  void apply_path(const OutputItem& item, const DocNode& node, bool at_root) {
    size_t first = 0;
    if (at_root && item.select[0] == node.name) first = 1;

    std::vector<const DocNode*> current{&node};
    std::string_view parent_name = node.name;
    for (size_t s = first; s < item.select.size(); ++s) {
      const std::string& step = item.select[s];
      std::vector<const DocNode*> next;
      for (const DocNode* n : current) {
        for (const auto& child : n->children) {
          if (child->name == step) next.push_back(child.get());
        }
      }
      if (next.empty()) {
        const ElementDecl* parent_decl = dtd_.find(parent_name);
        const ChildRef* edge = parent_decl ? parent_decl->find_child(step) : nullptr;
        if (edge && edge->occurrence == Occurrence::One && !current.empty()) {
          throw Error(ErrorCode::PathMismatch,
                      "step '" + step + "' missing under '" + std::string(parent_name) +
                          "' although the DTD requires exactly one");
        }
      }
      current = std::move(next);
      parent_name = step;
    }

    for (const DocNode* target : current) {
      const TemplateRule* rule = program_.rule_for(target->name);
      if (!rule) {
        throw Error(ErrorCode::MissingRule, "no rule for element '" + target->name + "'");
      }
      apply_rule(*rule, *target, /*at_root=*/false);
    }
  }

  const XsltProgram& program_;
  const DtdTree& dtd_;
  std::string out_;
};

}  // namespace

uint64_t DocNode::footprint_bytes() const {
  uint64_t total = sizeof(DocNode);
  total += name.capacity();
  if (text) total += text->capacity();
  total += children.capacity() * sizeof(std::unique_ptr<DocNode>);
  for (const auto& c : children) total += c->footprint_bytes();
  return total;
}

std::unique_ptr<DocNode> parse_document(std::string_view xml) {
  return DocParser(xml).parse();
}

std::string transform_dom(const XsltProgram& program, const DtdTree& dtd, const DocNode& doc) {
  return DomEval(program, dtd).run(doc);
}

}  // namespace spmx
