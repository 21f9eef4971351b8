#include "spmx/stream.hpp"

#include <vector>

#include "spmx/scan.hpp"
#include "xml_names.hpp"

namespace spmx {

namespace {

constexpr size_t kChunk = 64 * 1024;

// Per-element dispatch entry, precomputed from the model once per transform.
struct Elem {
  std::string_view name;
  const EventActions* act = nullptr;
  bool leaf = false;
  std::vector<std::pair<std::string_view, const Elem*>> children;

  const Elem* child(std::string_view n) const {
    for (const auto& [cn, ce] : children) {
      if (cn == n) return ce;
    }
    return nullptr;
  }
};

class Emitter {
 public:
  Emitter(ByteSink& sink, bool flush_each_piece)
      : sink_(sink), flush_each_piece_(flush_each_piece) {}

  void emit(std::string_view s) {
    if (s.empty()) return;
    total_ += s.size();
    if (s.size() > max_fragment_) max_fragment_ = s.size();
    buf_.append(s);
    maybe_flush();
  }

  // Escapes & < > while copying; the escaped length counts as one fragment.
  void emit_escaped(std::string_view s) {
    size_t added = 0;
    size_t i = 0;
    while (i < s.size()) {
      const size_t run = scan::find_escape(s.data() + i, s.size() - i);
      buf_.append(s.data() + i, run);
      added += run;
      i += run;
      if (i < s.size()) {
        switch (s[i]) {
          case '&': buf_ += "&amp;"; added += 5; break;
          case '<': buf_ += "&lt;"; added += 4; break;
          default: buf_ += "&gt;"; added += 4; break;
        }
        ++i;
      }
    }
    total_ += added;
    if (added > max_fragment_) max_fragment_ = added;
    maybe_flush();
  }

  void flush() {
    if (!buf_.empty()) {
      sink_.write(buf_.data(), buf_.size());
      buf_.clear();
    }
  }

  uint64_t total() const { return total_; }
  uint64_t max_fragment() const { return max_fragment_; }

 private:
  void maybe_flush() {
    if (flush_each_piece_ || buf_.size() >= kChunk) flush();
  }

  ByteSink& sink_;
  std::string buf_;
  uint64_t total_ = 0;
  uint64_t max_fragment_ = 0;
  bool flush_each_piece_;
};

// Forward-only window over the source. The window never holds more than the
// unconsumed tail of one chunk plus one fresh chunk.
class Window {
 public:
  explicit Window(ByteSource& src) : src_(src) {}

  size_t avail() const { return buf_.size() - pos_; }
  const char* data() const { return buf_.data() + pos_; }
  char at(size_t i) const { return buf_[pos_ + i]; }
  void advance(size_t n) { pos_ += n; }
  uint64_t bytes_in() const { return bytes_in_; }
  uint64_t offset() const { return consumed_ + pos_; }

  // Grows the window until at least n bytes are available or input ends.
  bool ensure(size_t n) {
    while (avail() < n && !eof_) refill();
    return avail() >= n;
  }

  void refill() {
    if (pos_ == buf_.size()) {
      consumed_ += pos_;
      buf_.clear();
      pos_ = 0;
    } else if (pos_ >= kChunk) {
      consumed_ += pos_;
      buf_.erase(0, pos_);
      pos_ = 0;
    }
    const size_t old = buf_.size();
    buf_.resize(old + kChunk);
    const size_t got = src_.read(buf_.data() + old, kChunk);
    buf_.resize(old + got);
    bytes_in_ += got;
    if (got == 0) eof_ = true;
  }

 private:
  ByteSource& src_;
  std::string buf_;
  size_t pos_ = 0;
  uint64_t consumed_ = 0;
  uint64_t bytes_in_ = 0;
  bool eof_ = false;
};

enum class TextMode { Collect, Discard, WhitespaceOnly };

class StreamRun {
 public:
  StreamRun(const SpmModel& model, ByteSource& in, ByteSink& out, const StreamOptions* options)
      : model_(model), window_(in), emitter_(out, options && options->event_hook),
        options_(options) {
    build_table();
  }

  TransformStats run() {
    skip_prolog();
    parse_document_element();
    skip_trailing_misc();
    emitter_.flush();
    stats_.bytes_in = window_.bytes_in();
    stats_.bytes_out = emitter_.total();
    stats_.peak_aux_bytes = peak_core_ + emitter_.max_fragment();
    return stats_;
  }

 private:
  [[noreturn]] void malformed(const std::string& what) {
    throw Error(ErrorCode::MalformedXml,
                what + " at input offset " + std::to_string(window_.offset()));
  }

  [[noreturn]] void schema(const std::string& what) {
    throw Error(ErrorCode::SchemaViolation, what);
  }

  void build_table() {
    const auto& decls = model_.dtd().decls();
    elems_.resize(decls.size());
    for (size_t i = 0; i < decls.size(); ++i) {
      elems_[i].name = decls[i].name;
      elems_[i].act = &model_.actions(decls[i].name);
      elems_[i].leaf = decls[i].pcdata;
    }
    for (size_t i = 0; i < decls.size(); ++i) {
      for (const ChildRef& c : decls[i].children) {
        for (size_t k = 0; k < decls.size(); ++k) {
          if (decls[k].name == c.name) {
            elems_[i].children.emplace_back(elems_[k].name, &elems_[k]);
            break;
          }
        }
      }
      if (decls[i].name == model_.root()) root_ = &elems_[i];
    }
  }

  void note_aux() {
    const uint64_t now = stack_name_bytes_ + pcdata_.size();
    if (now > peak_core_) peak_core_ = now;
  }

  void fire_start(const Elem* e) {
    ++stats_.events;
    emitter_.emit(e->act->start);
    hook(EventKind::ElementStart, e->name);
  }

  void fire_end(const Elem* e) {
    ++stats_.events;
    if (e->leaf) {
      emitter_.emit(e->act->end_pre);
      if (e->act->emit_pcdata) emitter_.emit_escaped(pcdata_);
      emitter_.emit(e->act->end_post);
      pcdata_.clear();
    } else {
      emitter_.emit(e->act->end_post);
    }
    hook(EventKind::ElementEnd, e->name);
  }

  void hook(EventKind kind, std::string_view name) {
    if (options_ && options_->event_hook) {
      emitter_.flush();
      options_->event_hook(kind, name, emitter_.total());
    }
  }

  // --- low-level scanning -------------------------------------------------

  bool starts_with(std::string_view prefix) {
    if (!window_.ensure(prefix.size())) return false;
    return std::string_view(window_.data(), prefix.size()) == prefix;
  }

  // Consumes input until `marker` has been passed. Content before the marker
  // is handed to `text` chunk by chunk (may be null to skip it).
  template <typename ChunkFn>
  void consume_past(std::string_view marker, const char* what, ChunkFn&& text) {
    for (;;) {
      if (!window_.ensure(marker.size())) malformed(std::string("unterminated ") + what);
      const std::string_view w(window_.data(), window_.avail());
      const size_t found = w.find(marker);
      if (found != std::string_view::npos) {
        text(w.substr(0, found));
        window_.advance(found + marker.size());
        return;
      }
      const size_t keep = marker.size() - 1;
      const size_t eat = w.size() - keep;
      text(w.substr(0, eat));
      window_.advance(eat);
      window_.refill();
    }
  }

  void skip_past(std::string_view marker, const char* what) {
    consume_past(marker, what, [](std::string_view) {});
  }

  // Name starting at the current position; keeps it inside the window.
  std::string_view read_name() {
    if (!window_.ensure(1) || !names::is_start(window_.at(0))) {
      malformed("expected a name");
    }
    size_t len = 1;
    for (;;) {
      if (len == window_.avail() && !window_.ensure(len + 1)) break;
      if (len >= window_.avail() || !names::is_char(window_.at(len))) break;
      if (++len > 4096) malformed("name longer than 4096 bytes");
    }
    return std::string_view(window_.data(), len);
  }

  void skip_ws() {
    for (;;) {
      if (window_.avail() > 0) {
        const char c = window_.at(0);
        if (c != ' ' && c != '\t' && c != '\r' && c != '\n') return;
      }
      const size_t n = scan::find_non_space(window_.data(), window_.avail());
      window_.advance(n);
      if (window_.avail() > 0) return;
      if (!window_.ensure(1)) return;
    }
  }

  // Decodes one entity/character reference at '&' into out (appends).
  void decode_reference(std::string& out) {
    window_.advance(1);  // '&'
    size_t len = 0;
    for (;;) {
      if (len >= window_.avail() && !window_.ensure(len + 1)) {
        malformed("unterminated reference");
      }
      if (window_.at(len) == ';') break;
      if (++len > 12) malformed("unterminated reference");
    }
    const std::string_view body(window_.data(), len);
    if (!body.empty() && body[0] == '#') {
      uint32_t cp = 0;
      bool any = false;
      if (body.size() > 1 && (body[1] == 'x' || body[1] == 'X')) {
        for (char c : body.substr(2)) {
          uint32_t d;
          if (c >= '0' && c <= '9') d = static_cast<uint32_t>(c - '0');
          else if (c >= 'a' && c <= 'f') d = static_cast<uint32_t>(c - 'a' + 10);
          else if (c >= 'A' && c <= 'F') d = static_cast<uint32_t>(c - 'A' + 10);
          else malformed("bad character reference");
          cp = cp * 16 + d;
          any = true;
          if (cp > 0x10FFFF) malformed("character reference out of range");
        }
      } else {
        for (char c : body.substr(1)) {
          if (c < '0' || c > '9') malformed("bad character reference");
          cp = cp * 10 + static_cast<uint32_t>(c - '0');
          any = true;
          if (cp > 0x10FFFF) malformed("character reference out of range");
        }
      }
      if (!any || cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF)) {
        malformed("invalid character reference");
      }
      append_utf8(out, cp);
    } else if (body == "amp") out += '&';
    else if (body == "lt") out += '<';
    else if (body == "gt") out += '>';
    else if (body == "apos") out += '\'';
    else if (body == "quot") out += '"';
    else malformed("unsupported entity '&" + std::string(body) + ";'");
    window_.advance(len + 1);
  }

  static void append_utf8(std::string& out, uint32_t cp) {
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
  }

  // --- document structure -------------------------------------------------

  void skip_prolog() {
    if (starts_with("\xEF\xBB\xBF")) window_.advance(3);
    for (;;) {
      skip_ws();
      if (!window_.ensure(1)) malformed("no document element");
      if (window_.at(0) != '<') malformed("text before the document element");
      if (starts_with("<?")) {
        window_.advance(2);
        skip_past("?>", "processing instruction");
        continue;
      }
      if (starts_with("<!--")) {
        window_.advance(4);
        skip_past("-->", "comment");
        continue;
      }
      if (starts_with("<!DOCTYPE")) {
        skip_doctype();
        continue;
      }
      return;  // document element
    }
  }

  void skip_doctype() {
    window_.advance(9);
    // The internal subset may contain '>'; skip the [ ... ] block first.
    bool in_subset = false;
    for (;;) {
      if (!window_.ensure(1)) malformed("unterminated DOCTYPE");
      const char c = window_.at(0);
      window_.advance(1);
      if (c == '[') in_subset = true;
      else if (c == ']') in_subset = false;
      else if (c == '>' && !in_subset) return;
    }
  }

  void skip_trailing_misc() {
    for (;;) {
      skip_ws();
      if (!window_.ensure(1)) return;  // EOF
      if (starts_with("<!--")) {
        window_.advance(4);
        skip_past("-->", "comment");
        continue;
      }
      if (starts_with("<?")) {
        window_.advance(2);
        skip_past("?>", "processing instruction");
        continue;
      }
      malformed("content after the document element");
    }
  }

  // Parses a start tag at '<'; returns the element and whether it was
  // self-closing. Attributes are tolerated and skipped.
  std::pair<const Elem*, bool> parse_start_tag(const Elem* parent) {
    window_.advance(1);  // '<'
    const std::string_view name = read_name();
    const Elem* e;
    if (!parent) {
      if (name != root_->name) {
        schema("document element '" + std::string(name) + "' does not match model root '" +
               std::string(root_->name) + "'");
      }
      e = root_;
    } else {
      e = parent->child(name);
      if (!e) {
        if (model_.dtd().find(name)) {
          schema("element '" + std::string(name) + "' is not declared as a child of '" +
                 std::string(parent->name) + "'");
        }
        schema("element '" + std::string(name) + "' is not declared in the DTD");
      }
    }
    window_.advance(name.size());

    for (;;) {
      skip_ws();
      if (!window_.ensure(1)) malformed("unterminated start tag");
      const char c = window_.at(0);
      if (c == '>') {
        window_.advance(1);
        return {e, false};
      }
      if (c == '/') {
        if (!window_.ensure(2) || window_.at(1) != '>') malformed("bad '/' in start tag");
        window_.advance(2);
        return {e, true};
      }
      // attribute, skipped
      const std::string_view attr = read_name();
      window_.advance(attr.size());
      skip_ws();
      if (!window_.ensure(1) || window_.at(0) != '=') malformed("expected '=' in attribute");
      window_.advance(1);
      skip_ws();
      if (!window_.ensure(1)) malformed("unterminated attribute");
      const char quote = window_.at(0);
      if (quote != '"' && quote != '\'') malformed("expected quoted attribute value");
      window_.advance(1);
      for (;;) {
        const size_t f = scan::find_byte(window_.data(), window_.avail(), quote);
        if (f < window_.avail()) {
          window_.advance(f + 1);
          break;
        }
        window_.advance(window_.avail());
        if (!window_.ensure(1)) malformed("unterminated attribute value");
      }
    }
  }

  void handle_text_chunk(std::string_view chunk, TextMode mode) {
    if (chunk.empty()) return;
    switch (mode) {
      case TextMode::Collect:
        pcdata_.append(chunk);
        note_aux();
        break;
      case TextMode::Discard:
        break;
      case TextMode::WhitespaceOnly:
        if (scan::find_non_space(chunk.data(), chunk.size()) != chunk.size()) {
          schema("character data under element '" + std::string(stack_.back()->name) +
                 "', which has element content");
        }
        break;
    }
  }

  void parse_document_element() {
    auto [root, self_closing] = parse_start_tag(nullptr);
    open(root);
    if (self_closing) {
      close_top();
      return;
    }
    while (!stack_.empty()) {
      content_step();
    }
  }

  void open(const Elem* e) {
    fire_start(e);
    stack_.push_back(e);
    stack_name_bytes_ += e->name.size();
    note_aux();
  }

  void close_top() {
    const Elem* e = stack_.back();
    stack_.pop_back();
    stack_name_bytes_ -= e->name.size();
    fire_end(e);
  }

  TextMode current_mode() const {
    const Elem* top = stack_.back();
    if (!top->leaf) return TextMode::WhitespaceOnly;
    return top->act->emit_pcdata ? TextMode::Collect : TextMode::Discard;
  }

  // One step: a text run followed by one markup construct.
  void content_step() {
    const TextMode mode = current_mode();
    // text until '<' or '&'
    for (;;) {
      if (window_.avail() > 0) {
        const char c = window_.at(0);
        if (c == '<' || c == '&') break;
      }
      const size_t run = scan::find_markup(window_.data(), window_.avail());
      handle_text_chunk({window_.data(), run}, mode);
      window_.advance(run);
      if (window_.avail() > 0) break;
      if (!window_.ensure(1)) {
        malformed("unexpected end of input inside element '" +
                  std::string(stack_.back()->name) + "'");
      }
    }
    if (window_.at(0) == '&') {
      std::string decoded;
      decode_reference(decoded);
      if (mode == TextMode::WhitespaceOnly) {
        schema("character data under element '" + std::string(stack_.back()->name) +
               "', which has element content");
      }
      handle_text_chunk(decoded, mode);
      return;
    }
    // '<'
    if (!window_.ensure(2)) malformed("unexpected end of input after '<'");
    const char next = window_.at(1);
    if (next == '/') {
      window_.advance(2);
      const std::string_view name = read_name();
      if (name != stack_.back()->name) {
        malformed("close tag </" + std::string(name) + "> does not match open element '" +
                  std::string(stack_.back()->name) + "'");
      }
      window_.advance(name.size());
      skip_ws();
      if (!window_.ensure(1) || window_.at(0) != '>') malformed("expected '>' in close tag");
      window_.advance(1);
      close_top();
      return;
    }
    if (next == '!') {
      if (starts_with("<!--")) {
        window_.advance(4);
        skip_past("-->", "comment");
        return;
      }
      if (starts_with("<![CDATA[")) {
        window_.advance(9);
        consume_past("]]>", "CDATA section",
                     [&](std::string_view chunk) { handle_text_chunk(chunk, mode); });
        return;
      }
      malformed("unsupported markup declaration in content");
    }
    if (next == '?') {
      window_.advance(2);
      skip_past("?>", "processing instruction");
      return;
    }
    auto [e, self_closing] = parse_start_tag(stack_.back());
    open(e);
    if (self_closing) close_top();
  }

  const SpmModel& model_;
  Window window_;
  Emitter emitter_;
  const StreamOptions* options_;

  std::vector<Elem> elems_;
  const Elem* root_ = nullptr;

  std::vector<const Elem*> stack_;
  std::string pcdata_;
  uint64_t stack_name_bytes_ = 0;
  uint64_t peak_core_ = 0;
  TransformStats stats_;
};

}  // namespace

TransformStats transform_stream(const SpmModel& model, ByteSource& in, ByteSink& out,
                                const StreamOptions* options) {
  StreamRun run(model, in, out, options);
  return run.run();
}

}  // namespace spmx
