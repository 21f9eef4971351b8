#include "spmx/gen.hpp"

#include <random>

namespace spmx {

namespace {

// No '<', '&' or '>' so escaping stays out of the benchmark path.
constexpr std::string_view kTextAlphabet =
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,:;-_()";

class Generator {
 public:
  Generator(const DtdTree& dtd, const GenConfig& config, ByteSink& out)
      : dtd_(dtd), config_(config), out_(out), rng_(config.seed) {
    find_spine(dtd_.decl(dtd_.root()));
  }

  uint64_t run() {
    emit_element(dtd_.decl(dtd_.root()));
    flush();
    return written_;
  }

 private:
  // First Star edge in document order; that edge alone keeps repeating until
  // the byte target is met.
  void find_spine(const ElementDecl& decl) {
    for (const ChildRef& c : decl.children) {
      if (c.occurrence == Occurrence::Star) {
        spine_ = &c;
        return;
      }
      find_spine(dtd_.decl(c.name));
      if (spine_) return;
    }
  }

  void write(std::string_view s) {
    buf_.append(s);
    written_ += s.size();
    if (buf_.size() >= 64 * 1024) flush();
  }

  void flush() {
    if (!buf_.empty()) {
      out_.write(buf_.data(), buf_.size());
      buf_.clear();
    }
  }

  uint64_t star_count() {
    // Geometric with mean star_fanout (support includes 0).
    const double p = 1.0 / (1.0 + static_cast<double>(config_.star_fanout));
    std::geometric_distribution<uint64_t> dist(p);
    return dist(rng_);
  }

  void emit_text() {
    const uint32_t mean = std::max<uint32_t>(config_.text_len, 1);
    std::uniform_int_distribution<uint32_t> len_dist(1, 2 * mean - 1);
    std::uniform_int_distribution<size_t> char_dist(0, kTextAlphabet.size() - 1);
    const uint32_t len = len_dist(rng_);
    std::string text;
    text.reserve(len);
    for (uint32_t i = 0; i < len; ++i) {
      text += kTextAlphabet[char_dist(rng_)];
    }
    write(text);
  }

  void emit_element(const ElementDecl& decl) {
    write("<");
    write(decl.name);
    write(">");
    if (decl.pcdata) {
      emit_text();
    } else {
      for (const ChildRef& c : decl.children) {
        const ElementDecl& child = dtd_.decl(c.name);
        if (c.occurrence == Occurrence::One) {
          emit_element(child);
          continue;
        }
        const uint64_t sampled = star_count();
        for (uint64_t k = 0;; ++k) {
          if (k >= sampled && !(&c == spine_ && written_ < config_.target_bytes)) break;
          emit_element(child);
        }
      }
    }
    write("</");
    write(decl.name);
    write(">");
  }

  const DtdTree& dtd_;
  const GenConfig& config_;
  ByteSink& out_;
  std::mt19937_64 rng_;
  std::string buf_;
  uint64_t written_ = 0;
  const ChildRef* spine_ = nullptr;
};

}  // namespace

uint64_t generate(const DtdTree& dtd, const GenConfig& config, ByteSink& out) {
  Generator gen(dtd, config, out);
  return gen.run();
}

}  // namespace spmx
