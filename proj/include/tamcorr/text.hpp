#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

namespace tamcorr {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline bool is_blank(std::string_view line) {
  for (unsigned char c : line)
    if (!std::isspace(c)) return false;
  return true;
}

inline bool is_ascii_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }
inline bool is_ascii_space(unsigned char c) { return c < 0x80 && std::isspace(c); }

struct ByteRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const ByteRange&) const = default;
};

/// Appends the tokens of `text` to `tokens`, and their byte ranges shifted
/// by `base` to `ranges`.
inline void tokenize_into(std::string_view text, std::size_t base,
                          std::vector<std::string>& tokens, std::vector<ByteRange>& ranges) {
  std::size_t start = 0;
  bool in_word = false;
  auto flush = [&](std::size_t end) {
    if (in_word) {
      tokens.emplace_back(text.substr(start, end - start));
      ranges.push_back({base + start, base + end});
      in_word = false;
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    auto c = static_cast<unsigned char>(text[i]);
    if (is_ascii_space(c)) {
      flush(i);
    } else if (is_ascii_punct(c)) {
      flush(i);
      tokens.emplace_back(1, text[i]);
      ranges.push_back({base + i, base + i + 1});
    } else if (!in_word) {
      in_word = true;
      start = i;
    }
  }
  flush(text.size());
}

/// Word-level tokenizer: maximal runs of non-space, non-punctuation bytes,
/// with every ASCII punctuation character as its own token. Bytes >= 0x80
/// count as word characters.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::vector<ByteRange> ranges;
  tokenize_into(text, 0, tokens, ranges);
  return tokens;
}

/// Shortest decimal form that round-trips a double.
inline std::string format_double(double v) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Shortlex order: shorter first, then bytewise. Orders "e9" before "e10".
inline bool shortlex_less(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace tamcorr
