#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tamcorr/corpus.hpp"

namespace tamcorr {

enum class FeatureKind { LeftOfOpenV, RightOfOpenV, LeftOfCloseV, SentenceFinal };

inline constexpr std::size_t kMaxLeftOrder = 5;
inline constexpr std::size_t kMaxRightOrder = 10;
inline constexpr std::size_t kMaxFeatures = kMaxLeftOrder + 2 * kMaxRightOrder + 1;  // 26

struct Feature {
  FeatureKind kind;
  std::vector<std::string> tokens;  // order == tokens.size()

  std::size_t order() const { return tokens.size(); }
  auto operator<=>(const Feature&) const = default;
};

inline char kind_code(FeatureKind k) {
  switch (k) {
    case FeatureKind::LeftOfOpenV: return 'L';
    case FeatureKind::RightOfOpenV: return 'R';
    case FeatureKind::LeftOfCloseV: return 'C';
    case FeatureKind::SentenceFinal: return 'F';
  }
  return '?';
}

/// Token separator inside keys: U+205E VERTICAL FOUR DOTS.
inline constexpr std::string_view kKeyTokenSep = "\xE2\x81\x9E";

/// "kind:order:tok⁞tok⁞...". A backslash or separator inside a token is
/// escaped with a backslash so the encoding stays injective.
inline std::string feature_key(const Feature& f) {
  std::string key;
  key += kind_code(f.kind);
  key += ':';
  key += std::to_string(f.order());
  key += ':';
  for (std::size_t i = 0; i < f.tokens.size(); ++i) {
    if (i) key += kKeyTokenSep;
    std::string_view tok = f.tokens[i];
    for (std::size_t p = 0; p < tok.size(); ++p) {
      if (tok[p] == '\\') {
        key += "\\\\";
      } else if (tok.substr(p).starts_with(kKeyTokenSep)) {
        key += '\\';
        key += kKeyTokenSep;
        p += kKeyTokenSep.size() - 1;
      } else {
        key += tok[p];
      }
    }
  }
  return key;
}

/// Merges a two-part verb phrase into one segment, deleting the tokens
/// between the end of the first part and the start of the second.
inline TaggedSentence normalize_split_verb(const TaggedSentence& s) {
  if (s.v_segments.size() != 2) return s;
  const Span first = s.v_segments[0];
  const Span second = s.v_segments[1];
  const std::size_t gap = second.begin - first.end;

  TaggedSentence out;
  out.tokens.reserve(s.tokens.size() - gap);
  out.tokens.insert(out.tokens.end(), s.tokens.begin(), s.tokens.begin() + first.end);
  out.tokens.insert(out.tokens.end(), s.tokens.begin() + second.begin, s.tokens.end());
  out.v_segments = {{first.begin, second.end - gap}};

  if (s.vj_segment) {
    Span vj = *s.vj_segment;
    auto shift = [&](std::size_t pos) {
      if (pos <= first.end) return pos;
      if (pos >= second.begin) return pos - gap;
      return first.end;
    };
    vj = {shift(vj.begin), shift(vj.end)};
    if (vj.size() > 0) out.vj_segment = vj;
  }
  out.raw = render_tagged(out.tokens, out.v_segments, out.vj_segment);
  return out;
}

/// Positional n-gram context of the main verb phrase. Windows that would
/// run past either end of the sentence are omitted, so the result holds at
/// most 26 features. Split phrases are normalized first.
inline std::vector<Feature> extract_features(const TaggedSentence& sentence) {
  const TaggedSentence s =
      sentence.v_segments.size() == 2 ? normalize_split_verb(sentence) : sentence;
  std::vector<Feature> out;
  if (s.v_segments.empty()) return out;
  const auto& tok = s.tokens;
  const std::size_t n = tok.size();
  const Span v = s.v_segments.front();

  auto slice = [&](std::size_t b, std::size_t e) {
    return std::vector<std::string>(tok.begin() + b, tok.begin() + e);
  };
  for (std::size_t k = 1; k <= kMaxLeftOrder && k <= v.begin; ++k)
    out.push_back({FeatureKind::LeftOfOpenV, slice(v.begin - k, v.begin)});
  for (std::size_t k = 1; k <= kMaxRightOrder && v.begin + k <= n; ++k)
    out.push_back({FeatureKind::RightOfOpenV, slice(v.begin, v.begin + k)});
  for (std::size_t k = 1; k <= kMaxRightOrder && k <= v.end; ++k)
    out.push_back({FeatureKind::LeftOfCloseV, slice(v.end - k, v.end)});
  if (n > 0) out.push_back({FeatureKind::SentenceFinal, slice(n - 1, n)});
  return out;
}

/// Sorted, de-duplicated feature keys for a sentence.
inline std::vector<std::string> feature_keys(const TaggedSentence& sentence) {
  std::vector<std::string> keys;
  for (const auto& f : extract_features(sentence)) keys.push_back(feature_key(f));
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

}  // namespace tamcorr
