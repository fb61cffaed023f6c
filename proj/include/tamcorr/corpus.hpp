#pragma once

#include <istream>
#include <iterator>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tamcorr/taxonomy.hpp"
#include "tamcorr/text.hpp"

namespace tamcorr {

/// Half-open range of token indices.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

struct TaggedSentence {
  std::vector<std::string> tokens;  // tag markup excluded
  std::vector<Span> v_segments;     // one, or two for a split verb phrase
  std::optional<Span> vj_segment;
  std::string raw;

  bool operator==(const TaggedSentence&) const = default;
};

struct Example {
  std::string id;
  std::size_t line = 0;  // 1-based line of the symbol line
  std::string japanese;
  TaggedSentence english;
  LabelIndex v_category = 0;
  std::optional<LabelIndex> vj_category;

  // Layout, kept so unchanged records serialize byte-identically.
  bool has_separator = true;  // a space follows the symbol field
  std::string preamble;       // blank lines preceding the record, verbatim

  bool operator==(const Example&) const = default;
};

struct Corpus {
  std::vector<Example> examples;
  std::string trailer;  // blank lines after the last record
  bool final_newline = true;

  bool operator==(const Corpus&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string record_id, std::size_t line, const std::string& what)
      : std::runtime_error(what), record_id_(std::move(record_id)), line_(line) {}
  const std::string& record_id() const { return record_id_; }
  std::size_t line() const { return line_; }

 private:
  std::string record_id_;
  std::size_t line_;
};

struct CategoryPair {
  LabelIndex v;
  std::optional<LabelIndex> vj;
};

/// Resolves a symbol field. "x,y" splits into the `<v>` and `<vj>`
/// categories; an empty (sub)string is the present tense.
inline CategoryPair parse_category_symbol(std::string_view field, const Taxonomy& taxonomy,
                                          const std::string& record_id = {},
                                          std::size_t line = 0) {
  auto resolve = [&](std::string_view sym) {
    auto idx = taxonomy.find_symbol(sym);
    if (!idx)
      throw ParseError(record_id, line,
                       "record " + record_id + ": unknown category symbol '" + std::string(sym) +
                           "'");
    return *idx;
  };
  auto comma = field.find(',');
  if (comma == std::string_view::npos) return {resolve(field), std::nullopt};
  return {resolve(field.substr(0, comma)), resolve(field.substr(comma + 1))};
}

inline std::string category_symbol_field(const Taxonomy& taxonomy, LabelIndex v,
                                         std::optional<LabelIndex> vj) {
  std::string field = taxonomy[v].symbol;
  if (vj) field += "," + taxonomy[*vj].symbol;
  return field;
}

/// Token-level view of a tagged English line, with byte offsets into the
/// tag-free text.
struct ScannedLine {
  std::string plain;
  std::vector<std::string> tokens;
  std::vector<ByteRange> token_bytes;
  std::vector<Span> v_segments;
  std::vector<Span> vj_segments;
};

/// Splits out `<v>`, `</v>`, `<vj>`, `</vj>`. Throws std::invalid_argument
/// on unbalanced, nested or empty segments.
inline ScannedLine scan_tagged_line(std::string_view raw) {
  ScannedLine out;
  enum class Open { None, V, VJ } open = Open::None;
  std::size_t open_at = 0;
  std::size_t pos = 0;
  std::string chunk;
  auto flush = [&] {
    tokenize_into(chunk, out.plain.size(), out.tokens, out.token_bytes);
    out.plain += chunk;
    chunk.clear();
  };
  while (pos < raw.size()) {
    std::string_view rest = raw.substr(pos);
    int tag = -1;
    static constexpr std::string_view tags[] = {"<v>", "</v>", "<vj>", "</vj>"};
    for (int t = 0; t < 4; ++t)
      if (rest.starts_with(tags[t])) tag = t;
    if (tag < 0) {
      chunk.push_back(raw[pos++]);
      continue;
    }
    flush();
    pos += tags[tag].size();
    switch (tag) {
      case 0:
      case 2:
        if (open != Open::None)
          throw std::invalid_argument(std::string("tag ") + std::string(tags[tag]) +
                                      " opened inside another segment");
        open = tag == 0 ? Open::V : Open::VJ;
        open_at = out.tokens.size();
        break;
      case 1:
      case 3: {
        Open want = tag == 1 ? Open::V : Open::VJ;
        if (open != want)
          throw std::invalid_argument(std::string("unexpected closing tag ") +
                                      std::string(tags[tag]));
        if (out.tokens.size() == open_at)
          throw std::invalid_argument(std::string("empty segment closed by ") +
                                      std::string(tags[tag]));
        (want == Open::V ? out.v_segments : out.vj_segments)
            .push_back({open_at, out.tokens.size()});
        open = Open::None;
        break;
      }
    }
  }
  flush();
  if (open != Open::None) throw std::invalid_argument("unclosed segment at end of line");
  return out;
}

inline TaggedSentence parse_tagged_sentence(std::string_view raw) {
  auto scan = scan_tagged_line(raw);
  if (scan.v_segments.empty()) throw std::invalid_argument("no <v> segment");
  if (scan.v_segments.size() > 2)
    throw std::invalid_argument("more than two <v> segments (" +
                                std::to_string(scan.v_segments.size()) + ")");
  if (scan.vj_segments.size() > 1) throw std::invalid_argument("more than one <vj> segment");
  TaggedSentence s;
  s.tokens = std::move(scan.tokens);
  s.v_segments = std::move(scan.v_segments);
  if (!scan.vj_segments.empty()) s.vj_segment = scan.vj_segments.front();
  s.raw = std::string(raw);
  return s;
}

/// Renders tokens separated by single spaces with segment markup.
inline std::string render_tagged(const std::vector<std::string>& tokens,
                                 const std::vector<Span>& v_segments,
                                 const std::optional<Span>& vj_segment) {
  std::string out;
  auto opens_at = [&](std::size_t i) -> std::string_view {
    for (const auto& s : v_segments)
      if (s.begin == i) return "<v>";
    if (vj_segment && vj_segment->begin == i) return "<vj>";
    return {};
  };
  auto closes_at = [&](std::size_t i) -> std::string_view {
    for (const auto& s : v_segments)
      if (s.end == i) return "</v>";
    if (vj_segment && vj_segment->end == i) return "</vj>";
    return {};
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += opens_at(i);
    out += tokens[i];
    out += closes_at(i + 1);
  }
  return out;
}

/// Parses one record: the symbol line (symbol field, space, Japanese) and
/// the tagged English line.
inline Example parse_example(std::string_view symbol_line, std::string_view english_line,
                             const Taxonomy& taxonomy, std::string id = "e1",
                             std::size_t line = 1) {
  Example e;
  e.id = std::move(id);
  e.line = line;
  auto space = symbol_line.find(' ');
  std::string_view field = symbol_line.substr(0, space);
  if (space == std::string_view::npos) {
    e.has_separator = false;
  } else {
    e.japanese = std::string(symbol_line.substr(space + 1));
  }
  auto cats = parse_category_symbol(field, taxonomy, e.id, line);
  e.v_category = cats.v;
  e.vj_category = cats.vj;
  try {
    e.english = parse_tagged_sentence(english_line);
  } catch (const std::invalid_argument& err) {
    throw ParseError(e.id, line + 1, "record " + e.id + ": " + err.what());
  }
  if (e.vj_category.has_value() != e.english.vj_segment.has_value())
    throw ParseError(e.id, line,
                     "record " + e.id +
                         (e.vj_category ? ": symbol has a <vj> category but the sentence has no "
                                          "<vj> segment"
                                        : ": sentence has a <vj> segment but the symbol has no "
                                          "<vj> category"));
  return e;
}

inline std::string serialize_example(const Example& e, const Taxonomy& taxonomy) {
  std::string out = category_symbol_field(taxonomy, e.v_category, e.vj_category);
  if (e.has_separator) {
    out += ' ';
    out += e.japanese;
  }
  out += '\n';
  out += e.english.raw;
  out += '\n';
  return out;
}

inline std::string serialize_corpus(const Corpus& corpus, const Taxonomy& taxonomy) {
  std::string out;
  for (const auto& e : corpus.examples) {
    out += e.preamble;
    out += serialize_example(e, taxonomy);
  }
  out += corpus.trailer;
  if (!corpus.final_newline && !out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

struct Diagnostic {
  std::string record_id;
  std::size_t line = 0;
  std::string message;
};

struct LoadResult {
  Corpus corpus;
  std::vector<Diagnostic> errors;
  std::size_t record_count = 0;
  std::size_t dropped_untaggable = 0;
};

/// Loads every parseable record in order. Per-record problems are
/// collected, not thrown. Record ids are "e<n>" by position in the file,
/// so they are stable whether or not untaggable records are dropped.
inline LoadResult load_corpus_text(std::string_view text, const Taxonomy& taxonomy,
                                   bool exclude_untaggable) {
  LoadResult result;
  std::vector<std::string_view> lines = split(text, '\n');
  result.corpus.final_newline = text.empty() || text.back() == '\n';
  if (!text.empty() && text.back() == '\n') lines.pop_back();
  if (text.empty()) lines.clear();

  std::string preamble;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (is_blank(lines[i])) {
      preamble += lines[i];
      preamble += '\n';
      ++i;
      continue;
    }
    ++result.record_count;
    std::string id = "e" + std::to_string(result.record_count);
    std::size_t lineno = i + 1;
    if (i + 1 >= lines.size() || is_blank(lines[i + 1])) {
      result.errors.push_back({id, lineno, "record " + id + ": missing English line"});
      preamble.clear();
      ++i;
      continue;
    }
    try {
      Example e = parse_example(lines[i], lines[i + 1], taxonomy, id, lineno);
      if (exclude_untaggable && taxonomy[e.v_category].group == CategoryGroup::Untaggable) {
        ++result.dropped_untaggable;
      } else {
        e.preamble = std::move(preamble);
        result.corpus.examples.push_back(std::move(e));
      }
    } catch (const ParseError& err) {
      result.errors.push_back({err.record_id(), err.line(), err.what()});
    }
    preamble.clear();
    i += 2;
  }
  result.corpus.trailer = std::move(preamble);
  return result;
}

inline LoadResult load_corpus(std::istream& in, const Taxonomy& taxonomy,
                              bool exclude_untaggable) {
  if (!in) throw std::runtime_error("corpus stream is not readable");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw std::runtime_error("error while reading corpus stream");
  return load_corpus_text(text, taxonomy, exclude_untaggable);
}

inline LoadResult load_corpus_file(const std::string& path, const Taxonomy& taxonomy,
                                   bool exclude_untaggable) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  return load_corpus(in, taxonomy, exclude_untaggable);
}

inline const Example* find_example(const Corpus& corpus, std::string_view id) {
  for (const auto& e : corpus.examples)
    if (e.id == id) return &e;
  return nullptr;
}

}  // namespace tamcorr
