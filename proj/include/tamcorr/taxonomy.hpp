#pragma once

#include <array>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tamcorr/text.hpp"

namespace tamcorr {

enum class CategoryGroup {
  TenseAspect,
  Imperative,
  Auxiliary,
  NounPhrase,
  Participial,
  VerbEllipsis,
  Interjection,
  NoCorrespondence,
  Untaggable,
};

inline constexpr std::array<std::string_view, 9> kGroupNames = {
    "tense-aspect-combination", "imperative",   "auxiliary",
    "noun-phrase",              "participial",  "verb-ellipsis",
    "interjection",             "no-correspondence", "untaggable"};

inline std::string_view to_string(CategoryGroup g) {
  return kGroupNames[static_cast<std::size_t>(g)];
}

inline std::optional<CategoryGroup> parse_group(std::string_view s) {
  for (std::size_t i = 0; i < kGroupNames.size(); ++i)
    if (kGroupNames[i] == s) return static_cast<CategoryGroup>(i);
  return std::nullopt;
}

struct CategoryLabel {
  std::string id;
  std::string symbol;  // may be empty (present tense)
  std::string description;
  CategoryGroup group = CategoryGroup::TenseAspect;

  bool operator==(const CategoryLabel&) const = default;
};

class TaxonomyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index into a Taxonomy. Position in the taxonomy file defines the
/// "taxonomy order" used for deterministic tie-breaking.
using LabelIndex = std::size_t;

/// The fixed inventory of tense/aspect/modality categories.
///
/// A valid taxonomy has exactly 34 labels with unique ids and unique
/// symbols, exactly one empty symbol, and exactly one untaggable label.
class Taxonomy {
 public:
  static constexpr std::size_t kSize = 34;

  explicit Taxonomy(std::vector<CategoryLabel> labels) : labels_(std::move(labels)) {
    validate();
    for (LabelIndex i = 0; i < labels_.size(); ++i) {
      by_id_.emplace(labels_[i].id, i);
      by_symbol_.emplace(labels_[i].symbol, i);
    }
  }

  /// Loads the four-column TSV form: id, symbol, group, description.
  /// Lines starting with '#' and blank lines are skipped.
  static Taxonomy from_tsv(std::istream& in) {
    std::vector<CategoryLabel> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      strip_cr(line);
      if (line.empty() || line[0] == '#') continue;
      auto cols = split(line, '\t');
      if (cols.size() != 4)
        throw TaxonomyError("taxonomy line " + std::to_string(lineno) +
                            ": expected 4 tab-separated columns, got " +
                            std::to_string(cols.size()));
      auto group = parse_group(cols[2]);
      if (!group)
        throw TaxonomyError("taxonomy line " + std::to_string(lineno) + ": unknown group '" +
                            std::string(cols[2]) + "'");
      labels.push_back({std::string(cols[0]), std::string(cols[1]), std::string(cols[3]), *group});
    }
    return Taxonomy(std::move(labels));
  }

  static Taxonomy from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TaxonomyError("cannot open taxonomy file: " + path);
    return from_tsv(in);
  }

  /// Built-in default. Only "", "d" and "c" are attested symbols; the rest
  /// are placeholders and can be replaced by a taxonomy file.
  static const Taxonomy& default_taxonomy() {
    static const Taxonomy t = [] {
      std::istringstream in{std::string(kDefaultTsv)};
      return from_tsv(in);
    }();
    return t;
  }

  void write_tsv(std::ostream& out) const {
    out << "# id\tsymbol\tgroup\tdescription\n";
    for (const auto& l : labels_)
      out << l.id << '\t' << l.symbol << '\t' << to_string(l.group) << '\t' << l.description
          << '\n';
  }

  std::size_t size() const { return labels_.size(); }
  const CategoryLabel& operator[](LabelIndex i) const { return labels_.at(i); }
  const std::vector<CategoryLabel>& labels() const { return labels_; }

  std::optional<LabelIndex> find_id(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<LabelIndex> find_symbol(std::string_view symbol) const {
    auto it = by_symbol_.find(std::string(symbol));
    if (it == by_symbol_.end()) return std::nullopt;
    return it->second;
  }
  LabelIndex index_of_id(std::string_view id) const {
    auto i = find_id(id);
    if (!i) throw TaxonomyError("unknown category id '" + std::string(id) + "'");
    return *i;
  }

  LabelIndex present_tense() const { return *find_symbol(""); }
  LabelIndex untaggable() const {
    for (LabelIndex i = 0; i < labels_.size(); ++i)
      if (labels_[i].group == CategoryGroup::Untaggable) return i;
    return labels_.size();  // unreachable for a validated taxonomy
  }

 private:
  void validate() const {
    if (labels_.size() != kSize)
      throw TaxonomyError("taxonomy must have exactly 34 labels, got " +
                          std::to_string(labels_.size()));
    std::unordered_map<std::string, int> ids, symbols;
    int empty = 0, untaggable = 0;
    for (const auto& l : labels_) {
      if (l.id.empty()) throw TaxonomyError("taxonomy label with empty id");
      if (l.id.find_first_of(" \t\r\n") != std::string::npos)
        throw TaxonomyError("taxonomy id '" + l.id + "' contains whitespace");
      if (l.symbol.find_first_of(", \t\r\n") != std::string::npos)
        throw TaxonomyError("taxonomy symbol '" + l.symbol + "' contains ',' or whitespace");
      if (++ids[l.id] > 1) throw TaxonomyError("duplicate taxonomy id '" + l.id + "'");
      if (++symbols[l.symbol] > 1)
        throw TaxonomyError("duplicate taxonomy symbol '" + l.symbol + "'");
      if (l.symbol.empty()) ++empty;
      if (l.group == CategoryGroup::Untaggable) ++untaggable;
    }
    if (empty != 1) throw TaxonomyError("taxonomy needs exactly one label with an empty symbol");
    if (untaggable != 1) throw TaxonomyError("taxonomy needs exactly one untaggable label");
  }

  static constexpr std::string_view kDefaultTsv =
      "present\t\ttense-aspect-combination\tpresent tense\n"
      "present-progressive\tg\ttense-aspect-combination\tpresent progressive\n"
      "present-perfect\th\ttense-aspect-combination\tpresent perfect\n"
      "present-perfect-progressive\thg\ttense-aspect-combination\tpresent perfect progressive\n"
      "past\td\ttense-aspect-combination\tpast tense\n"
      "past-progressive\tdg\ttense-aspect-combination\tpast progressive\n"
      "past-perfect\tdh\ttense-aspect-combination\tpast perfect\n"
      "past-perfect-progressive\tdhg\ttense-aspect-combination\tpast perfect progressive\n"
      "imperative\ti\timperative\timperative mood\n"
      "be-able-to\ta\tauxiliary\tbe able to (present)\n"
      "was-able-to\tad\tauxiliary\tbe able to (past)\n"
      "be-going-to\to\tauxiliary\tbe going to (present)\n"
      "was-going-to\tod\tauxiliary\tbe going to (past)\n"
      "can\tc\tauxiliary\tcan\n"
      "could\tcd\tauxiliary\tcould\n"
      "have-to\tt\tauxiliary\thave to (present)\n"
      "had-to\ttd\tauxiliary\thave to (past)\n"
      "had-better\tb\tauxiliary\thad better\n"
      "may\tm\tauxiliary\tmay\n"
      "might\tmd\tauxiliary\tmight\n"
      "must\tu\tauxiliary\tmust\n"
      "need\tn\tauxiliary\tneed\n"
      "ought\tq\tauxiliary\tought\n"
      "shall\ts\tauxiliary\tshall\n"
      "should\tsd\tauxiliary\tshould\n"
      "used-to\tut\tauxiliary\tused to\n"
      "will\tw\tauxiliary\twill\n"
      "would\twd\tauxiliary\twould\n"
      "noun-phrase\tnp\tnoun-phrase\tnoun phrase\n"
      "participial\tpc\tparticipial\tparticipial construction\n"
      "verb-ellipsis\tel\tverb-ellipsis\tverb ellipsis\n"
      "interjection\tij\tinterjection\tinterjection or greeting\n"
      "no-correspondence\tx\tno-correspondence\tJapanese main verb has no English verb phrase\n"
      "untaggable\tz\tuntaggable\ttagging could not be performed\n";

  std::vector<CategoryLabel> labels_;
  std::unordered_map<std::string, LabelIndex> by_id_;
  std::unordered_map<std::string, LabelIndex> by_symbol_;
};

}  // namespace tamcorr
