#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tamcorr/corpus.hpp"
#include "tamcorr/features.hpp"
#include "tamcorr/random.hpp"

namespace tamcorr {

/// Parameters of a generated benchmark corpus.
struct SyntheticSpec {
  std::size_t size = 1000;
  std::uint64_t rule_seed = 1;    // lexicon
  std::uint64_t sample_seed = 1;  // sentences
  std::size_t vocabulary = 40;    // number of verbs
  // Share of present/past sentences replaced by a stock sentence whose
  // English does not mark tense ("I <invariant verb> it ."); the tense is
  // drawn evenly and shows only on the Japanese side. Such sentences have
  // no determining feature, so the default keeps them off.
  double ambiguity = 0.0;
  double question_rate = 0.06;  // split verb phrases ("Did you ... ?")
  double vj_rate = 0.05;
};

struct VerbForms {
  std::string base, third, past, participle, ing;
  bool invariant = false;  // past == participle == base
};

/// Verbs and the rule table that maps a verb-phrase pattern to a category.
class SyntheticLexicon {
 public:
  explicit SyntheticLexicon(std::uint64_t rule_seed, std::size_t vocabulary) {
    static constexpr std::array<std::string_view, 16> onsets = {
        "bl", "k", "m", "t", "v", "s", "pr", "d", "f", "gl", "r", "z", "n", "pl", "tr", "sk"};
    static constexpr std::array<std::string_view, 5> vowels = {"a", "e", "i", "o", "u"};
    static constexpr std::array<std::string_view, 6> codas = {"rk", "n", "l", "m", "sk", "nt"};
    if (vocabulary == 0) throw std::invalid_argument("vocabulary must be at least 1");
    Rng rng(rule_seed);
    std::set<std::string> used;
    while (verbs_.size() < vocabulary) {
      std::string base;
      base += onsets[uniform_below(rng, onsets.size())];
      base += vowels[uniform_below(rng, vowels.size())];
      base += onsets[uniform_below(rng, onsets.size())];
      base += vowels[uniform_below(rng, vowels.size())];
      base += codas[uniform_below(rng, codas.size())];
      if (!used.insert(base).second) continue;
      VerbForms v;
      v.base = base;
      v.third = base + "s";
      v.ing = base + "ing";
      v.invariant = uniform_below(rng, 4) == 0;
      v.past = v.participle = v.invariant ? base : base + "ed";
      verbs_.push_back(v);
    }
    // The rule table's hardest case needs at least one invariant verb.
    if (std::none_of(verbs_.begin(), verbs_.end(), [](const VerbForms& v) { return v.invariant; })) {
      auto& v = verbs_.back();
      v.invariant = true;
      v.past = v.participle = v.base;
    }
    for (std::size_t i = 0; i < verbs_.size(); ++i) {
      const auto& v = verbs_[i];
      form_of_[v.base] = {i, Form::Base};
      form_of_[v.third] = {i, Form::Third};
      form_of_[v.ing] = {i, Form::Ing};
      if (!v.invariant) form_of_[v.past] = {i, Form::Past};
      form_of_[capitalize(v.base)] = {i, Form::Imperative};
    }
  }

  const std::vector<VerbForms>& verbs() const { return verbs_; }

  static std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
  }

  static constexpr std::array<std::string_view, 6> kThirdSubjects = {
      "he", "she", "it", "Taro", "the man", "my sister"};
  static constexpr std::array<std::string_view, 5> kOtherSubjects = {"I", "you", "we", "they",
                                                                     "the children"};
  static constexpr std::array<std::string_view, 2> kPastAdverbs = {"yesterday", "last week"};
  static constexpr std::array<std::string_view, 2> kPresentAdverbs = {"every day", "often"};

  /// Category id recovered from the surface context, or nullopt when the
  /// English sentence does not determine it.
  std::optional<std::string> rule_category(const TaggedSentence& sentence) const {
    TaggedSentence s = normalize_split_verb(sentence);
    const Span v = s.v_segments.front();
    auto at = [&](std::size_t k) -> std::string {
      return v.begin + k < v.end ? s.tokens[v.begin + k] : std::string();
    };
    auto lower = [](std::string t) {
      for (auto& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      return t;
    };
    const std::string w0 = lower(at(0)), w1 = at(1), w2 = at(2);
    static const std::unordered_map<std::string, std::string> modals = {
        {"can", "can"},       {"cannot", "can"}, {"could", "could"}, {"will", "will"},
        {"would", "would"},   {"must", "must"},  {"should", "should"}, {"may", "may"},
        {"might", "might"},   {"shall", "shall"}, {"need", "need"},   {"ought", "ought"}};
    if (auto it = modals.find(w0); it != modals.end()) return it->second;
    const bool be_present = w0 == "am" || w0 == "is" || w0 == "are";
    const bool be_past = w0 == "was" || w0 == "were";
    const bool have_present = w0 == "has" || w0 == "have";
    if (w0 == "used" && w1 == "to") return "used-to";
    if (w0 == "had" && w1 == "better") return "had-better";
    if (w0 == "had" && w1 == "to") return "had-to";
    if (have_present && w1 == "to") return "have-to";
    if ((be_present || be_past) && w1 == "able") return be_present ? "be-able-to" : "was-able-to";
    if ((be_present || be_past) && w1 == "going" && w2 == "to")
      return be_present ? "be-going-to" : "was-going-to";
    if ((be_present || be_past) && form(w1) == Form::Ing)
      return be_present ? "present-progressive" : "past-progressive";
    if ((have_present || w0 == "had") && w1 == "been")
      return have_present ? "present-perfect-progressive" : "past-perfect-progressive";
    if (have_present || w0 == "had") return have_present ? "present-perfect" : "past-perfect";
    if (w0 == "did") return "past";
    if (w0 == "do" || w0 == "does") return "present";

    switch (form(at(0))) {
      case Form::Imperative: return "imperative";
      case Form::Third: return "present";
      case Form::Past: return "past";
      case Form::Base: break;
      default: return std::nullopt;
    }
    if (!verbs_[form_of_.at(at(0)).first].invariant) return "present";
    // Invariant verb: a time adverb decides, else a third-person subject
    // means past (the present would be "-s").
    for (std::size_t i = v.end; i < s.tokens.size(); ++i) {
      if (s.tokens[i] == "yesterday" || (s.tokens[i] == "last" && i + 1 < s.tokens.size() &&
                                         s.tokens[i + 1] == "week"))
        return "past";
      if (s.tokens[i] == "often" || (s.tokens[i] == "every" && i + 1 < s.tokens.size() &&
                                     s.tokens[i + 1] == "day"))
        return "present";
    }
    std::string subject;
    for (std::size_t i = 0; i < v.begin; ++i) subject += (i ? " " : "") + s.tokens[i];
    for (auto t : kThirdSubjects)
      if (subject == t) return "past";
    return std::nullopt;
  }

 private:
  enum class Form { None, Base, Third, Past, Ing, Imperative };
  Form form(const std::string& tok) const {
    auto it = form_of_.find(tok);
    return it == form_of_.end() ? Form::None : it->second.second;
  }

  std::vector<VerbForms> verbs_;
  std::unordered_map<std::string, std::pair<std::size_t, Form>> form_of_;
};

namespace detail {

struct CategoryWeight {
  std::string_view id;
  unsigned weight;
};

// Present and past dominate, as in real text.
inline constexpr std::array<CategoryWeight, 28> kSyntheticMix = {{
    {"present", 30},      {"past", 20},        {"present-progressive", 5},
    {"past-progressive", 3}, {"present-perfect", 5}, {"past-perfect", 2},
    {"present-perfect-progressive", 1}, {"past-perfect-progressive", 1},
    {"imperative", 3},    {"can", 4},          {"could", 3},
    {"will", 5},          {"would", 3},        {"must", 2},
    {"should", 2},        {"may", 2},          {"might", 1},
    {"shall", 1},         {"need", 1},         {"ought", 1},
    {"have-to", 2},       {"had-to", 1},       {"be-able-to", 1},
    {"was-able-to", 1},   {"be-going-to", 2},  {"was-going-to", 1},
    {"had-better", 1},    {"used-to", 1},
}};

inline constexpr std::array<std::string_view, 10> kObjects = {
    "",         "the book", "a letter", "it",       "the door",
    "them",     "the bus",  "his car",  "some tea", "the old map"};

inline constexpr std::array<std::string_view, 12> kSyllables = {
    "ka", "ta", "no", "mi", "ru", "shi", "to", "ha", "ne", "yo", "ko", "ri"};

}  // namespace detail

/// Generates tagged sentences whose category follows from the verb phrase
/// under SyntheticLexicon's rule table.
inline Corpus generate_synthetic_corpus(const SyntheticSpec& spec, const Taxonomy& taxonomy) {
  if (spec.size == 0) throw std::invalid_argument("synthetic corpus size must be at least 1");
  SyntheticLexicon lex(spec.rule_seed, spec.vocabulary);
  Rng rng(spec.sample_seed);
  auto pick = [&](const auto& arr) { return std::string(arr[uniform_below(rng, arr.size())]); };
  auto chance = [&](double p) { return uniform_unit(rng) < p; };

  unsigned total_weight = 0;
  for (const auto& cw : detail::kSyntheticMix) total_weight += cw.weight;
  // With ambiguity on, the last invariant verb is reserved for the stock
  // sentences and never drawn otherwise.
  std::vector<bool> reserved(lex.verbs().size(), false);
  const VerbForms* stock_verb = nullptr;
  if (spec.ambiguity > 0.0) {
    for (std::size_t i = lex.verbs().size(); i-- > 0;)
      if (lex.verbs()[i].invariant) {
        reserved[i] = true;
        stock_verb = &lex.verbs()[i];
        break;
      }
    if (!stock_verb) throw std::invalid_argument("ambiguity needs an invariant verb in the lexicon");
  }

  // Zipf-like verb frequencies: verb i drawn with weight 1/(i+1).
  std::vector<double> cum;
  double acc = 0.0;
  for (std::size_t i = 0; i < lex.verbs().size(); ++i)
    cum.push_back(acc += reserved[i] ? 0.0 : 1.0 / double(i + 1));
  if (acc == 0.0) throw std::invalid_argument("vocabulary too small for the ambiguity setting");
  auto draw_verb = [&]() -> const VerbForms& {
    double u = uniform_unit(rng) * acc;
    std::size_t i = 0;
    while (i + 1 < cum.size() && (cum[i] <= u || reserved[i])) ++i;
    return lex.verbs()[i];
  };

  Corpus corpus;
  for (std::size_t n = 0; n < spec.size; ++n) {
    unsigned r = static_cast<unsigned>(uniform_below(rng, total_weight));
    std::string_view cat;
    for (const auto& cw : detail::kSyntheticMix) {
      if (r < cw.weight) {
        cat = cw.id;
        break;
      }
      r -= cw.weight;
    }
    bool third = chance(0.5);
    std::string subject = third ? pick(SyntheticLexicon::kThirdSubjects)
                                : pick(SyntheticLexicon::kOtherSubjects);
    const VerbForms* verb = &draw_verb();
    const bool tensed = cat == "present" || cat == "past";
    // Stock sentence "I/we <verb> it ." with the tense drawn evenly; only
    // the Japanese side tells present from past.
    const bool ambiguous = tensed && stock_verb && chance(spec.ambiguity);
    if (ambiguous) {
      third = false;
      cat = chance(0.5) ? "past" : "present";
      verb = stock_verb;
      subject = chance(0.5) ? "I" : "we";
    }

    std::vector<std::string> vp;      // verb phrase tokens (first part if split)
    std::vector<std::string> vp2;     // second part of a split phrase
    bool question = false, imperative = false;
    std::string adverb;
    auto be = [&](bool past) {
      if (past) return std::string(third || subject == "I" ? "was" : "were");
      if (subject == "I") return std::string("am");
      return std::string(third ? "is" : "are");
    };
    const std::string have = third ? "has" : "have";

    if (cat == "present" || cat == "past") {
      const bool past = cat == "past";
      if (!ambiguous && chance(spec.question_rate)) {
        question = true;
        vp = {past ? "Did" : (third ? "Does" : "Do")};
        vp2 = {verb->base};
      } else if (!ambiguous && chance(0.15)) {
        vp = {past ? "did" : (third ? "does" : "do"), "not", verb->base};
      } else if (past) {
        vp = {verb->past};
      } else {
        vp = {third ? verb->third : verb->base};
      }
      const bool needs_adverb = !ambiguous && !question && vp.size() == 1 && verb->invariant &&
                                !third;
      if (!ambiguous && (needs_adverb || chance(0.3)))
        adverb = past ? pick(SyntheticLexicon::kPastAdverbs)
                      : pick(SyntheticLexicon::kPresentAdverbs);
    } else if (cat == "present-progressive" || cat == "past-progressive") {
      vp = {be(cat == "past-progressive"), verb->ing};
    } else if (cat == "present-perfect" || cat == "past-perfect") {
      vp = {cat == "past-perfect" ? "had" : have, verb->participle};
    } else if (cat == "present-perfect-progressive" || cat == "past-perfect-progressive") {
      vp = {cat == "past-perfect-progressive" ? "had" : have, "been", verb->ing};
    } else if (cat == "imperative") {
      imperative = true;
      vp = {SyntheticLexicon::capitalize(verb->base)};
    } else if (cat == "have-to" || cat == "had-to") {
      vp = {cat == "had-to" ? "had" : have, "to", verb->base};
    } else if (cat == "be-able-to" || cat == "was-able-to") {
      vp = {be(cat == "was-able-to"), "able", "to", verb->base};
    } else if (cat == "be-going-to" || cat == "was-going-to") {
      vp = {be(cat == "was-going-to"), "going", "to", verb->base};
    } else if (cat == "had-better") {
      vp = {"had", "better", verb->base};
    } else if (cat == "used-to") {
      vp = {"used", "to", verb->base};
    } else if (cat == "ought") {
      vp = {"ought", "to", verb->base};
    } else {
      // single-word modal
      if ((cat == "can" || cat == "will" || cat == "could") && chance(spec.question_rate)) {
        question = true;
        vp = {SyntheticLexicon::capitalize(std::string(cat))};
        vp2 = {verb->base};
      } else if (cat == "can" && chance(0.2)) {
        vp = {"cannot", verb->base};
      } else {
        vp = {std::string(cat), verb->base};
      }
    }

    std::vector<std::string> tokens;
    std::vector<Span> segments;
    auto append_words = [&](std::string_view words) {
      for (auto& t : tokenize(words)) tokens.push_back(std::move(t));
    };
    if (question) {
      segments.push_back({tokens.size(), tokens.size() + vp.size()});
      tokens.insert(tokens.end(), vp.begin(), vp.end());
      append_words(subject);
      segments.push_back({tokens.size(), tokens.size() + vp2.size()});
      tokens.insert(tokens.end(), vp2.begin(), vp2.end());
    } else {
      if (!imperative) append_words(subject);
      segments.push_back({tokens.size(), tokens.size() + vp.size()});
      tokens.insert(tokens.end(), vp.begin(), vp.end());
    }
    append_words(ambiguous ? "it" : pick(detail::kObjects));
    append_words(adverb);

    std::optional<Span> vj;
    std::optional<LabelIndex> vj_category;
    if (!question && chance(spec.vj_rate)) {
      append_words(", and I");
      const VerbForms& other = draw_verb();
      vj = Span{tokens.size(), tokens.size() + 1};
      tokens.push_back(other.invariant ? other.third : other.past);
      vj_category = taxonomy.index_of_id(other.invariant ? "present" : "past");
      append_words(pick(detail::kObjects));
    }
    tokens.emplace_back(question ? "?" : (imperative && chance(0.3) ? "!" : "."));

    Example e;
    e.id = "e" + std::to_string(n + 1);
    e.line = 2 * n + 1;
    e.v_category = taxonomy.index_of_id(cat);
    e.vj_category = vj_category;
    std::string jp;
    for (int s = 0, len = 2 + static_cast<int>(uniform_below(rng, 3)); s < len; ++s) {
      jp += pick(detail::kSyllables);
      jp += pick(detail::kSyllables);
      jp += ' ';
    }
    jp += cat == "past" || cat.starts_with("past") ? "shita" : "suru";
    e.japanese = jp;
    e.english.tokens = tokens;
    e.english.v_segments = segments;
    e.english.vj_segment = vj;
    e.english.raw = render_tagged(tokens, segments, vj);
    corpus.examples.push_back(std::move(e));
  }
  return corpus;
}

}  // namespace tamcorr
