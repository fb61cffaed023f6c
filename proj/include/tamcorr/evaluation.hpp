#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tamcorr/correction.hpp"
#include "tamcorr/random.hpp"

namespace tamcorr {

struct InjectedError {
  LabelIndex true_category;
  LabelIndex injected_category;
};

/// Synthetic gold standard: which tags were corrupted and what they were.
struct ErrorLog {
  std::map<std::string, InjectedError> entries;
  double rate = 0.0;
  std::uint64_t seed = 0;

  bool contains(const std::string& id) const { return entries.contains(id); }
};

struct NoisyCorpus {
  Corpus corpus;
  ErrorLog log;
};

/// Corrupts exactly round(rate * N) distinct examples, each to a uniformly
/// drawn taggable label different from its own.
inline NoisyCorpus inject_errors(const Corpus& corpus, double rate, std::uint64_t seed,
                                 const Taxonomy& taxonomy) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("error rate must be in [0, 1]");
  const std::size_t n = corpus.examples.size();
  if (n == 0 && rate > 0.0) throw std::invalid_argument("cannot inject errors into an empty corpus");
  const auto count = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));

  NoisyCorpus out{corpus, {}};
  out.log.rate = rate;
  out.log.seed = seed;
  Rng rng(seed);
  const LabelIndex untaggable = taxonomy.untaggable();
  for (auto i : sample_indices(n, count, rng)) {
    Example& e = out.corpus.examples[i];
    std::vector<LabelIndex> choices;
    for (LabelIndex a = 0; a < taxonomy.size(); ++a)
      if (a != e.v_category && a != untaggable) choices.push_back(a);
    LabelIndex injected = choices[uniform_below(rng, choices.size())];
    out.log.entries.emplace(e.id, InjectedError{e.v_category, injected});
    e.v_category = injected;
  }
  return out;
}

struct Selector {
  enum class Kind { All, Top, Random } kind = Kind::All;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  static Selector all() { return {}; }
  static Selector top(std::size_t x) { return {Kind::Top, x, 0}; }
  static Selector random(std::size_t n, std::uint64_t seed) { return {Kind::Random, n, seed}; }
};

/// Top-X takes a prefix (candidates must already be ranked); random-N
/// samples without replacement and takes everything when N exceeds the
/// candidate count.
inline std::vector<const CorrectionCandidate*> select_candidates(
    const std::vector<CorrectionCandidate>& cands, const Selector& sel) {
  std::vector<const CorrectionCandidate*> out;
  switch (sel.kind) {
    case Selector::Kind::All:
      for (const auto& c : cands) out.push_back(&c);
      break;
    case Selector::Kind::Top:
      for (std::size_t i = 0; i < cands.size() && i < sel.n; ++i) out.push_back(&cands[i]);
      break;
    case Selector::Kind::Random: {
      Rng rng(sel.seed);
      for (auto i : sample_indices(cands.size(), sel.n, rng)) out.push_back(&cands[i]);
      break;
    }
  }
  return out;
}

struct HitCount {
  std::size_t hits = 0;
  std::size_t total = 0;
  bool operator==(const HitCount&) const = default;
};

/// Hits: selected candidates whose tag was truly wrong.
inline HitCount precision_detection(const std::vector<CorrectionCandidate>& cands,
                                    const ErrorLog& gold, const Selector& sel) {
  HitCount h;
  for (const auto* c : select_candidates(cands, sel)) {
    ++h.total;
    if (gold.contains(c->example_id)) ++h.hits;
  }
  return h;
}

/// Hits: selected candidates whose proposal restores the true category.
inline HitCount precision_correction(const std::vector<CorrectionCandidate>& cands,
                                     const ErrorLog& gold, const Selector& sel) {
  HitCount h;
  for (const auto* c : select_candidates(cands, sel)) {
    ++h.total;
    auto it = gold.entries.find(c->example_id);
    if (it != gold.entries.end() && it->second.true_category == c->proposed) ++h.hits;
  }
  return h;
}

// Report ----------------------------------------------------------------------

enum class RowStatus { Full, Truncated, Absent };

struct ReportRow {
  Selector selector;
  std::optional<RankMethod> method;  // none for the random row
  RowStatus status = RowStatus::Full;
  HitCount detection;
  HitCount correction;
};

struct PrecisionReport {
  std::vector<ReportRow> rows;
  std::size_t candidate_count = 0;
  std::size_t gold_size = 0;
  std::vector<std::size_t> cutoffs;
  std::size_t random_n = 0;
  std::uint64_t seed = 0;
};

/// One random-N row, then one row per (method, cutoff). A cutoff past the
/// candidate count is truncated to all candidates the first time and
/// absent afterwards.
inline PrecisionReport build_report(const std::vector<CorrectionCandidate>& candidates,
                                    const ErrorLog& gold, const std::vector<RankMethod>& methods,
                                    std::vector<std::size_t> cutoffs, std::size_t random_n,
                                    std::uint64_t seed) {
  std::sort(cutoffs.begin(), cutoffs.end());
  PrecisionReport r;
  r.candidate_count = candidates.size();
  r.gold_size = gold.entries.size();
  r.cutoffs = cutoffs;
  r.random_n = random_n;
  r.seed = seed;

  {
    ReportRow row;
    row.selector = Selector::random(random_n, seed);
    row.status = random_n > candidates.size() ? RowStatus::Truncated : RowStatus::Full;
    row.detection = precision_detection(candidates, gold, row.selector);
    row.correction = precision_correction(candidates, gold, row.selector);
    r.rows.push_back(row);
  }
  for (auto m : methods) {
    auto ranked = rank(candidates, m);
    bool exhausted = false;
    for (auto x : cutoffs) {
      ReportRow row;
      row.selector = Selector::top(x);
      row.method = m;
      if (exhausted) {
        row.status = RowStatus::Absent;
      } else {
        row.status = x > ranked.size() ? RowStatus::Truncated : RowStatus::Full;
        exhausted = x >= ranked.size();
        row.detection = precision_detection(ranked, gold, row.selector);
        row.correction = precision_correction(ranked, gold, row.selector);
      }
      r.rows.push_back(row);
    }
  }
  return r;
}

/// Whole percent, rounded down, as printed in the published tables
/// (e.g. 149/250 -> "59%").
inline std::string format_percent(const HitCount& h) {
  if (h.total == 0) return "n/a";
  return std::to_string(h.hits * 100 / h.total) + "%";
}

inline std::string format_fraction(const HitCount& h) {
  return "(" + std::to_string(h.hits) + "/" + std::to_string(h.total) + ")";
}

inline std::string row_label(const ReportRow& row) {
  if (row.selector.kind == Selector::Kind::Random)
    return "random " + std::to_string(row.selector.n);
  if (row.selector.kind == Selector::Kind::Top) return "top " + std::to_string(row.selector.n);
  return "all";
}

/// Tab-separated table in the layout of the published precision tables.
inline void write_report_table(std::ostream& out, const PrecisionReport& r) {
  out << "method\tselection\tdetection\t\tcorrection\t\n";
  for (const auto& row : r.rows) {
    out << (row.method ? std::string("Method ") + (*row.method == RankMethod::M1 ? "1" : "2")
                       : std::string())
        << '\t' << row_label(row) << '\t';
    if (row.status == RowStatus::Absent) {
      out << "---\t---\t---\t---\n";
      continue;
    }
    out << format_percent(row.detection) << '\t' << format_fraction(row.detection) << '\t'
        << format_percent(row.correction) << '\t' << format_fraction(row.correction) << '\n';
  }
}

inline std::string_view to_string(RowStatus s) {
  switch (s) {
    case RowStatus::Full: return "full";
    case RowStatus::Truncated: return "truncated";
    case RowStatus::Absent: return "absent";
  }
  return "?";
}

/// One row per line with a header. detectionRecall (hits / injected
/// errors) is an extra column not found in the published tables.
inline void write_report_tsv(std::ostream& out, const PrecisionReport& r) {
  out << "selector\tn\tmethod\tstatus\tdetectionHits\tdetectionTotal\tcorrectionHits"
         "\tcorrectionTotal\tdetectionPrecision\tcorrectionPrecision\tdetectionRecall\n";
  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? std::string() : format_double(static_cast<double>(a) / static_cast<double>(b));
  };
  for (const auto& row : r.rows) {
    out << (row.selector.kind == Selector::Kind::Random ? "random" : "top") << '\t'
        << row.selector.n << '\t' << (row.method ? to_string(*row.method) : "-") << '\t'
        << to_string(row.status) << '\t';
    if (row.status == RowStatus::Absent) {
      out << "\t\t\t\t\t\t\n";
      continue;
    }
    out << row.detection.hits << '\t' << row.detection.total << '\t' << row.correction.hits
        << '\t' << row.correction.total << '\t' << ratio(row.detection.hits, row.detection.total)
        << '\t' << ratio(row.correction.hits, row.correction.total) << '\t'
        << ratio(row.detection.hits, r.gold_size) << '\n';
  }
}

}  // namespace tamcorr
