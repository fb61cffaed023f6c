#pragma once

#include <algorithm>
#include <functional>
#include <future>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tamcorr/corpus.hpp"
#include "tamcorr/decision_list.hpp"
#include "tamcorr/features.hpp"
#include "tamcorr/maxent.hpp"
#include "tamcorr/random.hpp"

namespace tamcorr {

enum class LearnerKind { Maxent, DecisionList };
enum class DataMode { Closed, Open };
enum class RankMethod { M1, M2 };

inline std::string_view to_string(LearnerKind k) {
  return k == LearnerKind::Maxent ? "maxent" : "decision-list";
}
inline std::string_view to_string(DataMode m) { return m == DataMode::Closed ? "closed" : "open"; }
inline std::string_view to_string(RankMethod m) { return m == RankMethod::M1 ? "M1" : "M2"; }

inline std::optional<LearnerKind> parse_learner(std::string_view s) {
  if (s == "maxent" || s == "me") return LearnerKind::Maxent;
  if (s == "decision-list" || s == "dlist" || s == "dl") return LearnerKind::DecisionList;
  return std::nullopt;
}
inline std::optional<DataMode> parse_mode(std::string_view s) {
  if (s == "closed") return DataMode::Closed;
  if (s == "open") return DataMode::Open;
  return std::nullopt;
}
inline std::optional<RankMethod> parse_rank_method(std::string_view s) {
  if (s == "M1" || s == "m1" || s == "1") return RankMethod::M1;
  if (s == "M2" || s == "m2" || s == "2") return RankMethod::M2;
  return std::nullopt;
}

/// A tag judged incorrect, with its proposed replacement.
struct CorrectionCandidate {
  std::string example_id;
  LabelIndex original = 0;
  LabelIndex proposed = 0;
  double p_original = 0.0;
  double p_proposed = 0.0;
  double confidence_m1 = 0.0;  // == p_proposed
  double confidence_m2 = 0.0;  // == 1 - p_original
  std::size_t support = 0;
  LearnerKind learner = LearnerKind::Maxent;
  DataMode mode = DataMode::Closed;

  double confidence(RankMethod m) const {
    return m == RankMethod::M1 ? confidence_m1 : confidence_m2;
  }
  bool operator==(const CorrectionCandidate&) const = default;
};

struct Judgement {
  bool correct = true;
  LabelIndex proposed = 0;
  double p_original = 0.0;
  double p_proposed = 0.0;
};

/// Correct iff the original category attains the maximum (ties count as
/// correct). Otherwise proposes the argmax; ties among other categories go
/// to the earliest in taxonomy order. `prediction` is indexed by taxonomy
/// label; an original outside its range has probability 0.
inline Judgement judge(const Distribution& prediction, LabelIndex original) {
  Judgement j;
  j.p_original = original < prediction.size() ? prediction[original] : 0.0;
  LabelIndex best = 0;
  for (LabelIndex a = 1; a < prediction.size(); ++a)
    if (prediction[a] > prediction[best]) best = a;
  double top = prediction.empty() ? 0.0 : prediction[best];
  if (prediction.empty() || j.p_original >= top) {
    j.correct = true;
    j.proposed = original;
    j.p_proposed = j.p_original;
    return j;
  }
  j.correct = false;
  j.proposed = best;
  j.p_proposed = top;
  return j;
}

// Folds ---------------------------------------------------------------------

struct FoldAssignment {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> ids;      // example ids, corpus order
  std::vector<std::size_t> fold_of;  // parallel to ids

  std::vector<std::size_t> test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
      if (fold_of[i] == fold) out.push_back(i);
    return out;
  }
  std::vector<std::size_t> train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
      if (fold_of[i] != fold) out.push_back(i);
    return out;
  }
  std::vector<std::size_t> fold_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (auto f : fold_of) ++sizes[f];
    return sizes;
  }
};

/// Uniform random partition into k folds whose sizes differ by at most one.
inline FoldAssignment make_folds(const Corpus& corpus, std::size_t k, std::uint64_t seed) {
  const std::size_t n = corpus.examples.size();
  if (k < 2) throw std::invalid_argument("fold count must be at least 2");
  if (k > n)
    throw std::invalid_argument("fold count " + std::to_string(k) + " exceeds corpus size " +
                                std::to_string(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  fisher_yates(order, rng);
  FoldAssignment fa;
  fa.k = k;
  fa.seed = seed;
  fa.fold_of.resize(n);
  for (std::size_t r = 0; r < n; ++r) fa.fold_of[order[r]] = r % k;
  for (const auto& e : corpus.examples) fa.ids.push_back(e.id);
  return fa;
}

// Scoring -------------------------------------------------------------------

struct LearnerOptions {
  LearnerKind kind = LearnerKind::Maxent;
  MaxentConfig maxent;
};

/// Called once per open-mode fold with the corpus positions used for
/// training and for judging.
using FoldAudit = std::function<void(std::size_t fold, const std::vector<std::size_t>& train,
                                     const std::vector<std::size_t>& test)>;

struct ScoringOptions {
  LearnerOptions learner;
  std::size_t threads = 1;
  FoldAudit audit;
};

namespace detail {

struct Scored {
  Distribution prediction;  // over taxonomy labels
  std::size_t support = 0;
};

/// Trains on `train` and predicts every example in `test`.
inline std::vector<Scored> train_and_predict(const std::vector<std::vector<std::string>>& feats,
                                             const Corpus& corpus, const Taxonomy& taxonomy,
                                             const std::vector<std::size_t>& train,
                                             const std::vector<std::size_t>& test,
                                             const LearnerOptions& opts) {
  // Categories: those observed in the training portion, in taxonomy order.
  std::vector<char> seen(taxonomy.size(), 0);
  for (auto i : train) seen[corpus.examples[i].v_category] = 1;
  TrainingDataset data;
  std::vector<std::size_t> local_of(taxonomy.size(), 0);
  std::vector<LabelIndex> label_of;
  for (LabelIndex a = 0; a < taxonomy.size(); ++a)
    if (seen[a]) {
      local_of[a] = label_of.size();
      label_of.push_back(a);
      data.categories.push_back(taxonomy[a].id);
    }
  data.items.reserve(train.size());
  for (auto i : train) data.items.push_back({feats[i], local_of[corpus.examples[i].v_category]});

  auto widen = [&](const Distribution& local) {
    Distribution d(taxonomy.size(), 0.0);
    for (std::size_t c = 0; c < local.size(); ++c) d[label_of[c]] = local[c];
    return d;
  };

  std::vector<Scored> out;
  out.reserve(test.size());
  if (opts.kind == LearnerKind::DecisionList) {
    DecisionList dl = train_decision_list(data);
    for (auto i : test) {
      auto p = predict_decision_list(dl, feats[i]);
      out.push_back({widen(p.distribution), p.support});
    }
    return out;
  }

  MaxentModel model = train_maxent(data, opts.maxent);
  // Support: training items sharing at least one feature with the query.
  std::unordered_map<std::string_view, std::vector<std::size_t>> postings;
  for (std::size_t t = 0; t < train.size(); ++t)
    for (const auto& f : feats[train[t]]) postings[f].push_back(t);
  std::vector<std::size_t> stamp(train.size(), 0);
  std::size_t tick = 0;
  for (auto i : test) {
    ++tick;
    std::size_t support = 0;
    for (const auto& f : feats[i]) {
      auto it = postings.find(f);
      if (it == postings.end()) continue;
      for (auto t : it->second)
        if (stamp[t] != tick) {
          stamp[t] = tick;
          ++support;
        }
    }
    out.push_back({widen(predict_maxent(model, feats[i])), support});
  }
  return out;
}

inline std::vector<std::vector<std::string>> corpus_features(const Corpus& corpus) {
  std::vector<std::vector<std::string>> feats;
  feats.reserve(corpus.examples.size());
  for (const auto& e : corpus.examples) feats.push_back(feature_keys(e.english));
  return feats;
}

inline std::optional<CorrectionCandidate> to_candidate(const Example& e, const Scored& s,
                                                       LearnerKind learner, DataMode mode) {
  Judgement j = judge(s.prediction, e.v_category);
  if (j.correct) return std::nullopt;
  CorrectionCandidate c;
  c.example_id = e.id;
  c.original = e.v_category;
  c.proposed = j.proposed;
  c.p_original = j.p_original;
  c.p_proposed = j.p_proposed;
  c.confidence_m1 = j.p_proposed;
  c.confidence_m2 = 1.0 - j.p_original;
  c.support = s.support;
  c.learner = learner;
  c.mode = mode;
  return c;
}

}  // namespace detail

/// Per-example predictions (taxonomy-indexed) from a model trained on the
/// whole corpus, including the example itself.
inline std::vector<detail::Scored> predict_closed(const Corpus& corpus, const Taxonomy& taxonomy,
                                                  const LearnerOptions& learner) {
  if (corpus.examples.empty()) throw std::invalid_argument("corpus is empty");
  auto feats = detail::corpus_features(corpus);
  std::vector<std::size_t> all(corpus.examples.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return detail::train_and_predict(feats, corpus, taxonomy, all, all, learner);
}

/// Closed data: one model trained on every tag, each tag judged against it.
/// Candidates come back in corpus order.
inline std::vector<CorrectionCandidate> score_closed(const Corpus& corpus,
                                                     const Taxonomy& taxonomy,
                                                     const ScoringOptions& opts = {}) {
  auto scored = predict_closed(corpus, taxonomy, opts.learner);
  std::vector<CorrectionCandidate> out;
  for (std::size_t i = 0; i < scored.size(); ++i)
    if (auto c = detail::to_candidate(corpus.examples[i], scored[i], opts.learner.kind,
                                      DataMode::Closed))
      out.push_back(std::move(*c));
  return out;
}

/// Open data: each fold is judged by a model trained on the other folds.
/// Candidates come back in corpus order regardless of thread count.
inline std::vector<CorrectionCandidate> score_open(const Corpus& corpus, const Taxonomy& taxonomy,
                                                   const FoldAssignment& folds,
                                                   const ScoringOptions& opts = {}) {
  if (corpus.examples.empty()) throw std::invalid_argument("corpus is empty");
  if (folds.fold_of.size() != corpus.examples.size())
    throw std::invalid_argument("fold assignment does not cover the corpus");
  for (std::size_t i = 0; i < corpus.examples.size(); ++i)
    if (folds.ids[i] != corpus.examples[i].id)
      throw std::invalid_argument("fold assignment ids do not match the corpus");

  auto feats = detail::corpus_features(corpus);
  std::vector<std::optional<detail::Scored>> scored(corpus.examples.size());

  auto run_fold = [&](std::size_t f) {
    auto train = folds.train_indices(f);
    auto test = folds.test_indices(f);
    std::vector<char> in_train(corpus.examples.size(), 0);
    for (auto i : train) in_train[i] = 1;
    for (auto i : test)
      if (in_train[i])
        throw std::logic_error("example " + corpus.examples[i].id + " is in its own training fold");
    if (train.empty() || test.empty()) return std::vector<detail::Scored>{};
    return detail::train_and_predict(feats, corpus, taxonomy, train, test, opts.learner);
  };

  const std::size_t threads = std::max<std::size_t>(1, opts.threads);
  for (std::size_t base = 0; base < folds.k; base += threads) {
    std::vector<std::future<std::vector<detail::Scored>>> jobs;
    const std::size_t end = std::min(folds.k, base + threads);
    for (std::size_t f = base; f < end; ++f)
      jobs.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred,
                                run_fold, f));
    for (std::size_t f = base; f < end; ++f) {
      auto result = jobs[f - base].get();
      auto test = folds.test_indices(f);
      if (opts.audit) opts.audit(f, folds.train_indices(f), test);
      for (std::size_t t = 0; t < result.size(); ++t) scored[test[t]] = std::move(result[t]);
    }
  }

  std::vector<CorrectionCandidate> out;
  for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
    if (!scored[i]) throw std::logic_error("example " + corpus.examples[i].id + " was not judged");
    if (auto c = detail::to_candidate(corpus.examples[i], *scored[i], opts.learner.kind,
                                      DataMode::Open))
      out.push_back(std::move(*c));
  }
  return out;
}

/// Descending confidence, then descending support, then example id.
inline std::vector<CorrectionCandidate> rank(std::vector<CorrectionCandidate> candidates,
                                             RankMethod method) {
  std::sort(candidates.begin(), candidates.end(),
            [method](const CorrectionCandidate& a, const CorrectionCandidate& b) {
              double ca = a.confidence(method), cb = b.confidence(method);
              if (ca != cb) return ca > cb;
              if (a.support != b.support) return a.support > b.support;
              return shortlex_less(a.example_id, b.example_id);
            });
  return candidates;
}

/// Replaces the `<v>` category of each accepted example. Everything else,
/// including layout, is left untouched.
inline Corpus apply_corrections(const Corpus& corpus,
                                const std::map<std::string, LabelIndex>& accepted) {
  Corpus out = corpus;
  std::unordered_map<std::string_view, std::size_t> pos;
  for (std::size_t i = 0; i < out.examples.size(); ++i) pos.emplace(out.examples[i].id, i);
  for (const auto& [id, label] : accepted) {
    auto it = pos.find(id);
    if (it == pos.end()) throw std::invalid_argument("unknown example id '" + id + "'");
    out.examples[it->second].v_category = label;
  }
  return out;
}

// Pipeline ------------------------------------------------------------------

struct CorrectionRun {
  LearnerOptions learner;
  DataMode mode = DataMode::Closed;
  RankMethod rank_method = RankMethod::M1;
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

inline std::vector<CorrectionCandidate> run_correction(const Corpus& corpus,
                                                       const Taxonomy& taxonomy,
                                                       const CorrectionRun& run) {
  ScoringOptions opts;
  opts.learner = run.learner;
  opts.threads = run.threads;
  std::vector<CorrectionCandidate> candidates =
      run.mode == DataMode::Closed
          ? score_closed(corpus, taxonomy, opts)
          : score_open(corpus, taxonomy, make_folds(corpus, run.folds, run.seed), opts);
  return rank(std::move(candidates), run.rank_method);
}

// Candidate file --------------------------------------------------------------

inline constexpr std::string_view kCandidateHeader =
    "exampleId\toriginalId\tproposedId\tpOriginal\tpProposed\tconfidenceM1\tconfidenceM2\tsupport"
    "\tlearner\tmode";

inline void write_candidates(std::ostream& out, const std::vector<CorrectionCandidate>& cands,
                             const Taxonomy& taxonomy) {
  out << kCandidateHeader << '\n';
  for (const auto& c : cands)
    out << c.example_id << '\t' << taxonomy[c.original].id << '\t' << taxonomy[c.proposed].id
        << '\t' << format_double(c.p_original) << '\t' << format_double(c.p_proposed) << '\t'
        << format_double(c.confidence_m1) << '\t' << format_double(c.confidence_m2) << '\t'
        << c.support << '\t' << to_string(c.learner) << '\t' << to_string(c.mode) << '\n';
}

inline std::vector<CorrectionCandidate> read_candidates(std::istream& in,
                                                        const Taxonomy& taxonomy) {
  std::string line;
  std::size_t lineno = 1;
  auto fail = [&](const std::string& why) -> void {
    throw std::runtime_error("candidate file line " + std::to_string(lineno) + ": " + why);
  };
  if (!std::getline(in, line)) fail("missing header");
  strip_cr(line);
  if (line != kCandidateHeader) fail("unexpected header");
  std::vector<CorrectionCandidate> out;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 10) fail("expected 10 columns, got " + std::to_string(cols.size()));
    CorrectionCandidate c;
    c.example_id = std::string(cols[0]);
    auto orig = taxonomy.find_id(cols[1]);
    auto prop = taxonomy.find_id(cols[2]);
    if (!orig || !prop) fail("unknown category id");
    c.original = *orig;
    c.proposed = *prop;
    auto num = [&](std::string_view s) {
      std::string str(s);
      char* end = nullptr;
      double v = std::strtod(str.c_str(), &end);
      if (str.empty() || *end != '\0') fail("bad number '" + str + "'");
      return v;
    };
    c.p_original = num(cols[3]);
    c.p_proposed = num(cols[4]);
    c.confidence_m1 = num(cols[5]);
    c.confidence_m2 = num(cols[6]);
    try {
      c.support = std::stoull(std::string(cols[7]));
    } catch (const std::exception&) {
      fail("bad support '" + std::string(cols[7]) + "'");
    }
    auto learner = parse_learner(cols[8]);
    auto mode = parse_mode(cols[9]);
    if (!learner || !mode) fail("bad learner or mode");
    c.learner = *learner;
    c.mode = *mode;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace tamcorr
