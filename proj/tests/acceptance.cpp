// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fail.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>

#include "support.hpp"

using namespace testing_support;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const Taxonomy& tax() { return Taxonomy::default_taxonomy(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

MaxentConfig converging() {
  MaxentConfig c;
  c.max_iterations = 200000;
  c.line_search = true;
  return c;
}

// -- learners ----------------------------------------------------------------

Outcome maxent_constraints() {
  double worst = 0.0, slowest = 0.0;
  std::size_t ok = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto d = random_dataset(seed);
    auto t0 = Clock::now();
    auto m = train_maxent(d, converging());
    const double secs = seconds_since(t0);
    const double r = constraint_residual(m, d);
    worst = std::max(worst, r);
    slowest = std::max(slowest, secs);
    if (r <= 1e-3 && secs <= 5.0) ++ok;
  }
  return {ok == 20, std::to_string(ok) + "/20 datasets within 1e-3; worst residual " + fmt(worst) +
                        ", slowest run " + fmt(slowest) + " s"};
}

Outcome maxent_monotone() {
  std::size_t ok = 0, runs = 0;
  double worst_drop = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto d = random_dataset(seed);
    for (const auto& cfg : {MaxentConfig{}, converging()}) {
      ++runs;
      const auto model = train_maxent(d, cfg);
      const auto& ll = model.meta().log_likelihood;
      double drop = 0.0;
      for (std::size_t i = 1; i < ll.size(); ++i) drop = std::max(drop, ll[i - 1] - ll[i]);
      worst_drop = std::max(worst_drop, drop);
      if (ll.size() >= 2 && drop <= 1e-10) ++ok;
    }
  }
  return {ok == runs, std::to_string(ok) + "/" + std::to_string(runs) +
                          " runs (plain and accelerated) never decrease; largest drop " +
                          fmt(worst_drop)};
}

Outcome decision_list_oracle() {
  std::size_t match = 0, ties = 0, fallbacks = 0;
  Rng rng(2024);
  for (std::uint64_t pair = 0; pair < 100; ++pair) {
    auto d = random_dataset(500 + pair, 50, 10, 5);
    auto dl = train_decision_list(d);
    std::vector<std::string> query;
    for (auto j : sample_indices(12, uniform_below(rng, 5), rng))
      query.push_back("f" + std::to_string(j));
    auto got = predict_decision_list(dl, query);
    auto want = oracle_decision(d, query);
    if (got.distribution == want.distribution && got.used_feature == want.feature &&
        got.support == want.support)
      ++match;
    if (!want.feature) {
      ++fallbacks;
      continue;
    }
    std::size_t at_max = 0;
    for (const auto& f : query)
      if (auto* e = dl.find(f); e && e->strength == dl.find(*want.feature)->strength) ++at_max;
    if (at_max > 1) ++ties;
  }
  return {match == 100 && ties > 0 && fallbacks > 0,
          std::to_string(match) + "/100 exact matches; " + std::to_string(ties) + " ties, " +
              std::to_string(fallbacks) + " fallbacks"};
}

// -- benchmark ---------------------------------------------------------------

struct BenchRuns {
  std::vector<BenchmarkResult> closed, open;
};

const BenchRuns& bench() {
  static const BenchRuns runs = [] {
    BenchRuns r;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto cfg = standard_benchmark();
      r.closed.push_back(run_benchmark(cfg, seed, tax()));
      cfg.run.mode = DataMode::Open;
      r.open.push_back(run_benchmark(cfg, seed, tax()));
    }
    return r;
  }();
  return runs;
}

Outcome detection_dominates() {
  std::size_t rows = 0, bad = 0;
  for (const auto* set : {&bench().closed, &bench().open})
    for (const auto& r : *set)
      for (const auto& row : r.report.rows) {
        if (row.status == RowStatus::Absent) continue;
        ++rows;
        if (row.correction.hits > row.detection.hits || row.correction.total != row.detection.total)
          ++bad;
      }
  return {rows > 0 && bad == 0, std::to_string(rows) + " populated rows over 5 seeds x 2 modes, " +
                                    std::to_string(bad) + " violations"};
}

// Hits counted straight from the injection log, not from the report.
double detection_precision(const BenchmarkResult& r, std::size_t n) {
  n = std::min(n, r.candidates.size());
  if (n == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += r.noisy.log.entries.contains(r.candidates[i].example_id);
  return double(hits) / double(n);
}

Outcome ranking_value() {
  double top = 0.0, all = 0.0;
  for (const auto& r : bench().closed) {
    top += detection_precision(r, 50);
    all += detection_precision(r, r.candidates.size());
  }
  top /= 5.0;
  all /= 5.0;
  const double gap = 100.0 * (top - all);
  return {gap >= 10.0, "mean top-50 " + fmt(100 * top) + "% vs all candidates " +
                           fmt(100 * all) + "% (gap " + fmt(gap) + " pp, need >= 10)"};
}

Outcome mode_tendency() {
  std::size_t wins = 0;
  std::string counts;
  for (std::size_t i = 0; i < 5; ++i) {
    const auto o = bench().open[i].candidates.size(), c = bench().closed[i].candidates.size();
    wins += o >= c;
    counts += (i ? ", " : "") + std::to_string(o) + "/" + std::to_string(c);
  }
  return {wins >= 4, std::to_string(wins) + "/5 seeds open >= closed (open/closed: " + counts + ")"};
}

// -- bookkeeping -------------------------------------------------------------

Outcome cv_exactness() {
  std::string detail;
  bool pass = true;
  for (std::size_t size : {10u, 101u, 4000u}) {
    SyntheticSpec spec;
    spec.size = size;
    spec.sample_seed = size;
    auto corpus = generate_synthetic_corpus(spec, tax());
    const std::size_t n = corpus.examples.size();
    auto folds = make_folds(corpus, 10, 7);
    std::vector<int> judged(n, 0);
    std::size_t leaks = 0, calls = 0;
    ScoringOptions opts;
    opts.audit = [&](std::size_t, const std::vector<std::size_t>& train,
                     const std::vector<std::size_t>& test) {
      ++calls;
      std::set<std::size_t> tr(train.begin(), train.end());
      for (auto i : test) {
        leaks += tr.contains(i);
        ++judged[i];
      }
      if (train.size() + test.size() != n) ++leaks;
    };
    score_open(corpus, tax(), folds, opts);
    const bool once = std::all_of(judged.begin(), judged.end(), [](int j) { return j == 1; });
    pass = pass && once && leaks == 0 && calls == 10;
    detail += (detail.empty() ? "" : "; ") + std::to_string(n) + " examples: " +
              (once ? "each judged once" : "NOT each judged once") + ", " + std::to_string(leaks) +
              " leaks";
  }
  return {pass, detail};
}

Outcome round_trip() {
  std::size_t files = 0, same = 0;
  for (std::string path : {fixture("figure1.txt"), fixture("layout.txt"),
                           fixture("no_final_newline.txt"),
                           std::string(TAMCORR_DATA_DIR) + "/sample_corpus.txt"}) {
    const std::string text = read_file(path);
    auto r = load_corpus_text(text, tax(), false);
    ++files;
    same += r.errors.empty() && serialize_corpus(r.corpus, tax()) == text;
  }
  SyntheticSpec spec;
  spec.size = 10000;
  const std::string big = serialize_corpus(generate_synthetic_corpus(spec, tax()), tax());
  bool has_split = false;
  for (auto line : split(big, '\n')) {
    auto first = line.find("<v>");
    if (first != std::string_view::npos && line.find("<v>", first + 1) != std::string_view::npos)
      has_split = true;
  }
  has_split = has_split && big.find("<vj>") != std::string::npos;
  auto t0 = Clock::now();
  auto r = load_corpus_text(big, tax(), false);
  const bool big_same = r.errors.empty() && r.corpus.examples.size() == 10000 &&
                        serialize_corpus(r.corpus, tax()) == big;
  const double secs = seconds_since(t0);
  return {same == files && big_same && has_split && secs <= 1.0,
          std::to_string(same) + "/" + std::to_string(files) + " fixtures byte-identical; 10000 records " +
              (big_same ? "identical" : "DIFFERENT") + " in " + fmt(secs) + " s"};
}

Outcome table_structure() {
  std::vector<CorrectionCandidate> cands;
  ErrorLog gold;
  for (std::size_t i = 0; i < 184; ++i) {
    std::string id = "e" + std::to_string(i + 1);
    cands.push_back(make_candidate(id, 1.0 - double(i) / 1000.0, 0.9 - double(i) / 1000.0));
    if (i < 127) gold.entries[id] = {i % 2 ? LabelIndex{4} : LabelIndex{13}, 0};
  }
  auto r = build_report(cands, gold, {RankMethod::M1, RankMethod::M2},
                        {50, 100, 150, 200, 250, 300}, 300, 1);
  std::ostringstream out;
  write_report_table(out, r);
  const std::string text = out.str();
  auto lines = split(text, '\n');
  const std::vector<std::string> want = {
      "Method 1\ttop 250\t---\t---\t---\t---", "Method 1\ttop 300\t---\t---\t---\t---",
      "Method 2\ttop 250\t---\t---\t---\t---", "Method 2\ttop 300\t---\t---\t---\t---"};
  const bool pass = lines.size() >= 14 && lines[6] == want[0] && lines[7] == want[1] &&
                    lines[12] == want[2] && lines[13] == want[3] &&
                    lines[5] == "Method 1\ttop 200\t69%\t(127/184)\t34%\t(63/184)";
  return {pass, pass ? "top 250/300 print as absent for both methods"
                     : "unexpected table:\n" + text};
}

int run(const std::string& cmd) {
  int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Outcome cli_determinism() {
  TempDir dir("acceptance");
  const std::string corpus = "'" + std::string(TAMCORR_DATA_DIR) + "/sample_corpus.txt'";
  std::size_t same = 0, total = 0;
  for (std::string flags : {"--stage 1", "--stage 2 --seed 9", "--learner dlist --mode open --rank M2"}) {
    ++total;
    const std::string base = std::string(TAMCORR_CLI) + " correct --corpus " + corpus + " " + flags;
    if (run(base + " --out '" + dir.file("a.tsv") + "'") != 0 ||
        run(base + " --out '" + dir.file("b.tsv") + "'") != 0)
      continue;
    const std::string a = read_file(dir.file("a.tsv"));
    same += !a.empty() && a == read_file(dir.file("b.tsv"));
  }
  return {same == total, std::to_string(same) + "/" + std::to_string(total) +
                             " flag sets gave byte-identical candidate files"};
}

}  // namespace

int main() {
  report("maxent-constraints", maxent_constraints);
  report("maxent-monotone", maxent_monotone);
  report("decision-list-oracle", decision_list_oracle);
  report("detection-dominates-correction", detection_dominates);
  report("ranking-value", ranking_value);
  report("mode-tendency", mode_tendency);
  report("cv-exactness", cv_exactness);
  report("corpus-round-trip", round_trip);
  report("table-structure", table_structure);
  report("cli-determinism", cli_determinism);
  return failures == 0 ? 0 : 1;
}
