// tamcorr: detect and correct tense/aspect/modality tags in a tagged
// bilingual corpus, and review the proposed corrections.

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tamcorr/review_service.hpp"
#include "tamcorr/tamcorr.hpp"

namespace fs = std::filesystem;
using namespace tamcorr;

namespace {

Taxonomy load_taxonomy(const std::string& path) {
  return path.empty() ? Taxonomy::default_taxonomy() : Taxonomy::from_file(path);
}

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

// validate ---------------------------------------------------------------------

struct ValidateArgs {
  std::string corpus, taxonomy, dump_features;
};

int run_validate(const ValidateArgs& a) {
  Taxonomy tax = load_taxonomy(a.taxonomy);
  LoadResult r = load_corpus_file(a.corpus, tax, false);
  for (const auto& d : r.errors) std::cout << a.corpus << ":" << d.line << ": " << d.message << '\n';
  std::size_t untaggable = 0;
  for (const auto& e : r.corpus.examples)
    if (tax[e.v_category].group == CategoryGroup::Untaggable) ++untaggable;
  std::cout << r.record_count << " records, " << r.errors.size() << " errors, " << untaggable
            << " untaggable\n";
  if (!a.dump_features.empty()) {
    std::ofstream out(a.dump_features, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + a.dump_features);
    for (const auto& e : r.corpus.examples)
      for (const auto& f : extract_features(e.english))
        out << e.id << '\t' << feature_key(f) << '\n';
  }
  return r.errors.empty() ? 0 : 1;
}

// correct ----------------------------------------------------------------------

struct CorrectArgs {
  std::string corpus, taxonomy, out, model_out;
  std::string learner = "maxent", mode = "closed", rank = "M1";
  int stage = 0;
  std::size_t folds = 10;
  std::uint64_t seed = 1;
  std::size_t max_iterations = 500;
  double tolerance = 1e-3;
  std::size_t min_feature_count = 0;
  bool no_bias = false;
  bool line_search = false;
  std::size_t threads = 1;
};

/// Resolves --stage presets against explicit flags. A preset plus an
/// explicit flag that disagrees with it is an error.
CorrectionRun resolve_run(const CorrectArgs& a, const CLI::App& cmd) {
  CorrectionRun run;
  std::string learner = a.learner, mode = a.mode, rank_method = a.rank;
  if (a.stage != 0) {
    const std::string want_mode = a.stage == 1 ? "closed" : "open";
    auto clash = [&](const char* flag, const std::string& given, const std::string& preset) {
      if (cmd.count(flag) && given != preset)
        throw CLI::ValidationError(std::string(flag) + " conflicts with --stage " +
                                   std::to_string(a.stage) + " (which sets " + preset + ")");
    };
    auto learner_kind = parse_learner(a.learner);
    if (cmd.count("--learner") && (!learner_kind || *learner_kind != LearnerKind::Maxent))
      throw CLI::ValidationError("--learner conflicts with --stage " + std::to_string(a.stage) +
                                 " (which sets maxent)");
    clash("--mode", a.mode, want_mode);
    auto rm = parse_rank_method(a.rank);
    if (cmd.count("--rank") && (!rm || *rm != RankMethod::M1))
      throw CLI::ValidationError("--rank conflicts with --stage " + std::to_string(a.stage) +
                                 " (which sets M1)");
    learner = "maxent";
    mode = want_mode;
    rank_method = "M1";
  }
  auto lk = parse_learner(learner);
  auto md = parse_mode(mode);
  auto rm = parse_rank_method(rank_method);
  if (!lk) throw CLI::ValidationError("--learner must be maxent or dlist");
  if (!md) throw CLI::ValidationError("--mode must be closed or open");
  if (!rm) throw CLI::ValidationError("--rank must be M1 or M2");
  if (!a.model_out.empty() && *md != DataMode::Closed)
    throw CLI::ValidationError("--model-out needs --mode closed");
  run.learner.kind = *lk;
  run.mode = *md;
  run.rank_method = *rm;
  run.folds = a.folds;
  run.seed = a.seed;
  run.threads = a.threads;
  run.learner.maxent.max_iterations = a.max_iterations;
  run.learner.maxent.tolerance = a.tolerance;
  run.learner.maxent.min_feature_count = a.min_feature_count;
  run.learner.maxent.add_bias_feature = !a.no_bias;
  run.learner.maxent.line_search = a.line_search;
  run.learner.maxent.on_warning = warn;
  return run;
}

void write_model(const std::string& path, const Corpus& corpus, const Taxonomy& tax,
                 const LearnerOptions& learner) {
  TrainingDataset data;
  std::vector<std::size_t> local(tax.size(), SIZE_MAX);
  for (const auto& e : corpus.examples)
    if (local[e.v_category] == SIZE_MAX) local[e.v_category] = 0;
  for (LabelIndex a = 0; a < tax.size(); ++a)
    if (local[a] != SIZE_MAX) {
      local[a] = data.categories.size();
      data.categories.push_back(tax[a].id);
    }
  for (const auto& e : corpus.examples)
    data.items.push_back({feature_keys(e.english), local[e.v_category]});
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (learner.kind == LearnerKind::Maxent)
    write_maxent_model(out, train_maxent(data, learner.maxent));
  else
    write_decision_list(out, train_decision_list(data));
}

int run_correct(const CorrectArgs& a, const CLI::App& cmd) {
  CorrectionRun run = resolve_run(a, cmd);
  Taxonomy tax = load_taxonomy(a.taxonomy);
  LoadResult r = load_corpus_file(a.corpus, tax, true);
  for (const auto& d : r.errors)
    std::cerr << a.corpus << ":" << d.line << ": skipped: " << d.message << '\n';
  if (r.corpus.examples.empty()) throw std::runtime_error("no usable records in " + a.corpus);
  auto candidates = run_correction(r.corpus, tax, run);
  std::ofstream out(a.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + a.out);
  write_candidates(out, candidates, tax);
  if (!a.model_out.empty()) write_model(a.model_out, r.corpus, tax, run.learner);
  std::cout << candidates.size() << " candidates from " << r.corpus.examples.size() << " tags ("
            << to_string(run.learner.kind) << ", " << to_string(run.mode) << ", "
            << to_string(run.rank_method) << ")";
  if (r.dropped_untaggable) std::cout << "; " << r.dropped_untaggable << " untaggable skipped";
  std::cout << '\n';
  return 0;
}

// eval -------------------------------------------------------------------------

struct EvalArgs {
  std::vector<std::uint64_t> seeds = {1};
  std::size_t size = 4000;
  std::size_t vocabulary = 12;
  double ambiguity = 0.2;
  double rate = 0.05;
  std::string learner = "maxent", mode = "closed", rank = "M1";
  std::size_t folds = 10;
  std::size_t max_iterations = 500;
  std::vector<std::size_t> cutoffs = {50, 100, 150, 200, 250, 300};
  std::size_t random_n = 300;
  std::string format = "table";
  std::string out;
  std::size_t threads = 1;
};

int run_eval(const EvalArgs& a) {
  const Taxonomy& tax = Taxonomy::default_taxonomy();
  BenchmarkConfig cfg = standard_benchmark();
  cfg.corpus.size = a.size;
  cfg.corpus.vocabulary = a.vocabulary;
  cfg.corpus.ambiguity = a.ambiguity;
  cfg.error_rate = a.rate;
  auto lk = parse_learner(a.learner);
  auto md = parse_mode(a.mode);
  auto rm = parse_rank_method(a.rank);
  if (!lk || !md || !rm) throw CLI::ValidationError("bad --learner, --mode or --rank");
  cfg.run.learner.kind = *lk;
  cfg.run.learner.maxent.max_iterations = a.max_iterations;
  cfg.run.mode = *md;
  cfg.run.rank_method = *rm;
  cfg.run.folds = a.folds;
  cfg.run.threads = a.threads;
  cfg.cutoffs = a.cutoffs;
  cfg.random_n = a.random_n;

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + a.out);
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  for (auto seed : a.seeds) {
    BenchmarkResult r = run_benchmark(cfg, seed, tax);
    out << "# seed " << seed << ": " << r.noisy.corpus.examples.size() << " tags, "
        << r.noisy.log.entries.size() << " injected errors, " << r.candidates.size()
        << " candidates (" << to_string(cfg.run.learner.kind) << ", " << to_string(cfg.run.mode)
        << ")\n";
    if (a.format == "tsv")
      write_report_tsv(out, r.report);
    else
      write_report_table(out, r.report);
  }
  return 0;
}

// serve / export ------------------------------------------------------------------

struct ServeArgs {
  std::string candidates, corpus, session, taxonomy, static_dir;
  std::string bind;
};

ReviewService* g_service = nullptr;

int run_serve(const ServeArgs& a) {
  std::string bind = a.bind;
  if (bind.empty()) {
    const char* env = std::getenv("TAMCORR_BIND");
    bind = env && *env ? env : "127.0.0.1:8080";
  }
  auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--bind must be host:port");
  std::string host = bind.substr(0, colon);
  int port = std::stoi(bind.substr(colon + 1));

  SessionHeader header;
  if (!fs::exists(a.session)) {
    if (a.candidates.empty() || a.corpus.empty())
      throw CLI::ValidationError("a new session needs --candidates and --corpus");
    header = {absolute(a.corpus), absolute(a.candidates),
              a.taxonomy.empty() ? std::string() : absolute(a.taxonomy)};
  }
  ReviewSession session = ReviewSession::open_or_create(a.session, header);
  if (!a.corpus.empty() && absolute(a.corpus) != session.header().corpus_path)
    throw SessionError("session " + a.session + " belongs to corpus " +
                       session.header().corpus_path);
  if (!a.candidates.empty() && absolute(a.candidates) != session.header().candidates_path)
    throw SessionError("session " + a.session + " belongs to candidate file " +
                       session.header().candidates_path);

  ReviewService service(std::move(session));
  if (!a.static_dir.empty() && !service.mount_static(a.static_dir))
    throw std::runtime_error("cannot serve static files from " + a.static_dir);
  int bound = service.bind(host, port);
  if (bound < 0) throw std::runtime_error("cannot bind " + bind);
  auto p = service.session().progress();
  std::cout << "serving " << p.total << " candidates (" << p.reviewed << " reviewed) on http://"
            << host << ":" << bound << "/v1" << std::endl;
  g_service = &service;
  std::signal(SIGINT, [](int) {
    if (g_service) g_service->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_service) g_service->stop();
  });
  service.listen_after_bind();
  g_service = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tense/aspect/modality tag correction for tagged bilingual corpora"};
  app.set_config("--config", "", "INI/TOML file with default option values");
  app.require_subcommand(1);

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Parse a corpus and report malformed records");
  validate->add_option("--corpus", va.corpus, "Corpus file")->required();
  validate->add_option("--taxonomy", va.taxonomy, "Taxonomy TSV (default: built-in)");
  validate->add_option("--dump-features", va.dump_features,
                       "Write exampleId<TAB>featureKey lines to this file");

  CorrectArgs ca;
  auto* correct = app.add_subcommand("correct", "Score every tag and write ranked candidates");
  correct->add_option("--corpus", ca.corpus, "Corpus file")->required();
  correct->add_option("--taxonomy", ca.taxonomy, "Taxonomy TSV (default: built-in)");
  correct->add_option("--out", ca.out, "Candidate file to write")->required();
  correct->add_option("--learner", ca.learner, "maxent | dlist")->capture_default_str();
  correct->add_option("--mode", ca.mode, "closed | open")->capture_default_str();
  correct->add_option("--rank", ca.rank, "M1 | M2")->capture_default_str();
  correct->add_option("--stage", ca.stage,
                      "Preset: 1 = maxent/closed/M1, 2 = maxent/open/M1")
      ->check(CLI::IsMember({1, 2}));
  correct->add_option("-k,--folds", ca.folds, "Cross-validation folds (open mode)")
      ->capture_default_str();
  correct->add_option("--seed", ca.seed, "Fold assignment seed")->capture_default_str();
  correct->add_option("--max-iterations", ca.max_iterations, "Maxent GIS iterations")
      ->capture_default_str();
  correct->add_option("--tolerance", ca.tolerance, "Maxent constraint tolerance")
      ->capture_default_str();
  correct->add_option("--min-feature-count", ca.min_feature_count, "Maxent feature cutoff")
      ->capture_default_str();
  correct->add_flag("--no-bias", ca.no_bias, "Disable the maxent bias feature");
  correct->add_flag("--line-search", ca.line_search, "Accelerate GIS with a monotone step search");
  correct->add_option("--threads", ca.threads, "Folds trained in parallel")->capture_default_str();
  correct->add_option("--model-out", ca.model_out, "Also write the closed-data model here");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Run the synthetic error-injection benchmark");
  eval->add_option("--seeds", ea.seeds, "One report per seed")->capture_default_str();
  eval->add_option("--size", ea.size, "Synthetic corpus size")->capture_default_str();
  eval->add_option("--vocabulary", ea.vocabulary, "Number of synthetic verbs")
      ->capture_default_str();
  eval->add_option("--ambiguity", ea.ambiguity,
                   "Share of present/past sentences with underdetermined English")
      ->capture_default_str();
  eval->add_option("--rate", ea.rate, "Injected error rate")->capture_default_str();
  eval->add_option("--learner", ea.learner, "maxent | dlist")->capture_default_str();
  eval->add_option("--mode", ea.mode, "closed | open")->capture_default_str();
  eval->add_option("--rank", ea.rank, "M1 | M2")->capture_default_str();
  eval->add_option("-k,--folds", ea.folds, "Cross-validation folds")->capture_default_str();
  eval->add_option("--max-iterations", ea.max_iterations, "Maxent GIS iterations")
      ->capture_default_str();
  eval->add_option("--cutoffs", ea.cutoffs, "Top-X cutoffs")->capture_default_str();
  eval->add_option("--random-n", ea.random_n, "Random sample size")->capture_default_str();
  eval->add_option("--format", ea.format, "table | tsv")
      ->check(CLI::IsMember({"table", "tsv"}))
      ->capture_default_str();
  eval->add_option("--out", ea.out, "Write the report here instead of stdout");
  eval->add_option("--threads", ea.threads, "Folds trained in parallel")->capture_default_str();

  ServeArgs sa;
  auto* serve = app.add_subcommand("serve", "Serve the review API over a session");
  serve->add_option("--session", sa.session, "Session log (created if missing)")->required();
  serve->add_option("--candidates", sa.candidates, "Candidate file (new sessions)");
  serve->add_option("--corpus", sa.corpus, "Corpus file (new sessions)");
  serve->add_option("--taxonomy", sa.taxonomy, "Taxonomy TSV (new sessions)");
  serve->add_option("--bind", sa.bind, "host:port (default: $TAMCORR_BIND or 127.0.0.1:8080)");
  serve->add_option("--static-dir", sa.static_dir, "Serve a review client from this directory");

  std::string export_session, export_out;
  auto* exp = app.add_subcommand("export", "Write the corpus with reviewed corrections applied");
  exp->add_option("--session", export_session, "Session log")->required();
  exp->add_option("--out", export_out, "Output corpus file")->required();

  auto* taxonomy_cmd = app.add_subcommand("taxonomy", "Print the built-in taxonomy as TSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return run_validate(va);
    if (*correct) return run_correct(ca, *correct);
    if (*eval) return run_eval(ea);
    if (*serve) return run_serve(sa);
    if (*taxonomy_cmd) {
      Taxonomy::default_taxonomy().write_tsv(std::cout);
      return 0;
    }
    if (*exp) {
      export_corrected(export_session, export_out);
      std::cout << "wrote " << export_out << '\n';
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
