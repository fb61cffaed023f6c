// Loads a small tagged corpus, scores every tag with maxent under 5-fold
// cross-validation and prints the ranked correction candidates. (On a corpus
// this small, closed-data scoring memorises every tag and proposes nothing.)

#include <iostream>

#include "tamcorr/tamcorr.hpp"

int main(int argc, char** argv) {
  using namespace tamcorr;
  const std::string path = argc > 1 ? argv[1] : TAMCORR_SAMPLE_CORPUS;
  const Taxonomy& tax = Taxonomy::default_taxonomy();

  LoadResult loaded = load_corpus_file(path, tax, true);
  for (const auto& d : loaded.errors) std::cerr << path << ":" << d.line << ": " << d.message << '\n';

  CorrectionRun run;
  run.mode = DataMode::Open;
  run.folds = 5;
  auto candidates = run_correction(loaded.corpus, tax, run);

  std::cout << loaded.corpus.examples.size() << " tags, " << candidates.size() << " candidates\n";
  for (const auto& c : candidates) {
    const Example* e = find_example(loaded.corpus, c.example_id);
    std::cout << c.example_id << '\t' << tax[c.original].id << " -> " << tax[c.proposed].id
              << '\t' << format_double(c.confidence_m1) << '\t' << e->english.raw << '\n';
  }
}
