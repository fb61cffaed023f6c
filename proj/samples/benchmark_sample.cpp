// Runs the synthetic benchmark for one seed and prints the report table.

#include <cstdlib>
#include <iostream>

#include "tamcorr/tamcorr.hpp"

int main(int argc, char** argv) {
  using namespace tamcorr;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
  BenchmarkConfig cfg = standard_benchmark();
  BenchmarkResult r = run_benchmark(cfg, seed, Taxonomy::default_taxonomy());
  std::cout << r.noisy.log.entries.size() << " injected errors, " << r.candidates.size()
            << " candidates\n";
  write_report_table(std::cout, r.report);
}
