#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "tamcorr/tamcorr.hpp"

namespace testing_support {

using namespace tamcorr;

inline std::string fixture(const std::string& name) {
  return std::string(TAMCORR_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("tamcorr-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

/// Random learner input: up to 200 items over up to 30 features and up
/// to 8 categories. Labels lean on the first feature so there is
/// something to learn, with enough noise that most features see several
/// categories.
inline TrainingDataset random_dataset(std::uint64_t seed, std::size_t max_items = 200,
                                      std::size_t max_features = 30,
                                      std::size_t max_categories = 8) {
  Rng rng(seed);
  const std::size_t n = 20 + uniform_below(rng, max_items - 19);
  const std::size_t F = 2 + uniform_below(rng, max_features - 1);
  const std::size_t K = 2 + uniform_below(rng, max_categories - 1);
  TrainingDataset d;
  for (std::size_t a = 0; a < K; ++a) d.categories.push_back("c" + std::to_string(a));
  for (std::size_t i = 0; i < n; ++i) {
    TrainingItem item;
    const std::size_t m = 1 + uniform_below(rng, std::min<std::size_t>(5, F));
    for (auto j : sample_indices(F, m, rng)) item.features.push_back("f" + std::to_string(j));
    const std::size_t lead = std::stoul(item.features.front().substr(1));
    item.category = uniform_unit(rng) < 0.6 ? lead % K : uniform_below(rng, K);
    d.items.push_back(std::move(item));
  }
  return d;
}

/// Largest |expected - empirical| count over the model's (feature,
/// category) parameters, recomputed from predictions alone.
inline double constraint_residual(const MaxentModel& model, const TrainingDataset& data) {
  std::map<std::pair<std::string, std::size_t>, double> empirical, expected;
  const std::size_t K = data.categories.size();
  for (const auto& item : data.items) {
    auto feats = canonical_features(item.features);
    Distribution p = predict_maxent(model, feats);
    if (model.config().add_bias_feature) feats.emplace_back(MaxentModel::kBiasKey);
    for (const auto& f : feats) {
      empirical[{f, item.category}] += 1.0;
      for (std::size_t a = 0; a < K; ++a) expected[{f, a}] += p[a];
    }
  }
  double worst = 0.0;
  for (const auto& [key, emp] : empirical)
    worst = std::max(worst, std::abs(expected[key] - emp));
  return worst;
}

/// Straight transcription of the decision-list definition: for each known
/// feature compute p(a|f) from raw counts, keep the strongest under the
/// documented tie rules; no known feature gives the prior.
struct OracleDecision {
  Distribution distribution;
  std::optional<std::string> feature;
  std::size_t support = 0;
};

inline OracleDecision oracle_decision(const TrainingDataset& data,
                                      const std::vector<std::string>& query) {
  const std::size_t K = data.categories.size();
  OracleDecision best;
  double best_strength = -1.0;
  for (const auto& f : query) {
    std::vector<std::size_t> counts(K, 0);
    std::size_t support = 0;
    for (const auto& item : data.items) {
      if (std::find(item.features.begin(), item.features.end(), f) == item.features.end()) continue;
      ++counts[item.category];
      ++support;
    }
    if (support == 0) continue;
    Distribution dist(K);
    for (std::size_t a = 0; a < K; ++a) dist[a] = double(counts[a]) / double(support);
    double strength = *std::max_element(dist.begin(), dist.end());
    bool take = strength > best_strength ||
                (strength == best_strength &&
                 (support > best.support || (support == best.support && f < *best.feature)));
    if (take) {
      best = {dist, f, support};
      best_strength = strength;
    }
  }
  if (!best.feature) {
    best.distribution.assign(K, 0.0);
    for (const auto& item : data.items) best.distribution[item.category] += 1.0;
    for (auto& p : best.distribution) p /= double(data.items.size());
    best.support = data.items.size();
  }
  return best;
}

/// Candidate with the given confidences; the other fields are filler.
inline CorrectionCandidate make_candidate(std::string id, double m1, double m2,
                                          std::size_t support = 1, LabelIndex original = 0,
                                          LabelIndex proposed = 4) {
  CorrectionCandidate c;
  c.example_id = std::move(id);
  c.original = original;
  c.proposed = proposed;
  c.p_proposed = c.confidence_m1 = m1;
  c.confidence_m2 = m2;
  c.p_original = 1.0 - m2;
  c.support = support;
  return c;
}

}  // namespace testing_support
