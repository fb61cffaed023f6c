#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tamcorr/dataset.hpp"
#include "tamcorr/text.hpp"

namespace tamcorr {

struct MaxentConfig {
  std::size_t max_iterations = 500;
  double tolerance = 1e-3;  // on max |model count - empirical count|
  bool add_bias_feature = true;
  std::size_t min_feature_count = 0;  // features seen fewer times are dropped
  // Stretch each GIS step by the largest power of two that still raises
  // the likelihood, then add as much of the previous move as helps. Same
  // fixed point and still monotone; orders of magnitude fewer iterations
  // on nearly separable data, where plain GIS crawls at O(1/t).
  bool line_search = false;
  std::function<void(const std::string&)> on_warning;
};

struct MaxentTrainingMeta {
  std::size_t iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  double slack_constant = 0.0;  // GIS constant C
  // Training conditional log-likelihood before each update, plus the final one.
  std::vector<double> log_likelihood;
};

/// Conditional exponential model p(a|b) ∝ exp(Σ_j λ_{j,a} g_j(b)).
class MaxentModel {
 public:
  static constexpr std::string_view kBiasKey = "*bias*";
  static constexpr std::string_view kSlackKey = "*slack*";

  MaxentModel() = default;
  MaxentModel(std::vector<std::string> categories, MaxentConfig config)
      : categories_(std::move(categories)), config_(std::move(config)) {}

  const std::vector<std::string>& categories() const { return categories_; }
  const MaxentConfig& config() const { return config_; }
  const MaxentTrainingMeta& meta() const { return meta_; }
  MaxentTrainingMeta& meta() { return meta_; }

  /// (category index, weight) pairs for a key, sorted by category.
  using WeightRow = std::vector<std::pair<std::size_t, double>>;
  const std::map<std::string, WeightRow, std::less<>>& weights() const { return weights_; }

  void set_weight(std::string_view key, std::size_t category, double w) {
    if (category >= categories_.size()) throw std::out_of_range("weight category out of range");
    auto& row = weights_[std::string(key)];
    auto it = std::lower_bound(row.begin(), row.end(), category,
                               [](const auto& p, std::size_t c) { return p.first < c; });
    if (it != row.end() && it->first == category)
      it->second = w;
    else
      row.insert(it, {category, w});
  }

  double weight(std::string_view key, std::size_t category) const {
    auto it = weights_.find(key);
    if (it == weights_.end()) return 0.0;
    for (const auto& [c, w] : it->second)
      if (c == category) return w;
    return 0.0;
  }

  bool knows(std::string_view key) const {
    return key != kBiasKey && key != kSlackKey && weights_.contains(key);
  }

  /// Unnormalized log-scores for a context; unknown keys contribute nothing.
  std::vector<double> scores(const std::vector<std::string>& features) const {
    std::vector<double> s(categories_.size(), 0.0);
    std::size_t active = 0;
    auto add_row = [&](const WeightRow& row, double value) {
      for (const auto& [c, w] : row) s[c] += w * value;
    };
    for (const auto& f : canonical_features(features)) {
      if (f.starts_with('*')) continue;
      auto it = weights_.find(f);
      if (it == weights_.end()) continue;
      add_row(it->second, 1.0);
      ++active;
    }
    if (config_.add_bias_feature) {
      ++active;
      if (auto it = weights_.find(kBiasKey); it != weights_.end()) add_row(it->second, 1.0);
    }
    if (auto it = weights_.find(kSlackKey); it != weights_.end())
      add_row(it->second, meta_.slack_constant - static_cast<double>(active));
    return s;
  }

 private:
  std::vector<std::string> categories_;
  MaxentConfig config_;
  MaxentTrainingMeta meta_;
  std::map<std::string, WeightRow, std::less<>> weights_;
};

inline Distribution softmax(std::vector<double> s) {
  if (s.empty()) return s;
  double mx = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (double& v : s) {
    v = std::exp(v - mx);
    z += v;
  }
  for (double& v : s) v /= z;
  return s;
}

inline Distribution predict_maxent(const MaxentModel& model,
                                   const std::vector<std::string>& features) {
  return softmax(model.scores(features));
}

namespace detail {

struct GisParam {
  std::size_t category;
  double empirical;
  double lambda = 0.0;
  double expected = 0.0;
  double delta = 0.0;
  double last = 0.0;  // previous accepted move
};

}  // namespace detail

/// Generalized Iterative Scaling. Each context gets a slack feature with
/// value C - (number of active features), so every context sums to C.
/// Only (feature, category) pairs observed in training carry parameters;
/// all others keep weight 0. Items are put in a canonical order first, so
/// training is independent of input order and bit-for-bit reproducible.
inline MaxentModel train_maxent(const TrainingDataset& data, const MaxentConfig& config = {}) {
  data.validate();
  const std::size_t K = data.categories.size();

  struct Item {
    std::vector<std::string> features;
    std::size_t category;
  };
  std::vector<Item> items;
  items.reserve(data.items.size());
  for (const auto& it : data.items) {
    auto f = canonical_features(it.features);
    for (const auto& key : f)
      if (key.starts_with('*'))
        throw std::invalid_argument("feature keys starting with '*' are reserved: " + key);
    items.push_back({std::move(f), it.category});
  }

  if (config.min_feature_count > 1) {
    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& it : items)
      for (const auto& f : it.features) ++freq[f];
    for (auto& it : items)
      std::erase_if(it.features,
                    [&](const std::string& f) { return freq[f] < config.min_feature_count; });
  }

  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.category != b.category) return a.category < b.category;
    return a.features < b.features;
  });

  // Intern feature keys in sorted order; bias takes the last real slot.
  std::vector<std::string> keys;
  for (const auto& it : items) keys.insert(keys.end(), it.features.begin(), it.features.end());
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::unordered_map<std::string, std::size_t> key_index;
  for (std::size_t j = 0; j < keys.size(); ++j) key_index.emplace(keys[j], j);
  const std::size_t bias = keys.size();
  const std::size_t num_real = keys.size() + (config.add_bias_feature ? 1 : 0);
  const std::size_t slack = num_real;

  std::vector<std::vector<std::size_t>> active(items.size());
  std::vector<double> slack_value(items.size());
  std::size_t max_active = 1;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (const auto& f : items[i].features) active[i].push_back(key_index.at(f));
    if (config.add_bias_feature) active[i].push_back(bias);
    max_active = std::max(max_active, active[i].size());
  }
  const double C = static_cast<double>(max_active);
  bool any_slack = false;
  for (std::size_t i = 0; i < items.size(); ++i) {
    slack_value[i] = C - static_cast<double>(active[i].size());
    any_slack = any_slack || slack_value[i] > 0.0;
  }

  // Parameters exist for observed (feature, category) pairs only.
  std::vector<std::vector<detail::GisParam>> params(slack + 1);
  {
    std::vector<std::vector<double>> emp(slack + 1, std::vector<double>(K, 0.0));
    for (std::size_t i = 0; i < items.size(); ++i) {
      for (auto j : active[i]) emp[j][items[i].category] += 1.0;
      emp[slack][items[i].category] += slack_value[i];
    }
    for (std::size_t j = 0; j <= slack; ++j) {
      if (j == slack && !any_slack) break;
      for (std::size_t a = 0; a < K; ++a)
        if (emp[j][a] > 0.0) params[j].push_back({a, emp[j][a]});
    }
  }

  MaxentModel model(data.categories, config);
  auto& meta = model.meta();
  meta.slack_constant = C;

  std::vector<double> score(K);
  // One pass over the training items at lambda + step * delta + carry * last.
  // Returns the conditional log-likelihood; with `expect` set also
  // accumulates the model's expected counts.
  auto pass = [&](double step, double carry, bool expect) {
    double ll = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      std::fill(score.begin(), score.end(), 0.0);
      for (auto j : active[i])
        for (const auto& p : params[j]) score[p.category] += p.lambda + step * p.delta + carry * p.last;
      for (const auto& p : params[slack])
        score[p.category] += (p.lambda + step * p.delta + carry * p.last) * slack_value[i];
      double mx = *std::max_element(score.begin(), score.end());
      double z = 0.0;
      for (double& s : score) {
        s = std::exp(s - mx);
        z += s;
      }
      for (double& s : score) s /= z;
      ll += std::log(score[items[i].category]);
      if (!expect) continue;
      for (auto j : active[i])
        for (auto& p : params[j]) p.expected += score[p.category];
      for (auto& p : params[slack]) p.expected += score[p.category] * slack_value[i];
    }
    return ll;
  };

  std::size_t iter = 0;
  double residual = 0.0;
  for (;;) {
    for (auto& row : params)
      for (auto& p : row) p.expected = 0.0, p.delta = 0.0;
    double ll = pass(0.0, 0.0, true);
    residual = 0.0;
    for (std::size_t j = 0; j < num_real; ++j)
      for (const auto& p : params[j])
        residual = std::max(residual, std::abs(p.expected - p.empirical));
    meta.log_likelihood.push_back(ll);
    if (residual <= config.tolerance || iter >= config.max_iterations) break;
    for (auto& row : params)
      for (auto& p : row)
        p.delta = std::log(p.empirical / std::max(p.expected, std::numeric_limits<double>::min())) / C;
    double step = 1.0;
    double carry = 0.0;
    if (config.line_search) {
      double best = pass(1.0, 0.0, false);
      for (int d = 0; d < 40; ++d) {
        double v = pass(step * 2.0, 0.0, false);
        if (!(v > best)) break;
        best = v;
        step *= 2.0;
      }
      // Then add the previous move on top, doubling while it helps.
      for (double c = 1.0; c < 1e12; c *= 2.0) {
        double v = pass(step, c, false);
        if (!(v > best)) break;
        best = v;
        carry = c;
      }
    }
    for (auto& row : params)
      for (auto& p : row) {
        p.last = step * p.delta + carry * p.last;
        p.lambda += p.last;
      }
    ++iter;
  }
  meta.iterations = iter;
  meta.final_residual = residual;
  meta.converged = residual <= config.tolerance;

  for (std::size_t j = 0; j < keys.size(); ++j)
    for (const auto& p : params[j]) model.set_weight(keys[j], p.category, p.lambda);
  if (config.add_bias_feature)
    for (const auto& p : params[bias]) model.set_weight(MaxentModel::kBiasKey, p.category, p.lambda);
  for (const auto& p : params[slack]) model.set_weight(MaxentModel::kSlackKey, p.category, p.lambda);

  if (!meta.converged && config.on_warning) {
    std::ostringstream msg;
    msg << "maxent training did not converge: residual " << residual << " after " << iter
        << " iterations (tolerance " << config.tolerance << ")";
    config.on_warning(msg.str());
  }
  return model;
}

// Model file ----------------------------------------------------------------

inline constexpr std::string_view kMaxentMagic = "#tamcorr-maxent-model\tv1";

inline void write_maxent_model(std::ostream& out, const MaxentModel& m) {
  out << kMaxentMagic << '\n';
  out << "categories";
  for (const auto& c : m.categories()) out << '\t' << c;
  out << '\n';
  const auto& cfg = m.config();
  out << "config\tmaxIterations\t" << cfg.max_iterations << "\ttolerance\t"
      << format_double(cfg.tolerance) << "\taddBiasFeature\t" << (cfg.add_bias_feature ? 1 : 0)
      << "\tminFeatureCount\t" << cfg.min_feature_count << "\tlineSearch\t"
      << (cfg.line_search ? 1 : 0) << '\n';
  const auto& meta = m.meta();
  out << "meta\titerations\t" << meta.iterations << "\tfinalResidual\t"
      << format_double(meta.final_residual) << "\tconverged\t" << (meta.converged ? 1 : 0)
      << "\tslackConstant\t" << format_double(meta.slack_constant) << '\n';
  for (const auto& [key, row] : m.weights())
    for (const auto& [c, w] : row)
      out << key << '\t' << m.categories()[c] << '\t' << format_double(w) << '\n';
}

inline MaxentModel read_maxent_model(std::istream& in) {
  auto fail = [](const std::string& why) -> void {
    throw std::runtime_error("bad maxent model file: " + why);
  };
  std::string line;
  if (!std::getline(in, line) || line != kMaxentMagic) fail("missing header");

  auto fields = [&](std::string_view expect) {
    if (!std::getline(in, line)) fail("truncated before '" + std::string(expect) + "'");
    auto cols = split(line, '\t');
    if (cols.empty() || cols[0] != expect) fail("expected '" + std::string(expect) + "' line");
    return std::vector<std::string>(cols.begin() + 1, cols.end());
  };
  auto kv = [&](const std::vector<std::string>& cols, std::string_view name) -> std::string {
    for (std::size_t i = 0; i + 1 < cols.size(); i += 2)
      if (cols[i] == name) return cols[i + 1];
    fail("missing field '" + std::string(name) + "'");
    return {};
  };

  auto categories = fields("categories");
  auto cfgcols = fields("config");
  MaxentConfig cfg;
  cfg.max_iterations = std::stoull(kv(cfgcols, "maxIterations"));
  cfg.tolerance = std::stod(kv(cfgcols, "tolerance"));
  cfg.add_bias_feature = kv(cfgcols, "addBiasFeature") == "1";
  cfg.min_feature_count = std::stoull(kv(cfgcols, "minFeatureCount"));
  cfg.line_search = kv(cfgcols, "lineSearch") == "1";
  auto metacols = fields("meta");

  std::unordered_map<std::string, std::size_t> cat_index;
  for (std::size_t i = 0; i < categories.size(); ++i) cat_index.emplace(categories[i], i);
  MaxentModel m(categories, cfg);
  m.meta().iterations = std::stoull(kv(metacols, "iterations"));
  m.meta().final_residual = std::stod(kv(metacols, "finalResidual"));
  m.meta().converged = kv(metacols, "converged") == "1";
  m.meta().slack_constant = std::stod(kv(metacols, "slackConstant"));

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3) fail("weight line needs 3 columns: " + line);
    auto c = cat_index.find(std::string(cols[1]));
    if (c == cat_index.end()) fail("unknown category '" + std::string(cols[1]) + "'");
    m.set_weight(cols[0], c->second, std::strtod(std::string(cols[2]).c_str(), nullptr));
  }
  return m;
}

}  // namespace tamcorr
