#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tamcorr/dataset.hpp"
#include "tamcorr/text.hpp"

namespace tamcorr {

struct DecisionEntry {
  Distribution distribution;  // relative category frequency among items with the feature
  std::size_t support = 0;    // number of items with the feature
  double strength = 0.0;      // max of distribution
};

struct DecisionListPrediction {
  Distribution distribution;
  std::optional<std::string> used_feature;
  std::size_t support = 0;
};

/// Predicts from the single strongest feature present: p(a|b) = p(a|f_max)
/// with f_max = argmax_f max_a p(a|f).
class DecisionList {
 public:
  DecisionList() = default;
  DecisionList(std::vector<std::string> categories, Distribution prior, std::size_t item_count)
      : categories_(std::move(categories)), prior_(std::move(prior)), item_count_(item_count) {}

  const std::vector<std::string>& categories() const { return categories_; }
  const Distribution& prior() const { return prior_; }
  std::size_t item_count() const { return item_count_; }
  const std::map<std::string, DecisionEntry, std::less<>>& entries() const { return entries_; }

  void add_entry(std::string key, Distribution dist, std::size_t support) {
    if (dist.size() != categories_.size())
      throw std::invalid_argument("decision entry distribution has wrong size");
    if (support == 0) throw std::invalid_argument("decision entry support must be >= 1");
    double strength = *std::max_element(dist.begin(), dist.end());
    entries_[std::move(key)] = {std::move(dist), support, strength};
  }

  const DecisionEntry* find(std::string_view key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

 private:
  std::vector<std::string> categories_;
  Distribution prior_;
  std::size_t item_count_ = 0;
  std::map<std::string, DecisionEntry, std::less<>> entries_;
};

inline DecisionList train_decision_list(const TrainingDataset& data) {
  data.validate();
  const std::size_t K = data.categories.size();
  std::map<std::string, std::vector<std::size_t>> counts;
  std::vector<std::size_t> prior_counts(K, 0);
  for (const auto& item : data.items) {
    ++prior_counts[item.category];
    for (const auto& f : canonical_features(item.features)) {
      auto& row = counts[f];
      if (row.empty()) row.assign(K, 0);
      ++row[item.category];
    }
  }
  const double n = static_cast<double>(data.items.size());
  Distribution prior(K);
  for (std::size_t a = 0; a < K; ++a) prior[a] = static_cast<double>(prior_counts[a]) / n;

  DecisionList dl(data.categories, std::move(prior), data.items.size());
  for (auto& [key, row] : counts) {
    std::size_t support = 0;
    for (auto c : row) support += c;
    Distribution dist(K);
    for (std::size_t a = 0; a < K; ++a)
      dist[a] = static_cast<double>(row[a]) / static_cast<double>(support);
    dl.add_entry(key, std::move(dist), support);
  }
  return dl;
}

/// Ties on strength go to the larger support, then the smaller key. With no
/// known feature the prior is returned with the total item count as support.
inline DecisionListPrediction predict_decision_list(const DecisionList& model,
                                                    const std::vector<std::string>& features) {
  const DecisionEntry* best = nullptr;
  const std::string* best_key = nullptr;
  for (const auto& f : features) {
    const DecisionEntry* e = model.find(f);
    if (!e) continue;
    bool better = !best || e->strength > best->strength ||
                  (e->strength == best->strength &&
                   (e->support > best->support ||
                    (e->support == best->support && f < *best_key)));
    if (better) {
      best = e;
      best_key = &f;
    }
  }
  if (!best) return {model.prior(), std::nullopt, model.item_count()};
  return {best->distribution, *best_key, best->support};
}

// Model file ----------------------------------------------------------------

inline constexpr std::string_view kDecisionListMagic = "#tamcorr-dlist-model\tv1";

namespace detail {
inline std::string format_dist(const std::vector<std::string>& cats, const Distribution& d) {
  std::string out;
  bool first = true;
  for (std::size_t a = 0; a < d.size(); ++a) {
    if (d[a] == 0.0) continue;
    if (!first) out += ',';
    first = false;
    out += cats[a] + "=" + format_double(d[a]);
  }
  return out;
}
}  // namespace detail

inline void write_decision_list(std::ostream& out, const DecisionList& dl) {
  out << kDecisionListMagic << '\n';
  out << "categories";
  for (const auto& c : dl.categories()) out << '\t' << c;
  out << '\n';
  out << "prior\t" << dl.item_count() << '\t' << detail::format_dist(dl.categories(), dl.prior())
      << '\n';
  for (const auto& [key, e] : dl.entries())
    out << key << '\t' << e.support << '\t' << detail::format_dist(dl.categories(), e.distribution)
        << '\n';
}

inline DecisionList read_decision_list(std::istream& in) {
  auto fail = [](const std::string& why) -> void {
    throw std::runtime_error("bad decision list file: " + why);
  };
  std::string line;
  if (!std::getline(in, line) || line != kDecisionListMagic) fail("missing header");
  if (!std::getline(in, line)) fail("missing categories");
  auto cols = split(line, '\t');
  if (cols.empty() || cols[0] != "categories") fail("expected categories line");
  std::vector<std::string> cats(cols.begin() + 1, cols.end());
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < cats.size(); ++i) idx.emplace(cats[i], i);

  auto parse_dist = [&](std::string_view s) {
    Distribution d(cats.size(), 0.0);
    if (s.empty()) return d;
    for (auto part : split(s, ',')) {
      auto eq = part.rfind('=');
      if (eq == std::string_view::npos) fail("bad probability '" + std::string(part) + "'");
      auto it = idx.find(std::string(part.substr(0, eq)));
      if (it == idx.end()) fail("unknown category in '" + std::string(part) + "'");
      d[it->second] = std::strtod(std::string(part.substr(eq + 1)).c_str(), nullptr);
    }
    return d;
  };

  if (!std::getline(in, line)) fail("missing prior");
  cols = split(line, '\t');
  if (cols.size() != 3 || cols[0] != "prior") fail("expected prior line");
  DecisionList dl(cats, parse_dist(cols[2]), std::stoull(std::string(cols[1])));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    cols = split(line, '\t');
    if (cols.size() != 3) fail("entry line needs 3 columns: " + line);
    dl.add_entry(std::string(cols[0]), parse_dist(cols[2]), std::stoull(std::string(cols[1])));
  }
  return dl;
}

}  // namespace tamcorr
