#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace tamcorr {

/// Probabilities indexed like the owning model's category list.
using Distribution = std::vector<double>;

struct TrainingItem {
  std::vector<std::string> features;  // feature keys; duplicates are ignored
  std::size_t category = 0;           // index into TrainingDataset::categories

  bool operator==(const TrainingItem&) const = default;
};

struct TrainingDataset {
  std::vector<std::string> categories;
  std::vector<TrainingItem> items;

  void validate() const {
    if (items.empty()) throw std::invalid_argument("training dataset is empty");
    if (categories.empty()) throw std::invalid_argument("training dataset has no categories");
    for (const auto& it : items)
      if (it.category >= categories.size())
        throw std::invalid_argument("training item category out of range");
  }
};

/// Sorted and de-duplicated copy of a feature list.
inline std::vector<std::string> canonical_features(std::vector<std::string> f) {
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  return f;
}

}  // namespace tamcorr
