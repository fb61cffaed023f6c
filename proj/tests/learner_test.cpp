#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "support.hpp"

using namespace tamcorr;
using namespace testing_support;

namespace {

TrainingDataset make(std::vector<std::string> cats,
                     std::vector<std::pair<std::vector<std::string>, std::size_t>> rows) {
  TrainingDataset d;
  d.categories = std::move(cats);
  for (auto& [f, c] : rows) d.items.push_back({std::move(f), c});
  return d;
}

MaxentConfig converging() {
  MaxentConfig c;
  c.max_iterations = 200000;
  c.line_search = true;
  return c;
}

double sum(const Distribution& d) { return std::accumulate(d.begin(), d.end(), 0.0); }

}  // namespace

// -- maxent ----------------------------------------------------------------

TEST(Maxent, SingleCategoryIsDegenerate) {
  auto d = make({"A"}, {{{"f1"}, 0}, {{"f2"}, 0}, {{}, 0}});
  auto m = train_maxent(d);
  EXPECT_GE(predict_maxent(m, {"f1"})[0], 1.0 - 1e-3);
  EXPECT_GE(predict_maxent(m, {"nope"})[0], 1.0 - 1e-3);
}

TEST(Maxent, BalancedBiasOnlyIsUniform) {
  auto d = make({"A", "B"}, {{{}, 0}, {{}, 1}, {{}, 0}, {{}, 1}});
  auto m = train_maxent(d);
  auto p = predict_maxent(m, {});
  EXPECT_NEAR(p[0], 0.5, 1e-3);
  EXPECT_NEAR(p[1], 0.5, 1e-3);
}

TEST(Maxent, SingleFeatureMatchesEmpiricalRate) {
  auto d = make({"A", "B"}, {{{"f1"}, 0}, {{"f1"}, 0}, {{"f1"}, 0}, {{"f1"}, 1}});
  auto m = train_maxent(d);
  EXPECT_NEAR(predict_maxent(m, {"f1"})[0], 0.75, 1e-2);
}

TEST(Maxent, EmptyAndUnknownContextsGiveThePrior) {
  // f1 and f2 never co-occur with the empty context; the bias carries the prior
  auto d = make({"A", "B", "C"},
                {{{}, 0}, {{}, 0}, {{}, 1}, {{}, 2}, {{"f1"}, 1}, {{"f2"}, 2}, {{"f1", "f2"}, 0}});
  auto m = train_maxent(d, converging());
  ASSERT_TRUE(m.meta().converged);
  auto empty = predict_maxent(m, {});
  auto unknown = predict_maxent(m, {"zz", "yy"});
  EXPECT_EQ(empty, unknown);
  EXPECT_NEAR(sum(empty), 1.0, 1e-9);
}

TEST(Maxent, PriorReproducedWhenNoFeatures) {
  auto d = make({"A", "B", "C"}, {{{}, 0}, {{}, 0}, {{}, 0}, {{}, 1}, {{}, 2}, {{}, 2}});
  auto m = train_maxent(d, converging());
  auto p = predict_maxent(m, {});
  EXPECT_NEAR(p[0], 0.5, 1e-3);
  EXPECT_NEAR(p[1], 1.0 / 6.0, 1e-3);
  EXPECT_NEAR(p[2], 2.0 / 6.0, 1e-3);
}

TEST(Maxent, ConstraintsHoldOnRandomData) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto d = random_dataset(seed);
    auto m = train_maxent(d, converging());
    EXPECT_TRUE(m.meta().converged) << seed;
    const double r = constraint_residual(m, d);
    EXPECT_LE(r, 1e-3) << seed;
    EXPECT_NEAR(r, m.meta().final_residual, 1e-9) << seed;
  }
}

TEST(Maxent, LikelihoodNeverDecreases) {
  for (bool search : {false, true}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      MaxentConfig c;
      c.line_search = search;
      c.max_iterations = 300;
      auto m = train_maxent(random_dataset(seed), c);
      const auto& ll = m.meta().log_likelihood;
      ASSERT_GE(ll.size(), 2u);
      for (std::size_t i = 1; i < ll.size(); ++i)
        ASSERT_GE(ll[i], ll[i - 1] - 1e-10) << "seed " << seed << " iteration " << i;
    }
  }
}

TEST(Maxent, ReportsNonConvergenceHonestly) {
  auto d = random_dataset(3);
  MaxentConfig c;
  c.max_iterations = 5;
  std::vector<std::string> warnings;
  c.on_warning = [&](const std::string& w) { warnings.push_back(w); };
  auto m = train_maxent(d, c);
  EXPECT_FALSE(m.meta().converged);
  EXPECT_EQ(m.meta().iterations, 5u);
  EXPECT_GT(m.meta().final_residual, c.tolerance);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(Maxent, PredictionsAreNormalized) {
  auto d = random_dataset(7);
  auto m = train_maxent(d);
  Rng rng(99);
  for (int q = 0; q < 50; ++q) {
    std::vector<std::string> f;
    for (auto j : sample_indices(40, 1 + uniform_below(rng, 6), rng)) f.push_back("f" + std::to_string(j));
    auto p = predict_maxent(m, canonical_features(f));
    EXPECT_NEAR(sum(p), 1.0, 1e-9);
    for (double v : p) EXPECT_GE(v, 0.0);
  }
}

TEST(Maxent, DeterministicAndOrderFree) {
  auto d = random_dataset(11);
  auto a = train_maxent(d);
  auto b = train_maxent(d);
  EXPECT_EQ(a.weights(), b.weights());

  auto shuffled = d;
  std::mt19937 g(5);
  std::shuffle(shuffled.items.begin(), shuffled.items.end(), g);
  for (auto& item : shuffled.items) std::shuffle(item.features.begin(), item.features.end(), g);
  auto c = train_maxent(shuffled);
  for (const auto& item : d.items) {
    auto pa = predict_maxent(a, canonical_features(item.features));
    auto pc = predict_maxent(c, canonical_features(item.features));
    for (std::size_t k = 0; k < pa.size(); ++k) EXPECT_NEAR(pa[k], pc[k], 1e-12);
  }
}

TEST(Maxent, OnlyObservedPairsAreWeighted) {
  auto d = make({"A", "B"}, {{{"f1"}, 0}, {{"f2"}, 1}});
  auto m = train_maxent(d);
  EXPECT_EQ(m.weight("f1", 1), 0.0);
  EXPECT_NE(m.weight("f1", 0), 0.0);
}

TEST(Maxent, RejectsBadInput) {
  EXPECT_THROW(train_maxent(make({"A"}, {})), std::invalid_argument);
  EXPECT_THROW(train_maxent(make({"A"}, {{{"*bias*"}, 0}})), std::invalid_argument);
  EXPECT_THROW(train_maxent(make({"A"}, {{{"f"}, 3}})), std::invalid_argument);
}

TEST(Maxent, ModelFileRoundTrip) {
  auto d = random_dataset(4);
  MaxentConfig c;
  c.line_search = true;
  auto m = train_maxent(d, c);
  std::stringstream io;
  write_maxent_model(io, m);
  auto back = read_maxent_model(io);
  EXPECT_EQ(back.categories(), m.categories());
  EXPECT_EQ(back.weights(), m.weights());
  EXPECT_EQ(back.config().line_search, true);
  EXPECT_EQ(back.meta().iterations, m.meta().iterations);
  EXPECT_EQ(back.meta().final_residual, m.meta().final_residual);
  std::stringstream bad("#tamcorr-maxent-model\tv0\n");
  EXPECT_THROW(read_maxent_model(bad), std::runtime_error);
}

// -- decision list ---------------------------------------------------------

TEST(DecisionList, WorkedExample) {
  auto d = make({"A", "B"}, {{{"f1"}, 0},
                             {{"f1"}, 0},
                             {{"f1"}, 1},
                             {{"f1"}, 1},
                             {{"f2"}, 1},
                             {{"f2"}, 1},
                             {{"f1", "f2"}, 1}});
  auto dl = train_decision_list(d);
  // five items carry f1 (the last one shares it with f2)
  ASSERT_NE(dl.find("f1"), nullptr);
  EXPECT_DOUBLE_EQ(dl.find("f1")->distribution[0], 0.4);
  EXPECT_EQ(dl.find("f1")->support, 5u);
  EXPECT_DOUBLE_EQ(dl.find("f2")->distribution[1], 1.0);

  auto both = predict_decision_list(dl, {"f1", "f2"});
  EXPECT_EQ(both.used_feature, "f2");
  EXPECT_DOUBLE_EQ(both.distribution[1], 1.0);
  EXPECT_EQ(both.support, 3u);

  auto one = predict_decision_list(dl, {"f1"});
  EXPECT_DOUBLE_EQ(one.distribution[0], 0.4);
  EXPECT_DOUBLE_EQ(one.distribution[1], 0.6);
  EXPECT_EQ(one.support, 5u);

  auto none = predict_decision_list(dl, {"zz"});
  EXPECT_FALSE(none.used_feature);
  EXPECT_EQ(none.support, 7u);
  EXPECT_DOUBLE_EQ(none.distribution[0], 2.0 / 7.0);
}

TEST(DecisionList, SingleItem) {
  auto dl = train_decision_list(make({"A"}, {{{"f"}, 0}}));
  EXPECT_DOUBLE_EQ(dl.find("f")->distribution[0], 1.0);
  EXPECT_EQ(dl.find("f")->support, 1u);
}

TEST(DecisionList, TiesPreferSupportThenKey) {
  auto d = make({"A", "B"},
                {{{"a", "b", "c"}, 0}, {{"b"}, 0}, {{"c"}, 0}, {{"z"}, 1}});
  auto dl = train_decision_list(d);
  // a, b, c all have strength 1; b and c have support 2
  EXPECT_EQ(predict_decision_list(dl, {"a", "b", "c"}).used_feature, "b");
  EXPECT_EQ(predict_decision_list(dl, {"c", "a"}).used_feature, "c");
}

TEST(DecisionList, EntriesAreDistributions) {
  auto dl = train_decision_list(random_dataset(21, 50, 10, 5));
  for (const auto& [key, e] : dl.entries()) {
    EXPECT_NEAR(sum(e.distribution), 1.0, 1e-9) << key;
    EXPECT_GE(e.support, 1u);
    EXPECT_EQ(e.strength, *std::max_element(e.distribution.begin(), e.distribution.end()));
  }
}

TEST(DecisionList, MatchesBruteForceOracle) {
  std::size_t ties = 0, fallbacks = 0;
  Rng rng(2024);
  for (std::uint64_t pair = 0; pair < 100; ++pair) {
    auto d = random_dataset(500 + pair, 50, 10, 5);
    auto dl = train_decision_list(d);
    std::vector<std::string> query;
    for (auto j : sample_indices(12, uniform_below(rng, 5), rng))
      query.push_back("f" + std::to_string(j));  // f10, f11 are never seen
    auto got = predict_decision_list(dl, query);
    auto want = oracle_decision(d, query);
    ASSERT_EQ(got.distribution, want.distribution) << pair;
    ASSERT_EQ(got.used_feature, want.feature) << pair;
    ASSERT_EQ(got.support, want.support) << pair;
    if (!want.feature) ++fallbacks;
    std::size_t at_max = 0;
    for (const auto& f : query)
      if (auto* e = dl.find(f); e && e->strength == dl.find(*want.feature)->strength) ++at_max;
    if (want.feature && at_max > 1) ++ties;
  }
  EXPECT_GT(ties, 0u);
  EXPECT_GT(fallbacks, 0u);
}

TEST(DecisionList, ModelFileRoundTrip) {
  auto d = random_dataset(8, 50, 10, 5);
  auto dl = train_decision_list(d);
  std::stringstream io;
  write_decision_list(io, dl);
  auto back = read_decision_list(io);
  EXPECT_EQ(back.categories(), dl.categories());
  EXPECT_EQ(back.prior(), dl.prior());
  EXPECT_EQ(back.item_count(), dl.item_count());
  ASSERT_EQ(back.entries().size(), dl.entries().size());
  for (const auto& [key, e] : dl.entries()) {
    ASSERT_NE(back.find(key), nullptr);
    EXPECT_EQ(back.find(key)->distribution, e.distribution);
    EXPECT_EQ(back.find(key)->support, e.support);
  }
}
