#include <gtest/gtest.h>

#include "support.hpp"

using namespace tamcorr;

namespace {

const std::string S(kKeyTokenSep);

TaggedSentence sentence(std::string_view tagged) { return parse_tagged_sentence(tagged); }

bool has(const std::vector<std::string>& keys, const std::string& k) {
  return std::find(keys.begin(), keys.end(), k) != keys.end();
}

bool has_prefix(const std::vector<std::string>& keys, const std::string& p) {
  return std::any_of(keys.begin(), keys.end(), [&](const auto& k) { return k.starts_with(p); });
}

}  // namespace

TEST(Features, FigureOneSentence) {
  auto keys = feature_keys(sentence("I <v>did not think</v> he was so timid."));
  EXPECT_TRUE(has(keys, "L:1:I"));
  EXPECT_TRUE(has(keys, "R:1:did"));
  EXPECT_TRUE(has(keys, "R:2:did" + S + "not"));
  EXPECT_TRUE(has(keys, "C:1:think"));
  EXPECT_TRUE(has(keys, "C:2:not" + S + "think"));
  EXPECT_TRUE(has(keys, "C:4:I" + S + "did" + S + "not" + S + "think"));
  EXPECT_TRUE(has(keys, "F:1:."));
  for (int k = 2; k <= 5; ++k) EXPECT_FALSE(has_prefix(keys, "L:" + std::to_string(k) + ":"));
  EXPECT_TRUE(has(keys, "R:8:did" + S + "not" + S + "think" + S + "he" + S + "was" + S + "so" + S +
                            "timid" + S + "."));
  EXPECT_FALSE(has_prefix(keys, "R:9:"));
  EXPECT_FALSE(has_prefix(keys, "R:10:"));
  EXPECT_FALSE(has_prefix(keys, "C:5:"));
  EXPECT_EQ(keys.size(), 1u + 8u + 4u + 1u);
}

TEST(Features, AtMostTwentySix) {
  std::string longer = "a b c d e f g h i j <v>x</v>";
  for (int i = 0; i < 20; ++i) longer += " w" + std::to_string(i);
  auto feats = extract_features(sentence(longer));
  EXPECT_EQ(feats.size(), kMaxFeatures);
  EXPECT_EQ(kMaxFeatures, 26u);
}

TEST(Features, SentenceInitialVerbHasNoLeftContext) {
  auto keys = feature_keys(sentence("<v>Go</v> home ."));
  EXPECT_FALSE(has_prefix(keys, "L:"));
  EXPECT_TRUE(has(keys, "R:3:Go" + S + "home" + S + "."));
  EXPECT_TRUE(has(keys, "F:1:."));
}

TEST(Features, SplitVerbPhraseDropsTheGap) {
  auto split_keys = feature_keys(sentence("I <v>have</v> already <v>finished</v> my homework."));
  auto joined_keys = feature_keys(sentence("I <v>have finished</v> my homework."));
  EXPECT_EQ(split_keys, joined_keys);
  for (const auto& k : split_keys) EXPECT_EQ(k.find("already"), std::string::npos) << k;
}

TEST(Features, AdjacentSegmentsMerge) {
  auto a = feature_keys(sentence("I <v>have</v><v>gone</v> home."));
  auto b = feature_keys(sentence("I <v>have gone</v> home."));
  EXPECT_EQ(a, b);
}

TEST(Features, IndependentOfVj) {
  auto with = feature_keys(sentence("He <v>came</v>, but I <vj>was</vj> out."));
  auto without = feature_keys(sentence("He <v>came</v>, but I was out."));
  EXPECT_EQ(with, without);
}

TEST(Features, NormalizeKeepsVjPosition) {
  auto s = normalize_split_verb(sentence("<v>Can</v> you <v>swim</v> and <vj>dive</vj>?"));
  EXPECT_EQ(s.tokens, (std::vector<std::string>{"Can", "swim", "and", "dive", "?"}));
  ASSERT_TRUE(s.vj_segment);
  EXPECT_EQ(s.tokens[s.vj_segment->begin], "dive");
  EXPECT_EQ(s.raw, "<v>Can swim</v> and <vj>dive</vj> ?");
}

TEST(Features, KeysAreInjective) {
  Feature a{FeatureKind::RightOfOpenV, {"a" + S + "b"}};
  Feature b{FeatureKind::RightOfOpenV, {"a", "b"}};
  EXPECT_NE(feature_key(a), feature_key(b));
  Feature c{FeatureKind::RightOfOpenV, {"a\\", "b"}};
  Feature d{FeatureKind::RightOfOpenV, {"a", "\\b"}};
  EXPECT_NE(feature_key(c), feature_key(d));
}
