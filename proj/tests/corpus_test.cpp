// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "xprob/corpus.hpp"
#include "xprob/text.hpp"

namespace xprob {
namespace {

TEST(Tokenize, LowercasesAndStripsPunctuation) {
  EXPECT_EQ(tokenize("The Food was GREAT!"),
            (TokenSeq{"the", "food", "was", "great"}));
}

TEST(Tokenize, EmptyInput) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, KeepsApostrophesAndCollapsesWhitespace) {
  EXPECT_EQ(tokenize("don't   stop"), (TokenSeq{"don't", "stop"}));
}

TEST(Tokenize, KeepsInWordHyphens) {
  EXPECT_EQ(tokenize("a well-made (dish)."), (TokenSeq{"a", "well-made", "dish"}));
}

TEST(Tokenize, SplitsOnUnicodeWhitespace) {
  // U+00A0 no-break space and U+3000 ideographic space.
  EXPECT_EQ(tokenize("good\xC2\xA0" "food\xE3\x80\x80here"),
            (TokenSeq{"good", "food", "here"}));
}

TEST(Tokenize, PunctuationOnlyPiecesVanish) {
  EXPECT_EQ(tokenize("wow !!! ... ok"), (TokenSeq{"wow", "ok"}));
}

TEST(Tokenize, PadMarkupNeverSurvives) {
  for (const auto& t : tokenize("<pad> x <pad>")) EXPECT_NE(t, kPadToken);
}

TEST(Tokenize, IdempotentOnJoinedOutput) {
  for (const char* s : {"The Food was GREAT!", "don't   stop", "\"Hi,\" she said.",
                        "x -- y ' z", "  ", "Ok?! (fine)"}) {
    const TokenSeq once = tokenize(s);
    EXPECT_EQ(tokenize(join(once)), once) << s;
  }
}

TEST(LoadCorpus, SkipsBlankLines) {
  const auto path = testing::TempPath("blank.txt");
  testing::WriteFile(path, "one\n\n  \ntwo words\r\nthree\n");
  const Corpus c = load_corpus(path.string());
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.documents[1], (TokenSeq{"two", "words"}));
}

TEST(LoadCorpus, FiveLines) {
  const auto path = testing::TempPath("five.txt");
  testing::WriteFile(path, "a\nb\nc\nd\ne\n");
  EXPECT_EQ(load_corpus(path.string()).size(), 5u);
}

TEST(LoadCorpus, Errors) {
  EXPECT_THROW(load_corpus("/nonexistent/corpus.txt"), CorpusError);
  const auto path = testing::TempPath("empty.txt");
  testing::WriteFile(path, "\n \n!!\n");
  EXPECT_THROW(load_corpus(path.string()), CorpusError);
}

TEST(LoadCorpus, BundledSampleHasTwentyThousandLines) {
  const Corpus c = load_corpus((testing::SourceDir() / "data/corpus.txt").string());
  EXPECT_EQ(c.size(), 20000u);
}

TEST(Downsample, NestedAndDeterministic) {
  Corpus c;
  for (int i = 0; i < 100; ++i) c.documents.push_back({"d" + std::to_string(i)});
  const Corpus a = downsample(c, 20, 3), b = downsample(c, 50, 3);
  EXPECT_EQ(a.documents, downsample(c, 20, 3).documents);
  ASSERT_EQ(a.size(), 20u);
  for (const auto& d : a.documents) {
    EXPECT_NE(std::find(b.documents.begin(), b.documents.end(), d),
              b.documents.end());
  }
  EXPECT_EQ(downsample(c, 500, 3).size(), 100u);
}

TEST(Tfidf, SmoothedIdf) {
  Corpus c;
  c.documents = {{"a", "b"}, {"a"}};
  const TfidfModel m = fit_tfidf(c);
  EXPECT_DOUBLE_EQ(m.idf("a"), std::log(3.0 / 3.0) + 1.0);
  EXPECT_DOUBLE_EQ(m.idf("b"), std::log(3.0 / 2.0) + 1.0);
  // [a, b, b]: raw tf (1, 2) times idf, then unit norm.
  const SparseVector v = m.vectorize({"a", "b", "b"});
  const double wa = 1.0, wb = 2.0 * (std::log(1.5) + 1.0);
  const double norm = std::hypot(wa, wb);
  ASSERT_EQ(v.entries.size(), 2u);
  EXPECT_NEAR(v.entries[0].second, wa / norm, 1e-15);
  EXPECT_NEAR(v.entries[1].second, wb / norm, 1e-15);
  EXPECT_NEAR(v.norm(), 1.0, 1e-15);
}

TEST(Tfidf, OutOfVocabularyGivesZeroVector) {
  const TfidfModel m = fit_tfidf(testing::HandCorpus());
  EXPECT_TRUE(m.vectorize({"zebra"}).is_zero());
  EXPECT_EQ(m.column("zebra"), -1);
}

TEST(CosineDistance, Conventions) {
  const TfidfModel m = fit_tfidf(testing::HandCorpus());
  const auto a = m.vectorize({"great", "service"});
  EXPECT_NEAR(cosine_distance(a, a), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(cosine_distance(m.vectorize({"food"}), m.vectorize({"service"})),
                   1.0);
  const SparseVector zero;
  EXPECT_EQ(cosine_distance(zero, a), 1.0);
  EXPECT_EQ(cosine_distance(zero, zero), 1.0);
}

TEST(CosineDistance, SymmetricAndBounded) {
  const TfidfModel m = fit_tfidf(testing::HandCorpus());
  const std::vector<std::string> vocab{"the", "food", "was", "great",
                                       "bad", "service", "zebra"};
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    TokenSeq x, y;
    for (std::size_t k = 0, n = rng() % 6; k < n; ++k) x.push_back(vocab[rng() % 7]);
    for (std::size_t k = 0, n = rng() % 6; k < n; ++k) y.push_back(vocab[rng() % 7]);
    const auto a = m.vectorize(x), b = m.vectorize(y);
    const double d = cosine_distance(a, b);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
    EXPECT_DOUBLE_EQ(d, cosine_distance(b, a));
  }
}

TEST(DirectionDistance, OppositeDirectionsAreTwoApart) {
  const TfidfModel m = fit_tfidf(testing::HandCorpus());
  const auto a = m.vectorize({"great"}), b = m.vectorize({"bad"});
  EXPECT_NEAR(direction_distance(subtract(a, b), subtract(b, a)), 2.0, 1e-12);
  EXPECT_EQ(direction_distance(subtract(a, a), subtract(a, b)), 1.0);
}

}  // namespace
}  // namespace xprob
