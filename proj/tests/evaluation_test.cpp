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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "test_support.hpp"
#include "xprob/evaluation.hpp"
#include "xprob/explanation.hpp"

namespace xprob {
namespace {

using Example = NaiveBayesClassifier::Example;

// good and bad each appear in five single-word documents per class.
std::shared_ptr<NaiveBayesClassifier> Balanced() {
  std::vector<Example> ex;
  for (int i = 0; i < 5; ++i) {
    ex.push_back({1, {"good"}});
    ex.push_back({0, {"bad"}});
  }
  return NaiveBayesClassifier::train(ex);
}

AttributionVector Attr(int target, const TokenSeq& x,
                       const std::vector<double>& scores,
                       std::vector<ExtrinsicAttribution> extrinsic = {}) {
  AttributionVector a;
  a.target_class = target;
  for (std::size_t p = 0; p < x.size(); ++p) a.intrinsic.push_back({p, x[p], scores[p]});
  a.extrinsic = std::move(extrinsic);
  return a;
}

// Members whose class-1 probability is an exact linear function of word
// presence, plus the surrogate that reproduces it.
struct LinearWorld {
  Neighborhood hood;
  SurrogateModel g{{"bad", "great"}, {-0.35, 0.3}, 0.45, 1.0};

  LinearWorld() {
    hood.explicand = {"great"};
    hood.target_class = 1;
    for (const TokenSeq& t : {TokenSeq{"great"}, TokenSeq{"bad"},
                              TokenSeq{"great", "bad"}, TokenSeq{"the"},
                              TokenSeq{"great", "the"}}) {
      const double p = g.predict(t);
      hood.members.push_back(Member{t, Prediction{{1.0 - p, p}}, 0.3, 0});
    }
  }
};

TEST(Fidelity, PerfectSurrogateIsOne) {
  const LinearWorld w;
  EXPECT_DOUBLE_EQ(fidelity(w.g, w.hood), 1.0);
  EXPECT_DOUBLE_EQ(*r2(w.g, w.hood), 1.0);
}

TEST(Fidelity, ConstantBelowHalfAgainstPositiveLabelsIsZero) {
  Neighborhood hood;
  hood.target_class = 1;
  for (double p : {0.6, 0.7, 0.9}) {
    hood.members.push_back(Member{{"x"}, Prediction{{1.0 - p, p}}, 0.0, 0});
  }
  const SurrogateModel g({}, {}, 0.5 - 1e-3, 1.0);
  EXPECT_DOUBLE_EQ(fidelity(g, hood), 0.0);
  EXPECT_THROW(fidelity(g, Neighborhood{}), ContractViolation);
}

TEST(R2, MeanPredictorAndWorse) {
  Neighborhood hood;
  hood.target_class = 1;
  for (double p : {0.2, 0.4, 0.9}) {
    hood.members.push_back(Member{{"x"}, Prediction{{1.0 - p, p}}, 0.0, 0});
  }
  const double mean = (0.2 + 0.4 + 0.9) / 3.0;
  EXPECT_NEAR(*r2(SurrogateModel({}, {}, mean, 1.0), hood), 0.0, 1e-12);
  EXPECT_LT(*r2(SurrogateModel({}, {}, 5.0, 1.0), hood), 0.0);
}

TEST(R2, ZeroVarianceIsUndefined) {
  Neighborhood hood;
  hood.target_class = 0;
  for (int i = 0; i < 3; ++i) {
    hood.members.push_back(Member{{"x"}, Prediction{{0.6, 0.4}}, 0.0, 0});
  }
  EXPECT_FALSE(r2(SurrogateModel({}, {}, 0.6, 1.0), hood).has_value());
}

TEST(ConfidenceDrop, ZeroAttributionMeansNoManipulation) {
  auto clf = Balanced();
  const NgramIndex idx = build_index(testing::HandCorpus(), 1);
  const TokenSeq x{"good", "bad", "good"};
  const auto a = Attr(1, x, {0.0, 0.0, 0.0});
  EXPECT_EQ(confidence_drop(a, x, *clf, idx), 0.0);
  EXPECT_EQ(aopc(a, x, *clf, idx), 0.0);
  EXPECT_TRUE(manipulation_steps(a, 0.1).empty());
}

TEST(ConfidenceDrop, DeletingTheSupportingWordFlipsTheDecision) {
  auto clf = Balanced();
  const NgramIndex idx = build_index(testing::HandCorpus(), 1);
  const TokenSeq x{"good", "bad", "good"};
  // P(1 | x) = 6/7 and P(1 | [bad]) = 1/7 with add-one smoothing.
  const auto a = Attr(1, x, {0.4, -0.2, 0.4});
  const double drop = confidence_drop(a, x, *clf, idx);
  EXPECT_NEAR(drop, 6.0 / 7.0 - 1.0 / 7.0, 1e-12);
  EXPECT_GT(drop, 0.5);
  // One relevant feature: aopc equals the single-step drop.
  EXPECT_DOUBLE_EQ(aopc(a, x, *clf, idx), drop);
}

TEST(ConfidenceDrop, DeletingEverythingFallsBackToThePrior) {
  auto clf = Balanced();
  const NgramIndex idx = build_index(testing::HandCorpus(), 1);
  const TokenSeq x{"good"};
  const auto a = Attr(1, x, {0.9});
  EXPECT_NEAR(confidence_drop(a, x, *clf, idx), 6.0 / 7.0 - 0.5, 1e-12);
}

TEST(Manipulation, StepsOrderAndKinds) {
  const TokenSeq x{"a", "b", "c", "a"};
  const auto attr = Attr(0, x, {0.2, -0.5, 0.6, 0.2},
                         {{"d", -0.3}, {"e", 0.4}, {"f", -0.05}});
  const auto steps = manipulation_steps(attr, 0.1);
  ASSERT_EQ(steps.size(), 3u);
  EXPECT_EQ(steps[0].token, "c");
  EXPECT_EQ(steps[1].token, "d");
  EXPECT_EQ(steps[1].kind, ManipulationStep::Kind::kInsert);
  EXPECT_EQ(steps[2].token, "a");
  EXPECT_EQ(steps[2].kind, ManipulationStep::Kind::kDelete);
}

TEST(Manipulation, InsertionUsesTheCorpusOrAppends) {
  const NgramIndex idx = build_index(testing::HandCorpus(), 1);
  const ManipulationStep ins{ManipulationStep::Kind::kInsert, "great", -0.3};
  EXPECT_EQ(apply_step({"the", "food", "was", "bad"}, ins, idx),
            (TokenSeq{"the", "food", "was", "great", "bad"}));
  const ManipulationStep unknown{ManipulationStep::Kind::kInsert, "zebra", -0.3};
  EXPECT_EQ(apply_step({"the", "food"}, unknown, idx),
            (TokenSeq{"the", "food", "zebra"}));
  EXPECT_EQ(apply_step({}, unknown, idx), (TokenSeq{"zebra"}));
  const ManipulationStep del{ManipulationStep::Kind::kDelete, "a", 0.3};
  EXPECT_EQ(apply_step({"a", "b", "a"}, del, idx), (TokenSeq{"b"}));
}

TEST(Aopc, MeanOfSequentialDrops) {
  auto clf = Balanced();
  const NgramIndex idx = build_index(testing::HandCorpus(), 1);
  const TokenSeq x{"good", "good", "the"};
  const auto attr = Attr(1, x, {0.5, 0.5, 0.0}, {{"bad", -0.2}});
  // Steps: delete good, then insert bad at its best corpus-backed site.
  const double base = clf->classify(x).prob(1);
  const double s1 = clf->classify({"the"}).prob(1);
  const TokenSeq after = apply_step({"the"}, {ManipulationStep::Kind::kInsert, "bad", -0.2}, idx);
  const double s2 = clf->classify(after).prob(1);
  EXPECT_NEAR(aopc(attr, x, *clf, idx), ((base - s1) + (base - s2)) / 2.0, 1e-12);
  EXPECT_NEAR(confidence_drop(attr, x, *clf, idx), base - s2, 1e-12);
}

// ---------------------------------------------------------------------------

TEST(Stability, DefaultPoolsMatchTheWordTable) {
  const WordPools p = default_word_pools();
  EXPECT_EQ(p.negative_adjectives.size(), 10u);
  EXPECT_EQ(p.positive_adjectives.size(), 10u);
  EXPECT_EQ(p.nouns.size(), 10u);
  EXPECT_EQ(p.negative_adjectives.front(), "horrible");
  EXPECT_EQ(p.nouns.front(), "bread");
}

TEST(Stability, CaseGeneration) {
  const WordPools p = default_word_pools();
  StabilityWords w{p.negative_adjectives, p.positive_adjectives, p.nouns};
  const auto cases = gen_stability_cases(w.adjectives(), w.nouns);
  EXPECT_EQ(cases.size(), 200u);
  const auto it = std::find_if(cases.begin(), cases.end(), [](const auto& c) {
    return c.adjective == "delicious" && c.noun == "pizza";
  });
  ASSERT_NE(it, cases.end());
  EXPECT_EQ(join(it->texts[2]), "the pizza is delicious");
  EXPECT_EQ(join(it->texts[4]), "this is a very delicious pizza");
  for (std::size_t i = 0; i < cases.size(); ++i) EXPECT_EQ(cases[i].id, i);
  EXPECT_THROW(gen_stability_cases({}, {"x"}), ContractViolation);
}

TEST(Stability, WordSelection) {
  auto clf = std::make_shared<testing::FunctionClassifier>([](const TokenSeq& t) {
    const std::string& w = t.at(0);
    if (w == "bread") return 0.5;
    if (w == "soup") return 0.52;
    if (w == "awful") return 0.01;
    if (w == "great") return 0.99;
    return 0.3;
  });
  WordPools pools{{"bad", "awful"}, {"nice", "great"}, {"soup", "pizza", "bread"}};
  std::ostringstream warn;
  const auto w = select_stability_words(*clf, pools, 2, warn);
  EXPECT_EQ(w.nouns, (std::vector<std::string>{"bread", "soup"}));
  EXPECT_EQ(w.negative_adjectives, (std::vector<std::string>{"awful", "bad"}));
  EXPECT_EQ(w.positive_adjectives, (std::vector<std::string>{"great", "nice"}));
  EXPECT_TRUE(warn.str().empty());
  select_stability_words(*clf, pools, 10, warn);
  EXPECT_NE(warn.str().find("fewer than 10"), std::string::npos);
}

TEST(Stability, StatsArePopulationMoments) {
  std::array<StabilityObservation, kTemplateCount> flat, spread;
  for (std::size_t t = 0; t < kTemplateCount; ++t) {
    flat[t] = {0.4, 0.0, 0.9};
    spread[t] = {0.1 * static_cast<double>(t), 0.02, 0.9};
  }
  const std::vector<std::array<StabilityObservation, kTemplateCount>> one{flat};
  const StabilityStats a = stability_stats(one);
  EXPECT_EQ(a.sigma_adj, 0.0);
  EXPECT_DOUBLE_EQ(a.mu_adj, 0.4);
  const std::vector<std::array<StabilityObservation, kTemplateCount>> two{flat, spread};
  const StabilityStats b = stability_stats(two);
  // spread: values 0, .1, .2, .3, .4 have mean .2 and population sd sqrt(.02).
  EXPECT_NEAR(b.sigma_adj, std::sqrt(0.02) / 2.0, 1e-12);
  EXPECT_NEAR(b.mu_adj, 0.3, 1e-12);
  EXPECT_NEAR(b.mu_noun, 0.01, 1e-12);
  EXPECT_EQ(b.sigma_f, 0.0);
  EXPECT_EQ(b.cases, 2u);
}

TEST(Stability, MissingWordScoresZeroWithWarning) {
  const auto attr = Attr(1, {"the", "pizza"}, {0.0, 0.2});
  std::ostringstream warn;
  EXPECT_DOUBLE_EQ(word_score(attr, "pizza", warn), 0.2);
  EXPECT_TRUE(warn.str().empty());
  EXPECT_EQ(word_score(attr, "delicious", warn), 0.0);
  EXPECT_NE(warn.str().find("delicious"), std::string::npos);
}

// ---------------------------------------------------------------------------

class Instances : public ::testing::Test {
 protected:
  Corpus corpus_ = testing::HandCorpus();
  TfidfModel tfidf_ = fit_tfidf(corpus_);

  Neighborhood Hood(const std::vector<std::pair<TokenSeq, double>>& members,
                    int cls_of_all = 1) {
    Neighborhood h;
    h.explicand = {"great", "service"};
    h.target_class = 1;
    for (const auto& [t, d] : members) {
      const double p = cls_of_all == 1 ? 0.8 : 0.2;
      h.members.push_back(Member{t, Prediction{{1.0 - p, p}}, d, 0});
    }
    return h;
  }
};

TEST_F(Instances, LambdaOneIsSortByDistance) {
  Neighborhood h = Hood({{{"a"}, 0.5}, {{"b"}, 0.1}, {{"c"}, 0.3},
                         {{"d"}, 0.3}, {{"e"}, 0.9}, {{"f"}, 0.05}});
  h.members[2].prediction = Prediction{{0.9, 0.1}};
  h.members[4].prediction = Prediction{{0.9, 0.1}};
  const auto got = select_instances(h, tfidf_, 1.0, 3);
  // Oracle: stable sort by distance within each class.
  std::vector<std::size_t> fac, cf;
  for (std::size_t i = 0; i < h.size(); ++i) {
    (h.members[i].prediction.predicted_class() == 1 ? fac : cf).push_back(i);
  }
  auto by_dist = [&](std::size_t a, std::size_t b) {
    return h.members[a].distance < h.members[b].distance;
  };
  std::stable_sort(fac.begin(), fac.end(), by_dist);
  std::stable_sort(cf.begin(), cf.end(), by_dist);
  std::vector<TokenSeq> want_f, want_c;
  for (std::size_t k = 0; k < std::min<std::size_t>(3, fac.size()); ++k) {
    want_f.push_back(h.members[fac[k]].tokens);
  }
  for (std::size_t k = 0; k < std::min<std::size_t>(3, cf.size()); ++k) {
    want_c.push_back(h.members[cf[k]].tokens);
  }
  EXPECT_EQ(got.factuals, want_f);
  EXPECT_EQ(got.counterfactuals, want_c);
  EXPECT_EQ(got.counterfactuals.size(), 2u);
}

TEST_F(Instances, DiversityBreaksEqualCloseness) {
  // Candidates 1 and 2 are equally close; 1 repeats the direction of 0.
  const Neighborhood h = Hood({{{"great", "service", "food"}, 0.1},
                               {{"great", "service", "food"}, 0.2},
                               {{"great", "service", "the"}, 0.2}});
  const auto got = select_instances(h, tfidf_, 0.5, 2);
  ASSERT_EQ(got.factuals.size(), 2u);
  EXPECT_EQ(got.factuals[1], (TokenSeq{"great", "service", "the"}));
  // With lambda = 1 the earlier index wins the tie instead.
  EXPECT_EQ(select_instances(h, tfidf_, 1.0, 2).factuals[1],
            (TokenSeq{"great", "service", "food"}));
  EXPECT_TRUE(got.counterfactuals.empty());
}

TEST_F(Instances, ContractChecks) {
  const Neighborhood h = Hood({{{"a"}, 0.1}});
  EXPECT_THROW(select_instances(h, tfidf_, 1.5, 2), ContractViolation);
  EXPECT_THROW(select_instances(h, tfidf_, 0.5, 0), ContractViolation);
}

ExplanationReport SampleReport(int cls) {
  ExplanationReport r;
  r.explicand = {"the", "food", "was", "excellent"};
  r.predicted_class = cls;
  r.confidence = 0.93;
  r.intrinsic = {{0, "the", 0.0}, {1, "food", -0.04}, {2, "was", 0.01},
                 {3, "excellent", 0.33}};
  r.extrinsic = {{"awful", -0.25}};
  r.instances.factuals = {{"the", "food", "was", "great"}};
  r.instances.counterfactuals = {{"the", "food", "was", "bad"}};
  r.meta.corpus_sha256 = "abc123";
  r.meta.classifier = "builtin:test";
  return r;
}

TEST(Render, HtmlSaliency) {
  const std::string html = render_html(SampleReport(1));
  EXPECT_NE(html.find("rgba(0, 0, 255, 0.330)\">excellent<"), std::string::npos);
  EXPECT_NE(html.find("<span class=\"tok\">the</span>"), std::string::npos);
  // Negative evidence for class 1 is red.
  EXPECT_NE(html.find("rgba(255, 0, 0, 0.250)\">awful<"), std::string::npos);
  // For a class-0 decision a supporting score means negative sentiment.
  const std::string html0 = render_html(SampleReport(0));
  EXPECT_NE(html0.find("rgba(255, 0, 0, 0.330)\">excellent<"), std::string::npos);
}

TEST(Render, HtmlEscapesAndCapsOpacity) {
  ExplanationReport r = SampleReport(1);
  r.intrinsic = {{0, "<b>", 2.5}};
  const std::string html = render_html(r);
  EXPECT_NE(html.find("rgba(0, 0, 255, 1.000)\">&lt;b&gt;<"), std::string::npos);
}

TEST(Render, JsonRoundTrip) {
  const ExplanationReport r = SampleReport(1);
  const std::string text = render(r, ReportFormat::kJson);
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(report_from_json(j), r);
  // Stable top-level key order.
  const auto oj = nlohmann::ordered_json::parse(text);
  std::vector<std::string> keys;
  for (const auto& [k, _] : oj.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"schema_version", "explicand",
                                            "prediction", "attributions",
                                            "instances", "meta"}));
  auto bad = j;
  bad["schema_version"] = 99;
  EXPECT_THROW(report_from_json(bad), std::runtime_error);
}

TEST(Render, TextAndFormatParsing) {
  const std::string text = render(SampleReport(1), ReportFormat::kText);
  EXPECT_NE(text.find("excellent"), std::string::npos);
  EXPECT_NE(text.find("+0.3300"), std::string::npos);
  EXPECT_EQ(parse_format("html"), ReportFormat::kHtml);
  EXPECT_THROW(parse_format("pdf"), std::invalid_argument);
}

TEST(Render, ReportKeepsOnlyReportedExtrinsics) {
  Neighborhood h;
  h.explicand = {"x"};
  h.target_class = 0;
  h.explicand_prediction = Prediction{{0.7, 0.3}};
  AttributionVector a = Attr(0, {"x"}, {0.2}, {{"y", -0.5}, {"z", 0.05}});
  const ExplanationReport r = make_report(h, a, {}, {});
  ASSERT_EQ(r.extrinsic.size(), 1u);
  EXPECT_EQ(r.extrinsic[0].token, "y");
  EXPECT_DOUBLE_EQ(r.confidence, 0.7);
}

}  // namespace
}  // namespace xprob
