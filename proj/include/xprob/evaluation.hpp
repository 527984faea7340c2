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

// Explanation quality metrics (surrogate fidelity and R^2, confidence drop,
// AOPC) and the template-based stability study.

#ifndef XPROB_EVALUATION_HPP_
#define XPROB_EVALUATION_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "xprob/blackbox.hpp"
#include "xprob/editor.hpp"
#include "xprob/neighborhood.hpp"
#include "xprob/ngram.hpp"
#include "xprob/surrogate.hpp"
#include "xprob/text.hpp"

namespace xprob {

struct MetricRecord {
  double r2 = 0.0;  // NaN when the neighborhood targets have no variance
  double fidelity = 0.0;
  double confidence_drop = 0.0;
  double aopc = 0.0;
  double wall_time_seconds = 0.0;
};

// Share of members on which "g >= 0.5" agrees with "f predicts the
// explicand's class".
inline double fidelity(const SurrogateModel& g, const Neighborhood& hood) {
  if (hood.empty()) throw ContractViolation("fidelity: empty neighborhood");
  std::size_t agree = 0;
  for (const auto& m : hood.members) {
    const bool g_target = g.predict(m.tokens) >= 0.5;
    const bool f_target = m.prediction.predicted_class() == hood.target_class;
    agree += g_target == f_target;
  }
  return static_cast<double>(agree) / static_cast<double>(hood.size());
}

// Unweighted coefficient of determination against the target-class
// probabilities; nullopt when the targets are constant.
inline std::optional<double> r2(const SurrogateModel& g,
                                const Neighborhood& hood) {
  if (hood.size() < 2) throw ContractViolation("r2: need at least 2 members");
  double mean = 0.0;
  for (const auto& m : hood.members) mean += m.prediction.prob(hood.target_class);
  mean /= static_cast<double>(hood.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (const auto& m : hood.members) {
    const double y = m.prediction.prob(hood.target_class);
    const double r = y - g.predict(m.tokens);
    ss_tot += (y - mean) * (y - mean);
    ss_res += r * r;
  }
  if (ss_tot == 0.0) return std::nullopt;
  return 1.0 - ss_res / ss_tot;
}

// One explanation-guided manipulation: delete a supporting explicand word,
// or insert an opposing extrinsic word.
struct ManipulationStep {
  enum class Kind { kDelete, kInsert };
  Kind kind;
  std::string token;
  double score;
};

// Supporting intrinsic words (score > threshold, one step per distinct
// token) and reported opposing extrinsic words (score < -threshold), in
// descending |score|. Equal magnitudes keep deletions first, then
// explicand/report order.
inline std::vector<ManipulationStep> manipulation_steps(
    const AttributionVector& attr, double threshold) {
  std::vector<ManipulationStep> steps;
  std::unordered_set<std::string> seen;
  for (const auto& a : attr.intrinsic) {
    if (a.score > threshold && seen.insert(a.token).second) {
      steps.push_back({ManipulationStep::Kind::kDelete, a.token, a.score});
    }
  }
  for (const auto& e : attr.reported_extrinsic()) {
    if (e.score < -threshold) {
      steps.push_back({ManipulationStep::Kind::kInsert, e.token, e.score});
    }
  }
  std::stable_sort(steps.begin(), steps.end(),
                   [](const ManipulationStep& a, const ManipulationStep& b) {
                     return std::fabs(a.score) > std::fabs(b.score);
                   });
  return steps;
}

// Deletions drop every occurrence. Insertions use the best insertion-only
// edit, falling back to appending when no insertion is valid.
inline TokenSeq apply_step(const TokenSeq& text, const ManipulationStep& step,
                           const NgramIndex& index) {
  if (step.kind == ManipulationStep::Kind::kDelete) {
    TokenSeq out;
    for (const auto& t : text) {
      if (t != step.token) out.push_back(t);
    }
    return out;
  }
  if (text.empty()) return TokenSeq{step.token};
  if (auto op = best_insertion(index, step.token, text)) {
    return apply_edit(text, step.token, *op, index.n());
  }
  TokenSeq out = text;
  out.push_back(step.token);
  return out;
}

// Applies all deletions, then all insertions (descending |score|), and
// returns f(x)[target] - f(x')[target].
inline double confidence_drop(const AttributionVector& attr,
                              const TokenSeq& explicand, Classifier& classifier,
                              const NgramIndex& index,
                              double threshold = 0.1) {
  const auto steps = manipulation_steps(attr, threshold);
  if (steps.empty()) return 0.0;
  TokenSeq text = explicand;
  for (const auto& s : steps) {
    if (s.kind == ManipulationStep::Kind::kDelete) text = apply_step(text, s, index);
  }
  for (const auto& s : steps) {
    if (s.kind == ManipulationStep::Kind::kInsert) text = apply_step(text, s, index);
  }
  const std::vector<TokenSeq> batch{explicand, text};
  const auto preds = classifier.classify_batch(batch);
  return preds[0].prob(attr.target_class) - preds[1].prob(attr.target_class);
}

// Mean over l sequential steps of f(x)[target] - f(x^(i))[target]; 0 when
// there are no relevant features.
inline double aopc(const AttributionVector& attr, const TokenSeq& explicand,
                   Classifier& classifier, const NgramIndex& index,
                   double threshold = 0.1) {
  const auto steps = manipulation_steps(attr, threshold);
  if (steps.empty()) return 0.0;
  std::vector<TokenSeq> texts{explicand};
  for (const auto& s : steps) texts.push_back(apply_step(texts.back(), s, index));
  const auto preds = classifier.classify_batch(texts);
  const double base = preds[0].prob(attr.target_class);
  double sum = 0.0;
  for (std::size_t i = 1; i < preds.size(); ++i) {
    sum += base - preds[i].prob(attr.target_class);
  }
  return sum / static_cast<double>(steps.size());
}

// ---------------------------------------------------------------------------
// Stability study.

struct WordPools {
  std::vector<std::string> negative_adjectives;
  std::vector<std::string> positive_adjectives;
  std::vector<std::string> nouns;
};

// Restaurant-review word lists.
inline WordPools default_word_pools() {
  return WordPools{
      {"horrible", "terrible", "wrong", "awful", "disappointed", "poor",
       "bland", "worst", "bad", "cheap"},
      {"delicious", "amazing", "excellent", "loved", "fantastic", "wonderful",
       "perfect", "fresh", "great", "best"},
      {"bread", "soup", "pizza", "food", "meal", "salad", "drink", "dessert",
       "fish", "steak"}};
}

struct StabilityWords {
  std::vector<std::string> negative_adjectives;  // class 0 evidence
  std::vector<std::string> positive_adjectives;  // class 1 evidence
  std::vector<std::string> nouns;

  std::vector<std::string> adjectives() const {
    std::vector<std::string> out = negative_adjectives;
    out.insert(out.end(), positive_adjectives.begin(), positive_adjectives.end());
    return out;
  }
};

namespace internal {

// Indices of the `count` best pool words by `key` (higher first), ties to
// pool order.
template <typename Key>
std::vector<std::string> TopWords(const std::vector<std::string>& pool,
                                  std::size_t count, Key key,
                                  const char* what, std::ostream& warn) {
  if (pool.size() < count) {
    warn << "warning: " << what << " pool has " << pool.size()
         << " words, fewer than " << count << "; using all of them\n";
  }
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
  order.resize(std::min(count, order.size()));
  std::vector<std::string> out;
  for (std::size_t i : order) out.push_back(pool[i]);
  return out;
}

}  // namespace internal

// Classifies each pool word on its own. Keeps the `count` negative and
// positive adjectives with the highest class-0 / class-1 confidence, and the
// `count` nouns whose class-1 probability is closest to 0.5.
inline StabilityWords select_stability_words(Classifier& classifier,
                                             const WordPools& pools,
                                             std::size_t count = 10,
                                             std::ostream& warn = std::cerr) {
  if (pools.negative_adjectives.empty() || pools.positive_adjectives.empty() ||
      pools.nouns.empty()) {
    throw ContractViolation("stability word pools must be non-empty");
  }
  auto probs = [&](const std::vector<std::string>& words) {
    std::vector<TokenSeq> texts;
    for (const auto& w : words) texts.push_back(TokenSeq{w});
    return classifier.classify_batch(texts);
  };
  const auto neg = probs(pools.negative_adjectives);
  const auto pos = probs(pools.positive_adjectives);
  const auto noun = probs(pools.nouns);
  StabilityWords out;
  out.negative_adjectives = internal::TopWords(
      pools.negative_adjectives, count,
      [&](std::size_t i) { return neg[i].prob(0); }, "negative adjective", warn);
  out.positive_adjectives = internal::TopWords(
      pools.positive_adjectives, count,
      [&](std::size_t i) { return pos[i].prob(1); }, "positive adjective", warn);
  out.nouns = internal::TopWords(
      pools.nouns, count,
      [&](std::size_t i) { return -std::fabs(noun[i].prob(1) - 0.5); }, "noun",
      warn);
  return out;
}

inline constexpr std::size_t kTemplateCount = 5;

// "<adj> <noun>", "very <adj> <noun>", "the <noun> is <adj>",
// "a very <adj> <noun>", "this is a very <adj> <noun>".
inline std::array<TokenSeq, kTemplateCount> render_templates(
    const std::string& adjective, const std::string& noun) {
  return {TokenSeq{adjective, noun},
          TokenSeq{"very", adjective, noun},
          TokenSeq{"the", noun, "is", adjective},
          TokenSeq{"a", "very", adjective, noun},
          TokenSeq{"this", "is", "a", "very", adjective, noun}};
}

struct StabilityCase {
  std::size_t id = 0;
  std::string adjective;
  std::string noun;
  std::array<TokenSeq, kTemplateCount> texts;
};

// Adjective-major enumeration of every adjective x noun pair.
inline std::vector<StabilityCase> gen_stability_cases(
    const std::vector<std::string>& adjectives,
    const std::vector<std::string>& nouns) {
  if (adjectives.empty() || nouns.empty()) {
    throw ContractViolation("stability cases need adjectives and nouns");
  }
  std::vector<StabilityCase> out;
  out.reserve(adjectives.size() * nouns.size());
  for (const auto& adj : adjectives) {
    for (const auto& noun : nouns) {
      out.push_back({out.size(), adj, noun, render_templates(adj, noun)});
    }
  }
  return out;
}

// Attribution of the case words in one rendered text.
struct StabilityObservation {
  double adj_score = 0.0;
  double noun_score = 0.0;
  double f_confidence = 0.0;
};

struct StabilityStats {
  double mu_adj = 0.0;
  double sigma_adj = 0.0;
  double mu_noun = 0.0;
  double sigma_noun = 0.0;
  double sigma_f = 0.0;
  std::size_t cases = 0;
};

namespace internal {

inline void MeanAndPopulationStd(const std::array<double, kTemplateCount>& v,
                                 double* mean, double* sd) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - m) * (x - m);
  *mean = m;
  *sd = std::sqrt(var / static_cast<double>(v.size()));
}

}  // namespace internal

// Per case: mean and population standard deviation of the five scores;
// averaged over cases per word category.
inline StabilityStats stability_stats(
    std::span<const std::array<StabilityObservation, kTemplateCount>> cases) {
  StabilityStats s;
  s.cases = cases.size();
  if (cases.empty()) return s;
  for (const auto& c : cases) {
    std::array<double, kTemplateCount> adj{}, noun{}, f{};
    for (std::size_t t = 0; t < kTemplateCount; ++t) {
      adj[t] = c[t].adj_score;
      noun[t] = c[t].noun_score;
      f[t] = c[t].f_confidence;
    }
    double m, sd;
    internal::MeanAndPopulationStd(adj, &m, &sd);
    s.mu_adj += m;
    s.sigma_adj += sd;
    internal::MeanAndPopulationStd(noun, &m, &sd);
    s.mu_noun += m;
    s.sigma_noun += sd;
    internal::MeanAndPopulationStd(f, &m, &sd);
    s.sigma_f += sd;
  }
  const auto n = static_cast<double>(cases.size());
  s.mu_adj /= n;
  s.sigma_adj /= n;
  s.mu_noun /= n;
  s.sigma_noun /= n;
  s.sigma_f /= n;
  return s;
}

// Reads a word's intrinsic score, or 0 with a warning when the word is
// missing from the attribution.
inline double word_score(const AttributionVector& attr, const std::string& word,
                         std::ostream& warn = std::cerr) {
  for (const auto& a : attr.intrinsic) {
    if (a.token == word) return a.score;
  }
  warn << "warning: '" << word << "' has no intrinsic attribution; using 0\n";
  return 0.0;
}

}  // namespace xprob

#endif  // XPROB_EVALUATION_HPP_
