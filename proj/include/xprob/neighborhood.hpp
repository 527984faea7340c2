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

// Prototype selection and recursive editing.
//
// The neighborhood starts from the k corpus counterfactuals closest to the
// explicand in tf-idf space. Each round integrates every explicand word into
// every current prototype (skipping prototypes that already contain the
// word, and words with no valid edit); the novel results become the next
// round's prototypes and everything produced is accumulated. Rounds stop
// when a round yields nothing new or the population is reached; the round
// in progress is always finished, then the `population` members closest to
// the explicand are kept and classified in one batch.

#ifndef XPROB_NEIGHBORHOOD_HPP_
#define XPROB_NEIGHBORHOOD_HPP_

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "xprob/blackbox.hpp"
#include "xprob/corpus.hpp"
#include "xprob/editor.hpp"
#include "xprob/ngram.hpp"
#include "xprob/text.hpp"

namespace xprob {

class NoPrototypesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Decides whether a prediction counts as a counterfactual for `target`.
// Without a cutoff, the argmax class must differ; with one, the target-class
// probability must fall below it.
struct CounterfactualRule {
  std::optional<double> confidence_cutoff;

  bool operator()(const Prediction& p, int target) const {
    if (confidence_cutoff) return p.prob(target) < *confidence_cutoff;
    return p.predicted_class() != target;
  }
};

struct Member {
  TokenSeq tokens;
  Prediction prediction;
  double distance = 1.0;
  int round = 0;
};

struct PrototypeSet {
  std::vector<Member> members;  // ascending distance
  int target_class = 0;
  Prediction explicand_prediction;
};

struct Neighborhood {
  TokenSeq explicand;
  int target_class = 0;
  Prediction explicand_prediction;
  std::vector<Member> members;
  int rounds = 0;

  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }
};

// Corpus documents with their tf-idf vectors and black-box predictions,
// computed once and shared by every explanation in a session.
struct PrototypePool {
  const Corpus* corpus = nullptr;
  std::vector<SparseVector> vectors;
  std::vector<Prediction> predictions;
};

inline PrototypePool build_prototype_pool(const Corpus& corpus,
                                          Classifier& classifier,
                                          const TfidfModel& tfidf,
                                          std::size_t batch_size = 1024) {
  PrototypePool pool;
  pool.corpus = &corpus;
  pool.vectors.reserve(corpus.size());
  for (const auto& doc : corpus.documents) {
    pool.vectors.push_back(tfidf.vectorize(doc));
  }
  pool.predictions.reserve(corpus.size());
  const std::span<const TokenSeq> docs(corpus.documents);
  for (std::size_t off = 0; off < docs.size(); off += batch_size) {
    const auto batch =
        classifier.classify_batch(docs.subspan(off, std::min(batch_size,
                                                             docs.size() - off)));
    pool.predictions.insert(pool.predictions.end(), batch.begin(), batch.end());
  }
  return pool;
}

inline PrototypeSet select_prototypes(const TokenSeq& explicand,
                                      const PrototypePool& pool,
                                      Classifier& classifier,
                                      const TfidfModel& tfidf, std::size_t k,
                                      const CounterfactualRule& rule = {}) {
  if (k < 1) throw ContractViolation("select_prototypes: k must be >= 1");
  PrototypeSet out;
  out.explicand_prediction = classifier.classify(explicand);
  out.target_class = out.explicand_prediction.predicted_class();
  const SparseVector x = tfidf.vectorize(explicand);

  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t d = 0; d < pool.vectors.size(); ++d) {
    if (!rule(pool.predictions[d], out.target_class)) continue;
    ranked.emplace_back(cosine_distance(x, pool.vectors[d]), d);
  }
  if (ranked.empty()) {
    throw NoPrototypesError("no counterfactual prototypes in the corpus for: " +
                            join(explicand));
  }
  const std::size_t keep = std::min(k, ranked.size());
  // Ties resolve to corpus order.
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<long>(keep),
                    ranked.end());
  for (std::size_t r = 0; r < keep; ++r) {
    const auto [dist, d] = ranked[r];
    out.members.push_back(
        Member{pool.corpus->documents[d], pool.predictions[d], dist, 0});
  }
  return out;
}

inline PrototypeSet select_prototypes(const TokenSeq& explicand,
                                      const Corpus& corpus,
                                      Classifier& classifier,
                                      const TfidfModel& tfidf, std::size_t k,
                                      const CounterfactualRule& rule = {}) {
  const PrototypePool pool = build_prototype_pool(corpus, classifier, tfidf);
  return select_prototypes(explicand, pool, classifier, tfidf, k, rule);
}

struct NeighborhoodOptions {
  std::size_t population = 400;
  int max_rounds = 32;
};

// Explicand tokens in first-occurrence order.
inline TokenSeq unique_tokens(const TokenSeq& tokens) {
  TokenSeq out;
  std::unordered_set<std::string> seen;
  for (const auto& t : tokens) {
    if (seen.insert(t).second) out.push_back(t);
  }
  return out;
}

inline Neighborhood build_neighborhood(const TokenSeq& explicand,
                                       const PrototypeSet& prototypes,
                                       const NgramIndex& index,
                                       Classifier& classifier,
                                       const TfidfModel& tfidf,
                                       const NeighborhoodOptions& options = {}) {
  if (prototypes.members.empty()) {
    throw ContractViolation("build_neighborhood: empty prototype set");
  }
  if (options.population < prototypes.members.size()) {
    throw ContractViolation(
        "build_neighborhood: population smaller than the prototype set");
  }
  const SparseVector x = tfidf.vectorize(explicand);
  const TokenSeq words = unique_tokens(explicand);

  struct Pending {
    TokenSeq tokens;
    double distance;
    int round;
  };
  std::vector<Pending> accumulated;
  std::unordered_set<TokenSeq, TokenSeqHash> in_neighborhood;
  for (const auto& m : prototypes.members) {
    if (in_neighborhood.insert(m.tokens).second) {
      accumulated.push_back({m.tokens, m.distance, 0});
    }
  }
  std::vector<Pending> current = accumulated;

  int round = 0;
  while (!current.empty() && accumulated.size() < options.population &&
         round < options.max_rounds) {
    ++round;
    std::stable_sort(current.begin(), current.end(),
                     [](const Pending& a, const Pending& b) {
                       return a.distance < b.distance;
                     });
    std::vector<Pending> fresh;
    std::unordered_set<TokenSeq, TokenSeqHash> fresh_seen;
    for (const auto& w : words) {
      for (const auto& proto : current) {
        if (contains(proto.tokens, w)) continue;
        const auto op = best_edit(index, w, proto.tokens);
        if (!op) continue;
        TokenSeq edited = apply_edit(proto.tokens, w, *op, index.n());
        if (!fresh_seen.insert(edited).second) continue;
        const double dist = cosine_distance(x, tfidf.vectorize(edited));
        fresh.push_back({std::move(edited), dist, round});
      }
    }
    // Next prototypes: the novel texts of this round.
    std::vector<Pending> next;
    for (auto& p : fresh) {
      if (in_neighborhood.insert(p.tokens).second) {
        accumulated.push_back(p);
        next.push_back(std::move(p));
      }
    }
    current = std::move(next);
  }

  std::vector<std::size_t> order(accumulated.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return accumulated[a].distance < accumulated[b].distance;
  });
  if (order.size() > options.population) order.resize(options.population);

  Neighborhood out;
  out.explicand = explicand;
  out.target_class = prototypes.target_class;
  out.explicand_prediction = prototypes.explicand_prediction;
  out.rounds = round;
  std::vector<TokenSeq> texts;
  texts.reserve(order.size());
  for (std::size_t idx : order) texts.push_back(accumulated[idx].tokens);
  const auto preds = classifier.classify_batch(texts);
  out.members.reserve(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& p = accumulated[order[r]];
    out.members.push_back(Member{std::move(texts[r]), preds[r], p.distance, p.round});
  }
  return out;
}

}  // namespace xprob

#endif  // XPROB_NEIGHBORHOOD_HPP_
