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

// End-to-end explanation sessions: one corpus, one classifier, many
// explicands.

#ifndef XPROB_PIPELINE_HPP_
#define XPROB_PIPELINE_HPP_

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xprob/baseline.hpp"
#include "xprob/blackbox.hpp"
#include "xprob/corpus.hpp"
#include "xprob/editor.hpp"
#include "xprob/evaluation.hpp"
#include "xprob/explanation.hpp"
#include "xprob/neighborhood.hpp"
#include "xprob/ngram.hpp"
#include "xprob/subprocess.hpp"
#include "xprob/surrogate.hpp"

namespace xprob {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Method { kXprob, kDrop };

inline Method parse_method(const std::string& name) {
  if (name == "xprob") return Method::kXprob;
  if (name == "drop") return Method::kDrop;
  throw ConfigError("unknown method: " + name + " (expected xprob or drop)");
}

inline std::string method_name(Method m) {
  return m == Method::kXprob ? "xprob" : "drop";
}

struct RunConfig {
  std::string corpus_path;
  std::string classifier_spec;
  int n = 1;
  std::size_t prototypes = 80;
  std::size_t population = 400;
  double sigma = 1.0;
  double lambda = 0.5;
  double ridge = 1e-3;
  double threshold = 0.1;
  std::size_t instances = 5;
  std::uint64_t seed = 0;
  int max_rounds = 32;
  std::optional<double> counterfactual_cutoff;

  void validate() const {
    if (n < 1) throw ConfigError("--n must be >= 1");
    if (prototypes < 1) throw ConfigError("--prototypes must be >= 1");
    if (population < prototypes) {
      throw ConfigError("--population must be >= --prototypes");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw ConfigError("--sigma must be positive");
    }
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      throw ConfigError("--lambda must lie in [0, 1]");
    }
    if (!(ridge > 0.0) || !std::isfinite(ridge)) {
      throw ConfigError("--ridge must be positive");
    }
    if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
      throw ConfigError("--threshold must be non-negative");
    }
    if (instances < 1) throw ConfigError("--instances must be >= 1");
    if (max_rounds < 1) throw ConfigError("max rounds must be >= 1");
    if (counterfactual_cutoff &&
        !(*counterfactual_cutoff > 0.0 && *counterfactual_cutoff <= 1.0)) {
      throw ConfigError("counterfactual cutoff must lie in (0, 1]");
    }
  }
};

// "builtin:<model.json>" or "cmd:<shell command>". The result is wrapped in
// a response cache.
inline ClassifierHandle make_classifier(const std::string& spec) {
  ClassifierHandle inner;
  if (spec.rfind("builtin:", 0) == 0) {
    inner = NaiveBayesClassifier::load(spec.substr(8));
  } else if (spec.rfind("cmd:", 0) == 0) {
    inner = std::make_shared<ExternalClassifier>(spec.substr(4));
  } else {
    throw ConfigError("classifier spec must start with builtin: or cmd:, got " +
                      spec);
  }
  return std::make_shared<CachingClassifier>(std::move(inner));
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

// Hash of the tokenized documents, one per line; identical for equal
// corpora regardless of source formatting.
inline std::string corpus_sha256(const Corpus& corpus) {
  std::string buf;
  for (const auto& d : corpus.documents) {
    buf += join(d);
    buf += '\n';
  }
  return sha256_hex(buf);
}

struct ExplainResult {
  Method method = Method::kXprob;
  Neighborhood neighborhood;
  SurrogateModel surrogate;
  AttributionVector attributions;
  InstanceExplanation instances;
  ExplanationReport report;
  double seconds = 0.0;
};

class Explainer {
 public:
  Explainer(Corpus corpus, ClassifierHandle classifier, RunConfig config)
      : corpus_(std::move(corpus)),
        classifier_(std::move(classifier)),
        config_(std::move(config)) {
    config_.validate();
    tfidf_ = fit_tfidf(corpus_);
    index_ = build_index(corpus_, config_.n);
    pool_ = build_prototype_pool(corpus_, *classifier_, tfidf_);
    corpus_hash_ = corpus_sha256(corpus_);
  }

  Explainer(const Explainer&) = delete;
  Explainer& operator=(const Explainer&) = delete;

  const Corpus& corpus() const { return corpus_; }
  const TfidfModel& tfidf() const { return tfidf_; }
  const NgramIndex& index() const { return index_; }
  const RunConfig& config() const { return config_; }
  Classifier& classifier() const { return *classifier_; }

  Neighborhood neighborhood(const TokenSeq& explicand, Method method) const {
    if (explicand.empty()) throw ContractViolation("explicand is empty");
    if (method == Method::kDrop) {
      return perturb_by_dropping(explicand, config_.population, config_.seed,
                                 *classifier_, tfidf_);
    }
    const CounterfactualRule rule{config_.counterfactual_cutoff};
    const PrototypeSet protos = select_prototypes(
        explicand, pool_, *classifier_, tfidf_, config_.prototypes, rule);
    return build_neighborhood(explicand, protos, index_, *classifier_, tfidf_,
                              {config_.population, config_.max_rounds});
  }

  ExplainResult explain(const TokenSeq& explicand, Method method) const {
    const auto start = std::chrono::steady_clock::now();
    ExplainResult r;
    r.method = method;
    r.neighborhood = neighborhood(explicand, method);
    r.surrogate = fit_surrogate(r.neighborhood, config_.sigma, config_.ridge);
    r.attributions = split_attributions(r.surrogate, explicand,
                                        r.neighborhood.target_class,
                                        config_.threshold);
    r.instances = select_instances(r.neighborhood, tfidf_, config_.lambda,
                                   config_.instances);
    r.report = make_report(r.neighborhood, r.attributions, r.instances, Meta(method));
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count();
    return r;
  }

  MetricRecord evaluate(const ExplainResult& r) const {
    MetricRecord m;
    m.r2 = r2(r.surrogate, r.neighborhood).value_or(std::nan(""));
    m.fidelity = fidelity(r.surrogate, r.neighborhood);
    m.confidence_drop = confidence_drop(r.attributions, r.neighborhood.explicand,
                                        *classifier_, index_, config_.threshold);
    m.aopc = aopc(r.attributions, r.neighborhood.explicand, *classifier_, index_,
                  config_.threshold);
    m.wall_time_seconds = r.seconds;
    return m;
  }

 private:
  RunMetadata Meta(Method method) const {
    RunMetadata m;
    m.method = method_name(method);
    m.n = config_.n;
    m.k = config_.prototypes;
    m.population = config_.population;
    m.sigma = config_.sigma;
    m.lambda = config_.lambda;
    m.ridge = config_.ridge;
    m.threshold = config_.threshold;
    m.corpus_sha256 = corpus_hash_;
    m.classifier = classifier_->descriptor();
    return m;
  }

  Corpus corpus_;
  ClassifierHandle classifier_;
  RunConfig config_;
  TfidfModel tfidf_;
  NgramIndex index_;
  PrototypePool pool_;
  std::string corpus_hash_;
};

}  // namespace xprob

#endif  // XPROB_PIPELINE_HPP_
