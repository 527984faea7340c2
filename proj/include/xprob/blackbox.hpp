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

// The black-box contract: a batch of texts in, one probability vector per
// text out. Explanations only ever see classifiers through this interface.

#ifndef XPROB_BLACKBOX_HPP_
#define XPROB_BLACKBOX_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xprob/text.hpp"

namespace xprob {

class ClassifierError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Prediction {
  std::vector<double> probs;

  int predicted_class() const {
    return static_cast<int>(std::max_element(probs.begin(), probs.end()) -
                            probs.begin());
  }
  double confidence() const { return probs[predicted_class()]; }
  double prob(int cls) const { return probs.at(static_cast<std::size_t>(cls)); }

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual int class_count() const = 0;
  // Order-preserving; one prediction per input.
  virtual std::vector<Prediction> classify_batch(
      std::span<const TokenSeq> texts) = 0;
  virtual std::string descriptor() const = 0;

  Prediction classify(const TokenSeq& text) {
    return classify_batch(std::span<const TokenSeq>(&text, 1)).front();
  }
};

using ClassifierHandle = std::shared_ptr<Classifier>;

// Multinomial naive Bayes over token counts with add-one smoothing.
// Out-of-vocabulary tokens carry no evidence.
class NaiveBayesClassifier final : public Classifier {
 public:
  struct Example {
    int label = 0;
    TokenSeq tokens;
  };

  static std::shared_ptr<NaiveBayesClassifier> train(
      std::span<const Example> examples) {
    if (examples.size() < 10) {
      throw TrainingError("need at least 10 training examples, got " +
                          std::to_string(examples.size()));
    }
    std::set<int> labels;
    for (const auto& ex : examples) {
      if (ex.label < 0) throw TrainingError("labels must be non-negative");
      labels.insert(ex.label);
    }
    if (labels.size() < 2) {
      throw TrainingError("training data contains a single class");
    }
    auto model = std::shared_ptr<NaiveBayesClassifier>(new NaiveBayesClassifier);
    model->classes_ = *labels.rbegin() + 1;
    const auto c = static_cast<std::size_t>(model->classes_);
    model->doc_counts_.assign(c, 0);
    model->token_totals_.assign(c, 0);
    for (const auto& ex : examples) {
      const auto label = static_cast<std::size_t>(ex.label);
      ++model->doc_counts_[label];
      for (const auto& tok : ex.tokens) {
        auto& row = model->counts_[tok];
        if (row.empty()) row.assign(c, 0);
        ++row[label];
        ++model->token_totals_[label];
      }
    }
    model->Finalize();
    return model;
  }

  int class_count() const override { return classes_; }

  std::vector<Prediction> classify_batch(
      std::span<const TokenSeq> texts) override {
    std::vector<Prediction> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(Predict(t));
    return out;
  }

  std::string descriptor() const override {
    return "builtin:multinomial-nb(classes=" + std::to_string(classes_) +
           ",vocab=" + std::to_string(counts_.size()) + ")";
  }

  Prediction Predict(const TokenSeq& tokens) const {
    std::vector<double> logp = log_prior_;
    for (const auto& tok : tokens) {
      auto it = log_likelihood_.find(tok);
      if (it == log_likelihood_.end()) continue;
      for (std::size_t k = 0; k < logp.size(); ++k) logp[k] += it->second[k];
    }
    const double mx = *std::max_element(logp.begin(), logp.end());
    double z = 0.0;
    for (double& v : logp) {
      v = std::exp(v - mx);
      z += v;
    }
    for (double& v : logp) v /= z;
    return Prediction{std::move(logp)};
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["type"] = "multinomial_nb";
    j["classes"] = classes_;
    j["doc_counts"] = doc_counts_;
    j["token_totals"] = token_totals_;
    // std::map gives a stable token order in the file.
    std::map<std::string, std::vector<std::uint64_t>> sorted(counts_.begin(),
                                                              counts_.end());
    j["counts"] = sorted;
    return j;
  }

  static std::shared_ptr<NaiveBayesClassifier> from_json(
      const nlohmann::json& j) {
    if (j.value("type", "") != "multinomial_nb") {
      throw TrainingError("model file is not a multinomial_nb model");
    }
    auto model = std::shared_ptr<NaiveBayesClassifier>(new NaiveBayesClassifier);
    model->classes_ = j.at("classes").get<int>();
    model->doc_counts_ = j.at("doc_counts").get<std::vector<std::uint64_t>>();
    model->token_totals_ =
        j.at("token_totals").get<std::vector<std::uint64_t>>();
    for (const auto& [tok, row] : j.at("counts").items()) {
      model->counts_[tok] = row.get<std::vector<std::uint64_t>>();
    }
    model->Finalize();
    return model;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << to_json().dump() << '\n';
  }

  static std::shared_ptr<NaiveBayesClassifier> load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    return from_json(nlohmann::json::parse(in));
  }

 private:
  NaiveBayesClassifier() = default;

  void Finalize() {
    const auto c = static_cast<std::size_t>(classes_);
    double total_docs = 0.0;
    for (auto d : doc_counts_) total_docs += static_cast<double>(d);
    log_prior_.assign(c, 0.0);
    for (std::size_t k = 0; k < c; ++k) {
      // A label with no documents gets -inf and hence probability 0.
      log_prior_[k] = std::log(static_cast<double>(doc_counts_[k]) / total_docs);
    }
    const double vocab = static_cast<double>(counts_.size());
    log_likelihood_.clear();
    for (const auto& [tok, row] : counts_) {
      std::vector<double> ll(c);
      for (std::size_t k = 0; k < c; ++k) {
        ll[k] = std::log((static_cast<double>(row[k]) + 1.0) /
                         (static_cast<double>(token_totals_[k]) + vocab));
      }
      log_likelihood_.emplace(tok, std::move(ll));
    }
  }

  int classes_ = 0;
  std::vector<std::uint64_t> doc_counts_;
  std::vector<std::uint64_t> token_totals_;
  std::unordered_map<std::string, std::vector<std::uint64_t>> counts_;
  std::vector<double> log_prior_;
  std::unordered_map<std::string, std::vector<double>> log_likelihood_;
};

// Labeled TSV: `label<TAB>text` per line; blank lines skipped.
inline std::vector<NaiveBayesClassifier::Example> load_labeled_tsv(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open labeled file: " + path);
  std::vector<NaiveBayesClassifier::Example> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected label<TAB>text");
    }
    const std::string label = line.substr(0, tab);
    if (label != "0" && label != "1") {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": label must be 0 or 1, got '" + label + "'");
    }
    out.push_back({label == "1" ? 1 : 0, tokenize(line.substr(tab + 1))});
  }
  return out;
}

// Memoizes predictions by token sequence and forwards only unseen texts
// (deduplicated) to the wrapped classifier. Thread-safe.
class CachingClassifier final : public Classifier {
 public:
  explicit CachingClassifier(ClassifierHandle inner) : inner_(std::move(inner)) {}

  int class_count() const override { return inner_->class_count(); }
  std::string descriptor() const override { return inner_->descriptor(); }

  std::vector<Prediction> classify_batch(
      std::span<const TokenSeq> texts) override {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<TokenSeq> misses;
    std::unordered_map<TokenSeq, std::size_t, TokenSeqHash> pending;
    for (const auto& t : texts) {
      if (cache_.count(t) || pending.count(t)) continue;
      pending.emplace(t, misses.size());
      misses.push_back(t);
    }
    if (!misses.empty()) {
      auto preds = inner_->classify_batch(misses);
      for (std::size_t k = 0; k < misses.size(); ++k) {
        cache_.emplace(std::move(misses[k]), std::move(preds[k]));
      }
      queries_ += 1;
    }
    std::vector<Prediction> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(cache_.at(t));
    return out;
  }

  std::size_t cached() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.size();
  }
  std::size_t batches_forwarded() const {
    std::lock_guard<std::mutex> lock(mu_);
    return queries_;
  }

 private:
  ClassifierHandle inner_;
  mutable std::mutex mu_;
  std::unordered_map<TokenSeq, Prediction, TokenSeqHash> cache_;
  std::size_t queries_ = 0;
};

}  // namespace xprob

#endif  // XPROB_BLACKBOX_HPP_
