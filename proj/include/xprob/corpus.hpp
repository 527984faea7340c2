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

// Corpus ingestion and the tf-idf space used for every distance in the
// pipeline (prototype ranking, surrogate weights, instance selection).

#ifndef XPROB_CORPUS_HPP_
#define XPROB_CORPUS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xprob/text.hpp"

namespace xprob {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Corpus {
  std::vector<TokenSeq> documents;
  std::string source_path;

  std::size_t size() const { return documents.size(); }
  bool empty() const { return documents.empty(); }
};

// One document per non-blank line, tokenized, order preserved. Duplicate
// lines are kept.
inline Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open corpus file: " + path);
  Corpus corpus;
  corpus.source_path = path;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    TokenSeq doc = tokenize(line);
    if (!doc.empty()) corpus.documents.push_back(std::move(doc));
  }
  if (in.bad()) throw CorpusError("read failure on corpus file: " + path);
  if (corpus.documents.empty()) {
    throw CorpusError("corpus has no non-blank lines: " + path);
  }
  return corpus;
}

// Keeps the first `size` documents of a seeded permutation, so samples of
// increasing size drawn with the same seed are nested. The permutation is
// built from raw mt19937_64 output to stay identical across standard
// libraries.
inline Corpus downsample(const Corpus& corpus, std::size_t size,
                         std::uint64_t seed) {
  if (size >= corpus.size()) return corpus;
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  order.resize(size);
  std::sort(order.begin(), order.end());
  Corpus out;
  out.source_path = corpus.source_path;
  out.documents.reserve(size);
  for (std::size_t i : order) out.documents.push_back(corpus.documents[i]);
  return out;
}

// Sorted (index, weight) pairs with no stored zeros.
struct SparseVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool is_zero() const { return entries.empty(); }

  double norm() const {
    double s = 0.0;
    for (const auto& [_, v] : entries) s += v * v;
    return std::sqrt(s);
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

inline double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      s += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s;
}

// a - b, dropping exact zeros.
inline SparseVector subtract(const SparseVector& a, const SparseVector& b) {
  SparseVector out;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() || ib != b.entries.end()) {
    if (ib == b.entries.end() ||
        (ia != a.entries.end() && ia->first < ib->first)) {
      out.entries.push_back(*ia++);
    } else if (ia == a.entries.end() || ib->first < ia->first) {
      out.entries.emplace_back(ib->first, -ib->second);
      ++ib;
    } else {
      const double v = ia->second - ib->second;
      if (v != 0.0) out.entries.emplace_back(ia->first, v);
      ++ia;
      ++ib;
    }
  }
  return out;
}

// Smoothed idf: ln((1 + N) / (1 + df)) + 1, raw term counts, L2 norm.
class TfidfModel {
 public:
  TfidfModel() = default;

  static TfidfModel fit(const Corpus& corpus) {
    if (corpus.empty()) throw ContractViolation("fit_tfidf: empty corpus");
    TfidfModel model;
    model.doc_count_ = corpus.size();
    std::vector<std::size_t> df;
    std::vector<std::uint32_t> seen_in;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      for (const auto& tok : corpus.documents[d]) {
        auto [it, inserted] = model.vocabulary_.try_emplace(
            tok, static_cast<std::uint32_t>(model.vocabulary_.size()));
        if (inserted) {
          df.push_back(0);
          seen_in.push_back(0);
        }
        const std::uint32_t col = it->second;
        // seen_in stores doc index + 1 of the last document counted.
        if (seen_in[col] != d + 1) {
          seen_in[col] = static_cast<std::uint32_t>(d + 1);
          ++df[col];
        }
      }
    }
    model.idf_.resize(df.size());
    const double n = static_cast<double>(model.doc_count_);
    for (std::size_t c = 0; c < df.size(); ++c) {
      model.idf_[c] =
          std::log((1.0 + n) / (1.0 + static_cast<double>(df[c]))) + 1.0;
    }
    return model;
  }

  SparseVector vectorize(const TokenSeq& tokens) const {
    std::unordered_map<std::uint32_t, double> tf;
    for (const auto& tok : tokens) {
      auto it = vocabulary_.find(tok);
      if (it != vocabulary_.end()) tf[it->second] += 1.0;
    }
    SparseVector v;
    v.entries.reserve(tf.size());
    for (const auto& [col, count] : tf) {
      v.entries.emplace_back(col, count * idf_[col]);
    }
    std::sort(v.entries.begin(), v.entries.end());
    const double norm = v.norm();
    if (norm > 0.0) {
      for (auto& [_, w] : v.entries) w /= norm;
    }
    return v;
  }

  // Returns -1 for out-of-vocabulary tokens.
  long column(const std::string& token) const {
    auto it = vocabulary_.find(token);
    return it == vocabulary_.end() ? -1 : static_cast<long>(it->second);
  }
  double idf(const std::string& token) const {
    const long c = column(token);
    if (c < 0) throw std::out_of_range("token not in vocabulary: " + token);
    return idf_[static_cast<std::size_t>(c)];
  }
  std::size_t vocabulary_size() const { return vocabulary_.size(); }
  std::size_t doc_count() const { return doc_count_; }

 private:
  std::unordered_map<std::string, std::uint32_t> vocabulary_;
  std::vector<double> idf_;
  std::size_t doc_count_ = 0;
};

inline TfidfModel fit_tfidf(const Corpus& corpus) {
  return TfidfModel::fit(corpus);
}

inline SparseVector vectorize(const TfidfModel& model,
                              const TokenSeq& tokens) {
  return model.vectorize(tokens);
}

// 1 - cos(a, b), clamped to [0, 1] for tf-idf vectors. A zero vector is
// maximally far from everything, including another zero vector.
inline double cosine_distance(const SparseVector& a, const SparseVector& b) {
  if (a.is_zero() || b.is_zero()) return 1.0;
  const double denom = a.norm() * b.norm();
  const double d = 1.0 - dot(a, b) / denom;
  return std::clamp(d, 0.0, 1.0);
}

// Cosine distance for vectors that may carry negative weights (manipulation
// directions); the result lies in [0, 2]. Zero vectors again map to 1.
inline double direction_distance(const SparseVector& a,
                                 const SparseVector& b) {
  if (a.is_zero() || b.is_zero()) return 1.0;
  const double d = 1.0 - dot(a, b) / (a.norm() * b.norm());
  return std::clamp(d, 0.0, 2.0);
}

}  // namespace xprob

#endif  // XPROB_CORPUS_HPP_
